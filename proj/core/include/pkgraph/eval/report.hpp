// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pkgraph {

/// Histogram classes: the five interpreter error classes, then everything else.
inline constexpr std::array<std::string_view, 6> kHistogramClasses = {
    "AssertionError", "NameError", "TypeError", "SyntaxError", "IndentationError", "Other"};

/// Maps a failure kind ("Timeout", "TabError", ...) onto kHistogramClasses.
std::string_view histogram_class(std::string_view kind) noexcept;

struct Attempt {
    bool generated = false;  // false when the generator failed
    bool passed = false;
    std::optional<std::string> error_kind;
    std::size_t context_tokens = 0;
    std::optional<bool> syntax_ok;   // rerank verdicts on the bare solution
    std::optional<bool> runtime_ok;
};

struct TaskOutcome {
    std::string task_id;
    std::optional<std::string> topic;
    std::vector<Attempt> attempts;  // parallel to EvalReport::approaches
    std::optional<std::string> reranked_choice;
    int reranked_tier = 0;
    bool reranked_passed = false;
};

struct ApproachSummary {
    std::string label;
    double pass_at_1 = 0.0;
    std::array<std::size_t, kHistogramClasses.size()> error_histogram{};
    double syntax_error_rate = 0.0;
    double runtime_error_rate = 0.0;
    double avg_context_tokens = 0.0;
};

struct TopicSummary {
    std::string topic;
    std::size_t tasks = 0;
    std::vector<double> pass_at_1;  // parallel to approaches
    double reranked_pass_at_1 = 0.0;
    double ideal_rerank_pass_at_1 = 0.0;
};

struct EvalReport {
    std::vector<std::string> approaches;
    std::vector<TaskOutcome> tasks;  // ordered by task_id
    std::vector<ApproachSummary> summaries;
    double reranked_pass_at_1 = 0.0;
    double ideal_rerank_pass_at_1 = 0.0;
    std::vector<TopicSummary> topics;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// Fills summaries, reranked/ideal scores and topic rows from `tasks`.
void summarize(EvalReport& report);

nlohmann::ordered_json to_json(const EvalReport& report);

/// task_id, then one 0/1 column per approach, then reranked and ideal.
std::string pass_matrix_csv(const EvalReport& report);

/// Fixed-width pass@1 table for terminals.
std::string summary_table(const EvalReport& report);

}  // namespace pkgraph
