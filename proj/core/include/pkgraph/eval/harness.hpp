// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/eval/generator.hpp"
#include "pkgraph/eval/report.hpp"
#include "pkgraph/rerank/runner.hpp"
#include "pkgraph/retrieve/retriever.hpp"
#include "pkgraph/retrieve/templates.hpp"

namespace pkgraph {

struct Task {
    std::string task_id;
    std::string prompt;
    std::string test_script;
    std::string entry_point;
    std::optional<std::string> topic;
};

/// JSON Lines {task_id, prompt, test_script, entry_point, topic?}. Throws CorruptRecord.
std::vector<Task> load_tasks(const std::filesystem::path& path);

/// JSON object task_id -> topic label; labels override those in the task file.
void apply_topics(std::vector<Task>& tasks, const std::filesystem::path& path);

struct Approach {
    std::string label;
    std::optional<RetrievalMode> mode;  // none: no retrieval
    bool prune = true;
    std::string template_id = "codellama";
};

/// "none", "block-pkg", "func-pkg", "json-pkg", each optionally suffixed "-noprune".
/// Throws InvalidConfig.
Approach parse_approach(std::string_view label, std::string_view template_id = "codellama");

/// [PYTHON]...[/PYTHON] region, else the first fenced block, else the whole completion.
std::string extract_code(std::string_view completion);

struct JudgeVerdict {
    bool passed = false;
    std::optional<std::string> error_kind;
};

/// Runs solution + "\n" + test_script.
JudgeVerdict judge(std::string_view solution, const Task& task, Runner& runner);

/// Whitespace-separated runs, further split so each punctuation character stands alone.
std::size_t context_token_count(std::string_view text);

struct SuiteOptions {
    std::size_t workers = 1;
    std::size_t generator_retries = 0;
};

/// `retriever` may be null when every approach is "none".
EvalReport run_suite(const std::vector<Task>& tasks, const Retriever* retriever, const std::vector<Approach>& approaches,
                     const TemplateRegistry& templates, Generator& generator, Runner& runner, Embedder& embedder,
                     const SuiteOptions& options = {});

}  // namespace pkgraph
