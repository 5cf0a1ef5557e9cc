// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/rerank/runner.hpp"

namespace pkgraph {

struct Candidate {
    std::string id;
    std::string origin;
    std::string source;
    std::optional<bool> syntax_ok;
    std::optional<std::string> syntax_error;  // interpreter-style class name when syntax_ok is false
    std::optional<bool> runtime_ok;
    std::optional<std::string> runtime_error_kind;
    std::optional<double> similarity;
};

/// 1: parses and runs. 2: parses. 3: everything.
enum class Tier { Runs = 1, Parses = 2, All = 3 };

void syntax_filter(std::vector<Candidate>& candidates);

/// Runs every candidate that parsed, up to `workers` at a time. Verdicts do not depend on the
/// worker count.
void runtime_filter(std::vector<Candidate>& candidates, Runner& runner, std::size_t workers = 1);

struct Selection {
    std::size_t index = 0;
    Tier tier = Tier::All;
};

/// Highest query similarity within the best non-empty tier; ties go to the smaller id. Only
/// the tier's members get a similarity. Throws NoCandidates.
Selection select(std::vector<Candidate>& candidates, const Embedding& query, Embedder& embedder);

struct OriginStats {
    std::string origin;
    std::size_t total = 0;
    std::size_t syntax_errors = 0;
    std::size_t runtime_errors = 0;  // among candidates that parsed
    double syntax_error_rate = 0.0;  // over total
    double runtime_error_rate = 0.0;  // over total
};

struct RerankReport {
    std::string chosen_id;
    std::size_t chosen_index = 0;
    Tier tier = Tier::All;
    std::vector<Candidate> candidates;  // ordered by id
    std::size_t total = 0;
    std::size_t parsed = 0;
    std::size_t ran = 0;
    std::vector<OriginStats> origins;  // ordered by origin label
};

RerankReport rerank(std::vector<Candidate> candidates, std::string_view query, Runner& runner, Embedder& embedder,
                    std::size_t workers = 1);

nlohmann::ordered_json to_json(const Candidate& candidate);
nlohmann::ordered_json to_json(const RerankReport& report);

/// Reads `index.jsonl` ({id, origin, path}, path relative to `dir`) and the candidate files.
std::vector<Candidate> load_candidates(const std::filesystem::path& dir);

}  // namespace pkgraph
