// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

enum class RetrievalMode { BlockWise, FunctionWise, PathValue };

NodeKind mode_kind(RetrievalMode mode) noexcept;
/// "block", "function", "path".
std::string_view to_string(RetrievalMode mode) noexcept;
std::optional<RetrievalMode> parse_mode(std::string_view text) noexcept;

struct ScoredNode {
    NodeId id = 0;
    double score = 0.0;

    bool operator==(const ScoredNode&) const = default;
};

/// Exhaustive cosine ranking over every node of the mode's kind: score descending, then id
/// ascending. Throws EmptyIndex, MissingEmbedding or LengthMismatch.
std::vector<ScoredNode> search(const Graph& graph, const Embedding& query, RetrievalMode mode, std::size_t top_k);

}  // namespace pkgraph
