// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/retrieve/search.hpp"

#include <algorithm>

#include "pkgraph/embed/embedding.hpp"
#include "pkgraph/error.hpp"

namespace pkgraph {

NodeKind mode_kind(RetrievalMode mode) noexcept {
    switch (mode) {
    case RetrievalMode::BlockWise: return NodeKind::CodeBlock;
    case RetrievalMode::FunctionWise: return NodeKind::FunctionImpl;
    case RetrievalMode::PathValue: return NodeKind::PathValue;
    }
    return NodeKind::CodeBlock;
}

std::string_view to_string(RetrievalMode mode) noexcept {
    switch (mode) {
    case RetrievalMode::BlockWise: return "block";
    case RetrievalMode::FunctionWise: return "function";
    case RetrievalMode::PathValue: return "path";
    }
    return "block";
}

std::optional<RetrievalMode> parse_mode(std::string_view text) noexcept {
    if (text == "block") return RetrievalMode::BlockWise;
    if (text == "function") return RetrievalMode::FunctionWise;
    if (text == "path") return RetrievalMode::PathValue;
    return std::nullopt;
}

std::vector<ScoredNode> search(const Graph& graph, const Embedding& query, RetrievalMode mode, std::size_t top_k) {
    const NodeKind kind = mode_kind(mode);
    std::vector<ScoredNode> scored;
    for (const PkgNode& n : graph.nodes()) {
        if (n.kind != kind) continue;
        if (!n.embedding) throw Error(ErrorCode::MissingEmbedding, "node " + std::to_string(n.id));
        scored.push_back({n.id, similarity(query, *n.embedding)});
    }
    if (scored.empty()) throw Error(ErrorCode::EmptyIndex, "no " + std::string(to_string(kind)) + " nodes");
    const auto better = [](const ScoredNode& a, const ScoredNode& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    };
    const std::size_t k = std::min(top_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
    scored.resize(k);
    return scored;
}

}  // namespace pkgraph
