// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/retrieve/retriever.hpp"

#include "pkgraph/error.hpp"

namespace pkgraph {

nlohmann::ordered_json to_json(const RetrievalResult& r) {
    nlohmann::ordered_json j;
    j["node_id"] = r.node_id;
    j["mode"] = to_string(r.mode);
    j["raw_similarity"] = r.raw_similarity;
    j["augmented_similarity"] = r.augmented_similarity;
    j["pruned"] = r.pruned;
    nlohmann::ordered_json spans = nlohmann::ordered_json::array();
    for (const Span& s : r.pruned_branch_spans) spans.push_back({s.start, s.end});
    j["pruned_branch_spans"] = std::move(spans);
    j["pruned_block_ids"] = r.pruned_block_ids;
    j["rendered_context"] = r.rendered_context;
    nlohmann::ordered_json calls = nlohmann::ordered_json::array();
    for (const ResolvedCall& c : r.resolved_calls) {
        calls.push_back({{"name", c.name}, {"impl_id", c.impl_id}, {"content", c.content}});
    }
    j["resolved_calls"] = std::move(calls);
    return j;
}

Retriever::Retriever(const Graph& graph, Embedder& embedder, RetrieverOptions options)
    : graph_(graph), embedder_(embedder), options_(std::move(options)), names_(graph) {
    if (!graph_.sealed()) throw Error(ErrorCode::NotSealed, "retrieval requires a sealed graph");
    validate(options_.prune);
    const EmbeddingInfo& info = graph_.embedding_info();
    if (info.dimension != embedder_.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "graph vectors have dimension " + std::to_string(info.dimension) +
                                                      ", embedder produces " + std::to_string(embedder_.dimension()));
    }
}

std::vector<ScoredNode> Retriever::search(std::string_view query, RetrievalMode mode, std::size_t top_k) const {
    return pkgraph::search(graph_, embedder_.embed(query), mode, top_k);
}

RetrievalResult Retriever::retrieve(std::string_view query, RetrievalMode mode) const {
    return retrieve(query, mode, options_.prune);
}

RetrievalResult Retriever::retrieve(std::string_view query, RetrievalMode mode, const PruneConfig& prune_cfg) const {
    const Embedding q = embedder_.embed(query);
    const ScoredNode best = pkgraph::search(graph_, q, mode, 1).front();
    const PkgNode& node = graph_.node(best.id);

    RetrievalResult r;
    r.node_id = best.id;
    r.mode = mode;
    r.raw_similarity = best.score;
    r.rendered_context = node.content;
    r.augmented_similarity = best.score;
    if (mode == RetrievalMode::PathValue) return r;

    const PruneOutcome p = prune(graph_, best.id, q, prune_cfg, embedder_);
    r.rendered_context = p.rendered;
    r.pruned = p.pruned;
    r.pruned_branch_spans = p.removed_spans;
    r.pruned_block_ids = p.removed_block_ids;
    r.augmented_similarity = p.similarity;
    r.resolved_calls = resolve_calls(graph_, names_, r.rendered_context, q, options_.max_calls);
    return r;
}

}  // namespace pkgraph
