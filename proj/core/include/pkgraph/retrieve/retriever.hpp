// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/model/graph.hpp"
#include "pkgraph/retrieve/calls.hpp"
#include "pkgraph/retrieve/prune.hpp"
#include "pkgraph/retrieve/search.hpp"

namespace pkgraph {

struct RetrievalResult {
    NodeId node_id = 0;
    RetrievalMode mode = RetrievalMode::BlockWise;
    double raw_similarity = 0.0;
    std::string rendered_context;
    bool pruned = false;
    std::vector<Span> pruned_branch_spans;
    std::vector<NodeId> pruned_block_ids;
    std::vector<ResolvedCall> resolved_calls;
    double augmented_similarity = 0.0;
};

nlohmann::ordered_json to_json(const RetrievalResult& result);

struct RetrieverOptions {
    PruneConfig prune;
    std::size_t max_calls = 3;
};

/// Read-only view over a sealed graph. Safe to share between threads as long as the
/// embedder is.
class Retriever {
public:
    Retriever(const Graph& graph, Embedder& embedder, RetrieverOptions options = {});

    std::vector<ScoredNode> search(std::string_view query, RetrievalMode mode, std::size_t top_k) const;
    RetrievalResult retrieve(std::string_view query, RetrievalMode mode) const;
    RetrievalResult retrieve(std::string_view query, RetrievalMode mode, const PruneConfig& prune) const;

    const Graph& graph() const noexcept { return graph_; }
    Embedder& embedder() const noexcept { return embedder_; }
    const RetrieverOptions& options() const noexcept { return options_; }

private:
    const Graph& graph_;
    Embedder& embedder_;
    RetrieverOptions options_;
    NameIndex names_;
};

}  // namespace pkgraph
