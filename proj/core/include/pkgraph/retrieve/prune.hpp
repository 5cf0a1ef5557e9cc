// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/model/graph.hpp"

namespace pkgraph {

struct PruneConfig {
    bool enabled = true;
    std::size_t max_branches_removed = 1;
    std::size_t min_remaining_lines = 1;  // non-blank lines a candidate must keep
};

/// Throws InvalidConfig naming the offending field.
void validate(const PruneConfig& cfg);

struct PruneOutcome {
    std::string rendered;
    std::vector<Span> removed_spans;       // file lines, in removal order
    std::vector<NodeId> removed_block_ids;  // parallel to removed_spans
    double identity_similarity = 0.0;      // query vs the stored node vector
    double similarity = 0.0;               // query vs the chosen rendering
    bool pruned = false;
};

/// Chooses among the node text and the texts with one immediate child block's lines deleted,
/// by similarity to the query. The identity wins ties, then the lower branch index. With
/// max_branches_removed > 1 the choice repeats greedily on the survivor.
PruneOutcome prune(const Graph& graph, NodeId node_id, const Embedding& query, const PruneConfig& cfg,
                   Embedder& embedder);

/// Deletes the given file-line spans from the text of a node starting at file line `first_line`.
std::string remove_spans(const std::string& content, int first_line, const std::vector<Span>& spans);

}  // namespace pkgraph
