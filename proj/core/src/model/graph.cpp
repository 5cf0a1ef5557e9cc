// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/model/graph.hpp"

#include <cmath>

#include "pkgraph/error.hpp"

namespace pkgraph {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kNodeNames = {"function_name", "function_impl", "code_block",
                                                                     "path_value"};
constexpr std::array<std::string_view, kEdgeKindCount> kEdgeNames = {"name_to_impl", "impl_to_block",
                                                                     "block_to_block", "json_child", "json_list_item"};

struct Endpoints {
    NodeKind src;
    NodeKind dst;
};

Endpoints endpoints_of(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::NameToImpl: return {NodeKind::FunctionName, NodeKind::FunctionImpl};
    case EdgeKind::ImplToBlock: return {NodeKind::FunctionImpl, NodeKind::CodeBlock};
    case EdgeKind::BlockToBlock: return {NodeKind::CodeBlock, NodeKind::CodeBlock};
    case EdgeKind::JsonChild:
    case EdgeKind::JsonListItem: return {NodeKind::PathValue, NodeKind::PathValue};
    }
    return {NodeKind::PathValue, NodeKind::PathValue};
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept { return kNodeNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(EdgeKind kind) noexcept { return kEdgeNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
    for (std::size_t i = 0; i < kNodeNames.size(); ++i) {
        if (kNodeNames[i] == text) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept {
    for (std::size_t i = 0; i < kEdgeNames.size(); ++i) {
        if (kEdgeNames[i] == text) return static_cast<EdgeKind>(i);
    }
    return std::nullopt;
}

std::size_t Graph::EdgeKeyHash::operator()(const EdgeKey& k) const noexcept {
    std::size_t h = std::hash<NodeId>{}(k.src);
    h ^= std::hash<NodeId>{}(k.dst) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(k.kind) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

void Graph::require_open() const {
    if (sealed_) throw Error(ErrorCode::BuildPhaseClosed, "graph is sealed");
}

NodeId Graph::add_node(PkgNode node) {
    require_open();
    if (node.content.empty()) throw Error(ErrorCode::InvalidNode, "node content is empty");
    if ((node.kind == NodeKind::PathValue) != node.path.has_value()) {
        throw Error(ErrorCode::InvalidNode, "path must be present exactly for path_value nodes");
    }
    if (node.kind != NodeKind::PathValue && node.value.has_value()) {
        throw Error(ErrorCode::InvalidNode, "value is only meaningful for path_value nodes");
    }
    if (node.kind == NodeKind::FunctionImpl || node.kind == NodeKind::CodeBlock) {
        if (!node.function_id) throw Error(ErrorCode::InvalidNode, "code node without function_id");
        if (!contains(*node.function_id) || nodes_[*node.function_id].kind != NodeKind::FunctionName) {
            throw Error(ErrorCode::InvalidNode,
                        "function_id " + std::to_string(*node.function_id) + " is not a function_name node");
        }
    } else if (node.function_id) {
        throw Error(ErrorCode::InvalidNode, "function_id is only meaningful for code nodes");
    }
    if (node.span && (node.span->start < 1 || node.span->end < node.span->start)) {
        throw Error(ErrorCode::InvalidNode, "malformed span");
    }
    if (node.embedding && node.embedding->size() != info_.dimension) {
        throw Error(ErrorCode::DimensionMismatch, "embedding length " + std::to_string(node.embedding->size()) +
                                                      " differs from dimension " + std::to_string(info_.dimension));
    }
    node.id = nodes_.size();
    nodes_.push_back(std::move(node));
    out_.emplace_back();
    in_.emplace_back();
    return nodes_.back().id;
}

void Graph::add_edge(const PkgEdge& edge) {
    require_open();
    if (!contains(edge.src) || !contains(edge.dst)) {
        throw Error(ErrorCode::InvalidEndpoint, "edge " + std::to_string(edge.src) + "->" + std::to_string(edge.dst) +
                                                    " references a missing node");
    }
    const Endpoints want = endpoints_of(edge.kind);
    if (nodes_[edge.src].kind != want.src || nodes_[edge.dst].kind != want.dst) {
        throw Error(ErrorCode::KindMismatch, std::string(to_string(edge.kind)) + " cannot connect " +
                                                 std::string(to_string(nodes_[edge.src].kind)) + " to " +
                                                 std::string(to_string(nodes_[edge.dst].kind)));
    }
    if (!edge_keys_.insert({edge.src, edge.dst, edge.kind}).second) {
        throw Error(ErrorCode::DuplicateEdge, std::string(to_string(edge.kind)) + " " + std::to_string(edge.src) +
                                                  "->" + std::to_string(edge.dst));
    }
    out_[edge.src].push_back(edges_.size());
    in_[edge.dst].push_back(edges_.size());
    edges_.push_back(edge);
}

void Graph::set_embedding(NodeId id, Embedding embedding) {
    require_open();
    if (!contains(id)) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id));
    if (embedding.size() != info_.dimension) {
        throw Error(ErrorCode::DimensionMismatch, "embedding length " + std::to_string(embedding.size()) +
                                                      " differs from dimension " + std::to_string(info_.dimension));
    }
    for (double v : embedding) {
        if (!std::isfinite(v)) throw Error(ErrorCode::DimensionMismatch, "non-finite embedding component");
    }
    nodes_[id].embedding = std::move(embedding);
}

void Graph::set_embedding_info(EmbeddingInfo info) {
    require_open();
    if (info.dimension == 0) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be positive");
    for (const PkgNode& n : nodes_) {
        if (n.embedding && n.embedding->size() != info.dimension) {
            throw Error(ErrorCode::DimensionMismatch, "node " + std::to_string(n.id) + " holds a vector of length " +
                                                          std::to_string(n.embedding->size()));
        }
    }
    info_ = std::move(info);
}

void Graph::seal() {
    require_open();
    // Kahn's algorithm over all structural edges; anything left over sits on a cycle.
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    for (const PkgEdge& e : edges_) ++indegree[e.dst];
    std::vector<NodeId> queue;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (indegree[id] == 0) queue.push_back(id);
    }
    std::size_t visited = 0;
    while (!queue.empty()) {
        const NodeId id = queue.back();
        queue.pop_back();
        ++visited;
        for (std::size_t ei : out_[id]) {
            if (--indegree[edges_[ei].dst] == 0) queue.push_back(edges_[ei].dst);
        }
    }
    if (visited != nodes_.size()) {
        for (NodeId id = 0; id < nodes_.size(); ++id) {
            if (indegree[id] != 0) throw Error(ErrorCode::CycleDetected, "node " + std::to_string(id) + " lies on a cycle");
        }
    }
    sealed_ = true;
}

const PkgNode& Graph::node(NodeId id) const {
    if (!contains(id)) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id));
    return nodes_[id];
}

std::span<const std::size_t> Graph::out_edges(NodeId id) const {
    if (!contains(id)) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id));
    return out_[id];
}

std::span<const std::size_t> Graph::in_edges(NodeId id) const {
    if (!contains(id)) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id));
    return in_[id];
}

std::vector<NodeId> Graph::children(NodeId id, EdgeKind kind) const {
    std::vector<NodeId> out;
    for (std::size_t ei : out_edges(id)) {
        if (edges_[ei].kind == kind) out.push_back(edges_[ei].dst);
    }
    return out;
}

std::vector<NodeId> Graph::nodes_of_kind(NodeKind kind) const {
    std::vector<NodeId> out;
    for (const PkgNode& n : nodes_) {
        if (n.kind == kind) out.push_back(n.id);
    }
    return out;
}

GraphStats Graph::stats() const {
    GraphStats s;
    for (const PkgNode& n : nodes_) ++s.nodes[static_cast<std::size_t>(n.kind)];
    for (const PkgEdge& e : edges_) ++s.edges[static_cast<std::size_t>(e.kind)];
    s.node_total = nodes_.size();
    s.edge_total = edges_.size();
    return s;
}

}  // namespace pkgraph
