// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pkgraph {

using NodeId = std::uint64_t;
using Embedding = std::vector<double>;

enum class NodeKind { FunctionName, FunctionImpl, CodeBlock, PathValue };
enum class EdgeKind { NameToImpl, ImplToBlock, BlockToBlock, JsonChild, JsonListItem };

inline constexpr std::size_t kNodeKindCount = 4;
inline constexpr std::size_t kEdgeKindCount = 5;

/// Wire names: "function_name", "name_to_impl", ...
std::string_view to_string(NodeKind kind) noexcept;
std::string_view to_string(EdgeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;
std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept;

/// Inclusive 1-based line range.
struct Span {
    int start = 0;
    int end = 0;

    int length() const noexcept { return end - start + 1; }
    bool contains(const Span& other) const noexcept { return start <= other.start && other.end <= end; }
    bool operator==(const Span&) const = default;
};

struct PkgNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::FunctionName;
    std::string content;
    std::optional<std::string> path;   // PathValue only
    std::optional<std::string> value;  // JSON text of a primitive; nullopt is the container marker
    std::string doc_id;
    std::optional<NodeId> function_id;  // FunctionImpl / CodeBlock only
    std::optional<Span> span;
    std::optional<Embedding> embedding;

    bool operator==(const PkgNode&) const = default;
};

struct PkgEdge {
    NodeId src = 0;
    NodeId dst = 0;
    EdgeKind kind = EdgeKind::NameToImpl;

    bool operator==(const PkgEdge&) const = default;
};

struct GraphStats {
    std::array<std::size_t, kNodeKindCount> nodes{};
    std::array<std::size_t, kEdgeKindCount> edges{};
    std::size_t node_total = 0;
    std::size_t edge_total = 0;

    std::size_t count(NodeKind k) const noexcept { return nodes[static_cast<std::size_t>(k)]; }
    std::size_t count(EdgeKind k) const noexcept { return edges[static_cast<std::size_t>(k)]; }
    bool operator==(const GraphStats&) const = default;
};

/// Identifies the embedder whose vectors a graph stores.
struct EmbeddingInfo {
    std::string embedder_id = "det-v1";
    std::size_t dimension = 256;

    bool operator==(const EmbeddingInfo&) const = default;
};

/// In-memory PKG. Single writer during the build phase; immutable and freely shareable
/// between readers after seal().
class Graph {
public:
    Graph() = default;
    explicit Graph(EmbeddingInfo info) : info_(std::move(info)) {}

    /// The id field of `node` is ignored; the next dense id is assigned and returned.
    NodeId add_node(PkgNode node);
    void add_edge(const PkgEdge& edge);
    void set_embedding(NodeId id, Embedding embedding);
    void seal();

    bool sealed() const noexcept { return sealed_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool contains(NodeId id) const noexcept { return id < nodes_.size(); }

    const PkgNode& node(NodeId id) const;
    const std::vector<PkgNode>& nodes() const noexcept { return nodes_; }
    const std::vector<PkgEdge>& edges() const noexcept { return edges_; }

    /// Edge indices, in insertion order.
    std::span<const std::size_t> out_edges(NodeId id) const;
    std::span<const std::size_t> in_edges(NodeId id) const;
    /// Destinations of outgoing edges of the given kind, in insertion order.
    std::vector<NodeId> children(NodeId id, EdgeKind kind) const;
    std::vector<NodeId> nodes_of_kind(NodeKind kind) const;

    const EmbeddingInfo& embedding_info() const noexcept { return info_; }
    void set_embedding_info(EmbeddingInfo info);

    GraphStats stats() const;

    /// Structural equality: nodes (including embeddings), edges and embedding info.
    bool operator==(const Graph& other) const {
        return info_ == other.info_ && nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    struct EdgeKey {
        NodeId src;
        NodeId dst;
        EdgeKind kind;
        bool operator==(const EdgeKey&) const = default;
    };
    struct EdgeKeyHash {
        std::size_t operator()(const EdgeKey& k) const noexcept;
    };

    void require_open() const;

    EmbeddingInfo info_;
    std::vector<PkgNode> nodes_;
    std::vector<PkgEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
    std::unordered_set<EdgeKey, EdgeKeyHash> edge_keys_;
    bool sealed_ = false;
};

}  // namespace pkgraph
