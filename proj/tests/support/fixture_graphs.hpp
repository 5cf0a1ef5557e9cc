#pragma once

#include <nlohmann/json.hpp>

#include "pkgraph/analyze/code_analyzer.hpp"
#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/model/graph.hpp"

namespace testsupport {

/// Graph described node by node in retrieval_graphs.jsonl, embedded with det-v1 and sealed.
inline pkgraph::Graph graph_from_fixture(const nlohmann::json& spec) {
    using namespace pkgraph;
    const std::size_t d = spec["dimension"].get<std::size_t>();
    Graph g(EmbeddingInfo{"det-v1", d});
    for (const auto& n : spec["nodes"]) {
        PkgNode node;
        node.kind = *parse_node_kind(n["kind"].get<std::string>());
        node.content = n["content"].get<std::string>();
        node.doc_id = "g";
        if (n.contains("owner")) node.function_id = n["owner"].get<NodeId>();
        if (n.contains("path")) node.path = n["path"].get<std::string>();
        const NodeId id = g.add_node(std::move(node));
        if (n.contains("parent")) {
            g.add_edge({n["parent"].get<NodeId>(), id, *parse_edge_kind(n["edge"].get<std::string>())});
        }
    }
    HashingEmbedder embedder(d);
    embed_graph(g, embedder);
    g.seal();
    return g;
}

/// Code graph of the given sources (one document each), embedded with det-v1 and sealed.
inline pkgraph::Graph code_graph(const std::vector<std::string>& sources, std::size_t dimension = 256) {
    using namespace pkgraph;
    Graph g(EmbeddingInfo{"det-v1", dimension});
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const ExtractResult r = extract_functions(sources[i], "src:" + std::to_string(i + 1));
        emit_graph(r.functions, g);
    }
    HashingEmbedder embedder(dimension);
    embed_graph(g, embedder);
    g.seal();
    return g;
}

inline const char* kSentenceCounter =
    "def count_sentences(text):\n"
    "    boring = 0\n"
    "    exciting = 0\n"
    "    sentences = split_sentences(text)\n"
    "    for sentence in sentences:\n"
    "        if sentence.startswith(\"I \"):\n"
    "            boring += 1\n"
    "    for sentence in sentences:\n"
    "        if sentence.endswith(\"!\"):\n"
    "            exciting += 1\n"
    "    return boring, exciting\n";

inline const char* kBoringQuery = "count the boring sentences that start with I";
inline const char* kExcitingQuery = "count the exciting sentences that end with an exclamation mark";
inline const char* kBothQuery = "for each sentence, if it startswith I add to boring; if it endswith ! add to exciting";

}  // namespace testsupport
