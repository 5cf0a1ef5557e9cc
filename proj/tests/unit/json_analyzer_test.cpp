#include <gtest/gtest.h>

#include "pkgraph/analyze/json_analyzer.hpp"
#include "pkgraph/error.hpp"
#include "test_support.hpp"

using namespace pkgraph;

TEST(JsonAnalyzer, EscapesPathSegments) {
    EXPECT_EQ(escape_path_segment("plain"), "plain");
    EXPECT_EQ(escape_path_segment("a-b"), "a\\-b");
    EXPECT_EQ(escape_path_segment("x\\y"), "x\\\\y");
}

TEST(JsonAnalyzer, BuildsPathValueTree) {
    Graph g;
    const NodeId root = json_to_graph(R"({"title":"Loops","body":{"text":"use for","tags":["a",1]},"n":null})", "doc:1", g);
    EXPECT_EQ(g.node(root).content, "doc:1");
    EXPECT_EQ(g.node(root).path, "");
    EXPECT_FALSE(g.node(root).value.has_value());
    EXPECT_EQ(g.node_count(), 8u);
    EXPECT_EQ(g.edge_count(), 7u);

    std::map<std::string, const PkgNode*> by_path;
    for (const PkgNode& n : g.nodes()) by_path[*n.path] = &n;
    EXPECT_EQ(by_path.at("title")->content, "title: Loops");
    EXPECT_EQ(by_path.at("title")->value, "\"Loops\"");
    EXPECT_EQ(by_path.at("body-tags-1")->content, "body-tags-1: 1");
    EXPECT_EQ(by_path.at("n")->value, "null");
    EXPECT_FALSE(by_path.at("body")->value.has_value());
    const NodeId tags = by_path.at("body-tags")->id;
    EXPECT_EQ(g.children(tags, EdgeKind::JsonListItem).size(), 2u);
    EXPECT_EQ(g.children(root, EdgeKind::JsonChild).size(), 3u);
}

TEST(JsonAnalyzer, RejectsInvalidInput) {
    Graph g;
    try {
        json_to_graph("{\"a\": }", "d", g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseFailure);
    }
    try {
        json_to_graph("[1, 2]", "d", g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAnObject);
    }
    EXPECT_EQ(g.node_count(), 0u);
}

TEST(JsonAnalyzer, ReconstructsRandomTrees) {
    const auto rows = testsupport::read_jsonl(testsupport::fixtures() / "json_trees.jsonl");
    Graph g;
    std::size_t i = 0;
    for (const auto& row : rows) {
        const std::string id = "doc" + std::to_string(i++);
        const std::size_t before_nodes = g.node_count();
        const std::size_t before_edges = g.edge_count();
        json_to_graph(row["document"].get<std::string>(), id, g);
        EXPECT_EQ(g.node_count() - before_nodes, row["node_count"].get<std::size_t>());
        EXPECT_EQ(g.edge_count() - before_edges, row["node_count"].get<std::size_t>() - 1);
        const auto leaves = reconstruct_leaves(g, id);
        std::map<std::string, nlohmann::json> want;
        for (const auto& [k, v] : row["leaves"].items()) want[k] = v;
        EXPECT_EQ(leaves, want) << row["document"];
    }
    EXPECT_THROW(reconstruct_leaves(g, "missing"), Error);
}
