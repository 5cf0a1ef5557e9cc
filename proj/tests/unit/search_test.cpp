#include <gtest/gtest.h>

#include "fixture_graphs.hpp"
#include "pkgraph/error.hpp"
#include "pkgraph/retrieve/search.hpp"
#include "test_support.hpp"

using namespace pkgraph;

TEST(Search, MatchesBruteForceOracle) {
    for (const auto& spec : testsupport::read_jsonl(testsupport::fixtures() / "retrieval_graphs.jsonl")) {
        const Graph g = testsupport::graph_from_fixture(spec);
        HashingEmbedder e(64);
        for (const auto& q : spec["queries"]) {
            const Embedding qv = e.embed_one(q["text"].get<std::string>());
            for (const auto& [mode_name, ranking] : q["rankings"].items()) {
                const RetrievalMode mode = *parse_mode(mode_name);
                if (ranking.empty()) {
                    EXPECT_THROW(search(g, qv, mode, 5), Error);
                    continue;
                }
                const auto got = search(g, qv, mode, ranking.size() + 3);
                ASSERT_EQ(got.size(), ranking.size());
                for (std::size_t i = 0; i < got.size(); ++i) {
                    EXPECT_EQ(got[i].id, ranking[i][0].get<NodeId>());
                    EXPECT_EQ(got[i].score, ranking[i][1].get<double>());
                }
                const auto top3 = search(g, qv, mode, 3);
                EXPECT_EQ(top3, std::vector<ScoredNode>(got.begin(), got.begin() + std::min<std::size_t>(3, got.size())));
            }
        }
    }
}

TEST(Search, ModesAndErrors) {
    EXPECT_EQ(parse_mode("block"), RetrievalMode::BlockWise);
    EXPECT_EQ(parse_mode("function"), RetrievalMode::FunctionWise);
    EXPECT_EQ(parse_mode("path"), RetrievalMode::PathValue);
    EXPECT_FALSE(parse_mode("json").has_value());
    EXPECT_EQ(mode_kind(RetrievalMode::FunctionWise), NodeKind::FunctionImpl);

    Graph unembedded(EmbeddingInfo{"det-v1", 8});
    PkgNode n;
    n.kind = NodeKind::FunctionName;
    n.content = "f";
    const NodeId name = unembedded.add_node(n);
    PkgNode impl;
    impl.kind = NodeKind::FunctionImpl;
    impl.content = "def f(): pass";
    impl.function_id = name;
    unembedded.add_node(impl);
    unembedded.seal();
    try {
        search(unembedded, Embedding(8, 0.1), RetrievalMode::FunctionWise, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingEmbedding);
    }
    try {
        search(unembedded, Embedding(8, 0.1), RetrievalMode::BlockWise, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyIndex);
    }
}
