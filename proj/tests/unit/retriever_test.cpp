#include <gtest/gtest.h>

#include "fixture_graphs.hpp"
#include "pkgraph/analyze/json_analyzer.hpp"
#include "pkgraph/error.hpp"
#include "pkgraph/retrieve/retriever.hpp"

using namespace pkgraph;

namespace {

Graph mixed_graph() {
    Graph g(EmbeddingInfo{"det-v1", 256});
    const std::vector<std::string> sources = {
        testsupport::kSentenceCounter,
        "def split_sentences(text):\n    return text.split('.')\n",
    };
    for (std::size_t i = 0; i < sources.size(); ++i) emit_graph(extract_functions(sources[i], "c").functions, g);
    json_to_graph(R"({"title":"Loops","body":{"text":"use for loops to iterate"}})", "j:1", g);
    HashingEmbedder e;
    embed_graph(g, e);
    g.seal();
    return g;
}

}  // namespace

TEST(Retriever, FunctionWiseWithPruningAndHelpers) {
    const Graph g = mixed_graph();
    HashingEmbedder e;
    const Retriever r(g, e);
    const RetrievalResult res = r.retrieve(testsupport::kBoringQuery, RetrievalMode::FunctionWise);
    EXPECT_EQ(g.node(res.node_id).kind, NodeKind::FunctionImpl);
    EXPECT_EQ(g.node(res.node_id).content, testsupport::kSentenceCounter);
    EXPECT_TRUE(res.pruned);
    EXPECT_EQ(res.pruned_branch_spans, std::vector<Span>{(Span{8, 10})});
    EXPECT_GE(res.augmented_similarity, res.raw_similarity);
    ASSERT_EQ(res.resolved_calls.size(), 1u);
    EXPECT_EQ(res.resolved_calls[0].name, "split_sentences");

    const auto j = to_json(res);
    EXPECT_EQ(j["mode"], "function");
    EXPECT_EQ(j["pruned_branch_spans"].dump(), "[[8,10]]");
    EXPECT_EQ(j["resolved_calls"][0]["name"], "split_sentences");

    PruneConfig off;
    off.enabled = false;
    const RetrievalResult raw = r.retrieve(testsupport::kBoringQuery, RetrievalMode::FunctionWise, off);
    EXPECT_FALSE(raw.pruned);
    EXPECT_EQ(raw.rendered_context, testsupport::kSentenceCounter);
    EXPECT_EQ(raw.augmented_similarity, raw.raw_similarity);
}

TEST(Retriever, PathValueModeReturnsStoredText) {
    const Graph g = mixed_graph();
    HashingEmbedder e;
    const Retriever r(g, e);
    const RetrievalResult res = r.retrieve("loops iterate", RetrievalMode::PathValue);
    EXPECT_EQ(res.rendered_context, "body-text: use for loops to iterate");
    EXPECT_TRUE(res.resolved_calls.empty());
    EXPECT_FALSE(res.pruned);
}

TEST(Retriever, RequiresSealedMatchingGraph) {
    Graph open(EmbeddingInfo{"det-v1", 256});
    HashingEmbedder e;
    EXPECT_THROW(Retriever(open, e), Error);
    const Graph g = mixed_graph();
    HashingEmbedder small(64);
    EXPECT_THROW(Retriever(g, small), Error);
}
