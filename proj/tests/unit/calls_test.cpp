#include <gtest/gtest.h>

#include "fixture_graphs.hpp"
#include "pkgraph/retrieve/calls.hpp"

using namespace pkgraph;

TEST(Calls, Dedent) {
    EXPECT_EQ(dedent("    a\n\n      b\n"), "a\n\n  b\n");
    EXPECT_EQ(dedent("a\n  b\n"), "a\n  b\n");
}

TEST(Calls, FreeCallsExcludeLocalsAndBuiltins) {
    EXPECT_EQ(free_calls("def f(x):\n    y = helper(x)\n    return len(g(y)) + f(1)\n"),
              (std::vector<std::string>{"helper", "g"}));
    // Indented fragment of a larger function, and a fragment that does not parse.
    EXPECT_EQ(free_calls("        if ok:\n            do_it(value)\n"), std::vector<std::string>{"do_it"});
    EXPECT_EQ(free_calls("    for x in xs:\n        step(x\n"), std::vector<std::string>{"step"});
}

TEST(Calls, ResolvesAgainstNameIndex) {
    const Graph g = testsupport::code_graph({
        "def split_sentences(text):\n    return text.split('.')\n",
        "def split_sentences(text):\n    return [s for s in text.split('!') if s]\n",
        "def unrelated():\n    return 0\n",
        testsupport::kSentenceCounter,
    });
    const NameIndex index(g);
    ASSERT_NE(index.find("split_sentences"), nullptr);
    EXPECT_EQ(index.find("split_sentences")->size(), 2u);
    EXPECT_EQ(index.find("missing"), nullptr);

    HashingEmbedder e;
    const auto calls = resolve_calls(g, index, testsupport::kSentenceCounter, e.embed_one("keep only nonempty sentences s for s in split"));
    ASSERT_EQ(calls.size(), 1u);
    EXPECT_EQ(calls[0].name, "split_sentences");
    EXPECT_EQ(calls[0].content, "def split_sentences(text):\n    return [s for s in text.split('!') if s]\n");

    // Same score: the lower id wins.
    const auto tie = resolve_calls(g, index, "split_sentences(t)\n", Embedding(256, 0.0));
    ASSERT_EQ(tie.size(), 1u);
    EXPECT_EQ(tie[0].impl_id, 1u);
    EXPECT_TRUE(resolve_calls(g, index, "split_sentences(t)\n", e.embed_one("x"), 0).empty());
}

TEST(Calls, CapsNumberOfHelpers) {
    const Graph g = testsupport::code_graph({
        "def a():\n    return 1\n",
        "def b():\n    return 2\n",
        "def c():\n    return 3\n",
        "def d():\n    return 4\n",
    });
    const NameIndex index(g);
    HashingEmbedder e;
    const auto calls = resolve_calls(g, index, "x = d() + c() + b() + a()\n", e.embed_one("q"));
    ASSERT_EQ(calls.size(), 3u);
    EXPECT_EQ(calls[0].name, "d");
    EXPECT_EQ(calls[2].name, "b");
}
