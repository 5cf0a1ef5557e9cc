#include <gtest/gtest.h>

#include "pkgraph/analyze/code_analyzer.hpp"
#include "pkgraph/analyze/corpus.hpp"
#include "pkgraph/error.hpp"
#include "test_support.hpp"

using namespace pkgraph;

TEST(CodeAnalyzer, BlocksMatchSyntaxTreeOracle) {
    const auto rows = testsupport::read_jsonl(testsupport::fixtures() / "functions.jsonl");
    ASSERT_EQ(rows.size(), 50u);
    for (const auto& row : rows) {
        const auto bodies = strip_code_fences(row["record"]["output"].get<std::string>());
        ASSERT_EQ(bodies.size(), 1u);
        const ExtractResult r = extract_functions(bodies[0], "doc");
        ASSERT_TRUE(r.diagnostics.empty()) << bodies[0];
        const auto& want_fns = row["functions"];
        ASSERT_EQ(r.functions.size(), want_fns.size()) << bodies[0];
        for (std::size_t f = 0; f < want_fns.size(); ++f) {
            const FunctionRecord& fn = r.functions[f];
            const auto& want = want_fns[f];
            EXPECT_EQ(fn.name, want["name"]);
            EXPECT_EQ(fn.span, (Span{want["start"].get<int>(), want["end"].get<int>()}));
            ASSERT_EQ(fn.blocks.size(), want["blocks"].size()) << bodies[0];
            for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
                const auto& wb = want["blocks"][b];
                EXPECT_EQ(to_string(fn.blocks[b].construct), wb["construct"].get<std::string>());
                EXPECT_EQ(fn.blocks[b].span, (Span{wb["start"].get<int>(), wb["end"].get<int>()})) << bodies[0];
                if (wb["parent"].is_null()) {
                    EXPECT_FALSE(fn.blocks[b].parent.has_value());
                } else {
                    EXPECT_EQ(fn.blocks[b].parent, wb["parent"].get<std::size_t>());
                }
            }
            const std::vector<BlockRecord> again = extract_blocks(fn);
            ASSERT_EQ(again.size(), fn.blocks.size());
            for (std::size_t b = 0; b < again.size(); ++b) {
                EXPECT_EQ(again[b].span, fn.blocks[b].span);
                EXPECT_EQ(again[b].source, fn.blocks[b].source);
            }
        }
    }
}

TEST(CodeAnalyzer, SourcesAreDedentedWholeLines) {
    const std::string src =
        "class A:\n"
        "    @staticmethod\n"
        "    def m(x):\n"
        "        with open(x) as f:\n"
        "            return f.read()\n";
    const ExtractResult r = extract_functions(src, "d");
    ASSERT_EQ(r.functions.size(), 1u);
    const FunctionRecord& fn = r.functions[0];
    EXPECT_EQ(fn.source, "@staticmethod\ndef m(x):\n    with open(x) as f:\n        return f.read()\n");
    EXPECT_EQ(fn.span, (Span{2, 5}));
    ASSERT_EQ(fn.blocks.size(), 1u);
    EXPECT_EQ(fn.blocks[0].construct, Construct::With);
    EXPECT_EQ(fn.blocks[0].source, "    with open(x) as f:\n        return f.read()\n");
    EXPECT_EQ(fn.blocks[0].span, (Span{4, 5}));
}

TEST(CodeAnalyzer, NestedDefsContributeBlocksButNotFunctions) {
    const std::string src =
        "def outer():\n"
        "    def inner():\n"
        "        while True:\n"
        "            break\n"
        "    return inner\n";
    const ExtractResult r = extract_functions(src, "d");
    ASSERT_EQ(r.functions.size(), 1u);
    ASSERT_EQ(r.functions[0].blocks.size(), 1u);
    EXPECT_EQ(r.functions[0].blocks[0].construct, Construct::While);
}

TEST(CodeAnalyzer, UnparseableChunksAreReportedAndSkipped) {
    const std::string src =
        "def good():\n"
        "    if x:\n"
        "        pass\n"
        "\n"
        "def bad(:\n"
        "    pass\n"
        "\n"
        "def also_good():\n"
        "    try:\n"
        "        pass\n"
        "    except E:\n"
        "        pass\n";
    const ExtractResult r = extract_functions(src, "doc");
    ASSERT_EQ(r.functions.size(), 2u);
    EXPECT_EQ(r.functions[0].name, "good");
    EXPECT_EQ(r.functions[1].name, "also_good");
    EXPECT_EQ(r.functions[1].span, (Span{8, 12}));
    EXPECT_EQ(r.functions[1].blocks[0].span, (Span{9, 12}));
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].line, 5);
    EXPECT_EQ(r.diagnostics[0].doc_id, "doc");
}

TEST(CodeAnalyzer, EmitsOneSubgraphPerFunction) {
    const ExtractResult r = extract_functions(
        "def f(xs):\n"
        "    for x in xs:\n"
        "        if x:\n"
        "            pass\n"
        "    if xs:\n"
        "        pass\n",
        "d");
    Graph g;
    const auto emitted = emit_graph(r.functions, g);
    ASSERT_EQ(emitted.size(), 1u);
    EXPECT_EQ(g.node_count(), 2u + 3u);
    EXPECT_EQ(g.edge_count(), 1u + 3u);
    const auto& e = emitted[0];
    EXPECT_EQ(g.children(e.name_id, EdgeKind::NameToImpl), std::vector<NodeId>{e.impl_id});
    EXPECT_EQ(g.children(e.impl_id, EdgeKind::ImplToBlock), (std::vector<NodeId>{e.block_ids[0], e.block_ids[2]}));
    EXPECT_EQ(g.children(e.block_ids[0], EdgeKind::BlockToBlock), std::vector<NodeId>{e.block_ids[1]});
    EXPECT_FALSE(g.node(e.name_id).span.has_value());
    EXPECT_EQ(g.node(e.block_ids[1]).function_id, e.name_id);
    g.seal();
}

TEST(CodeAnalyzer, ExtractBlocksRejectsBrokenSource) {
    FunctionRecord fn;
    fn.name = "f";
    fn.source = "def f(:\n";
    EXPECT_THROW(extract_blocks(fn), Error);
}
