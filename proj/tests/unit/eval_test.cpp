#include <gtest/gtest.h>

#include "pkgraph/error.hpp"
#include "pkgraph/eval/generator.hpp"
#include "pkgraph/eval/harness.hpp"
#include "pkgraph/eval/report.hpp"
#include "test_support.hpp"

using namespace pkgraph;

TEST(Generator, Sha256) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Generator, MockTable) {
    MockGenerator strict({{sha256_hex("p"), "c"}}, true);
    EXPECT_EQ(strict.generate("p"), "c");
    try {
        strict.generate("q");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MockMiss);
    }
    MockGenerator lenient({}, false, "fallback");
    EXPECT_EQ(lenient.generate("q"), "fallback");

    testsupport::TempDir dir;
    testsupport::write_file(dir.path() / "m.jsonl", "{\"prompt_sha256\": \"" + sha256_hex("p") + "\", \"completion\": \"x\"}\n");
    EXPECT_EQ(MockGenerator::from_file(dir.path() / "m.jsonl", true).generate("p"), "x");
}

TEST(Generator, SpecValidation) {
    GeneratorSpec spec;
    EXPECT_THROW(validate(spec), Error);  // mock needs a table
    spec.mock_table = "m.jsonl";
    EXPECT_NO_THROW(validate(spec));
    spec.temperature = -1;
    EXPECT_THROW(validate(spec), Error);
    GeneratorSpec http;
    http.endpoint = "http://127.0.0.1:1/v1/completions";
    http.model = "m";
    http.timeout_seconds = 2;
    EXPECT_NO_THROW(validate(http));
    try {
        make_generator(http)->generate("p");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GeneratorError);
    }
}

TEST(Harness, ExtractCodeLadder) {
    EXPECT_EQ(extract_code("text [PYTHON]\ndef f(): pass\n[/PYTHON] more"), "def f(): pass");
    EXPECT_EQ(extract_code("Here:\n```python\nx = 1\n```\n"), "x = 1");
    EXPECT_EQ(extract_code("x = 2\n"), "x = 2\n");
}

TEST(Harness, ParseApproach) {
    EXPECT_FALSE(parse_approach("none").mode.has_value());
    const Approach b = parse_approach("block-pkg");
    EXPECT_EQ(b.mode, RetrievalMode::BlockWise);
    EXPECT_TRUE(b.prune);
    const Approach f = parse_approach("func-pkg-noprune", "starcoder");
    EXPECT_EQ(f.mode, RetrievalMode::FunctionWise);
    EXPECT_FALSE(f.prune);
    EXPECT_EQ(f.template_id, "starcoder");
    EXPECT_EQ(parse_approach("json-pkg").mode, RetrievalMode::PathValue);
    EXPECT_THROW(parse_approach("vector-rag"), Error);
}

TEST(Harness, ContextTokenCount) {
    EXPECT_EQ(context_token_count(""), 0u);
    EXPECT_EQ(context_token_count("def f(x):\n    return x"), 8u);
}

TEST(Harness, JudgeAppendsTests) {
    std::string seen;
    CallbackRunner runner([&](const std::string& src) {
        seen = src;
        RunVerdict v;
        if (src.find("bad") != std::string::npos) {
            v.status = RunStatus::Error;
            v.error_kind = "AssertionError";
        }
        return v;
    });
    Task t{"t", "p", "assert f() == 1\n", "f", std::nullopt};
    EXPECT_TRUE(judge("def f(): return 1\n", t, runner).passed);
    EXPECT_EQ(seen, "def f(): return 1\n\nassert f() == 1\n");
    const JudgeVerdict v = judge("bad", t, runner);
    EXPECT_FALSE(v.passed);
    EXPECT_EQ(v.error_kind, "AssertionError");
}

TEST(Harness, LoadsTasksAndTopics) {
    auto tasks = load_tasks(testsupport::fixtures() / "toy" / "tasks.jsonl");
    ASSERT_EQ(tasks.size(), 10u);
    EXPECT_EQ(tasks[0].task_id, "t00");
    EXPECT_EQ(tasks[0].topic, "arith");
    testsupport::TempDir dir;
    testsupport::write_file(dir.path() / "topics.json", R"({"t00": "math"})");
    apply_topics(tasks, dir.path() / "topics.json");
    EXPECT_EQ(tasks[0].topic, "math");
    testsupport::write_file(dir.path() / "bad.jsonl", "{\"task_id\": \"x\"}\n");
    EXPECT_THROW(load_tasks(dir.path() / "bad.jsonl"), Error);
}

TEST(Report, HistogramClasses) {
    EXPECT_EQ(histogram_class("NameError"), "NameError");
    EXPECT_EQ(histogram_class("Timeout"), "Other");
    EXPECT_EQ(histogram_class("TabError"), "Other");
}

TEST(Report, SummarizesPassMatrix) {
    EvalReport r;
    r.approaches = {"none", "block-pkg"};
    for (int i = 0; i < 4; ++i) {
        TaskOutcome t;
        t.task_id = "t" + std::to_string(i);
        t.topic = i < 2 ? "a" : "b";
        Attempt none;
        none.generated = true;
        none.passed = i == 0;
        if (!none.passed) none.error_kind = "NameError";
        Attempt block;
        block.generated = true;
        block.passed = i <= 1;
        block.context_tokens = 10;
        if (!block.passed) block.error_kind = "Timeout";
        t.attempts = {none, block};
        t.reranked_passed = i == 1;
        r.tasks.push_back(t);
    }
    summarize(r);
    EXPECT_DOUBLE_EQ(r.summaries[0].pass_at_1, 0.25);
    EXPECT_DOUBLE_EQ(r.summaries[1].pass_at_1, 0.5);
    EXPECT_EQ(r.summaries[0].error_histogram[1], 3u);
    EXPECT_EQ(r.summaries[1].error_histogram[5], 2u);
    EXPECT_DOUBLE_EQ(r.summaries[1].avg_context_tokens, 10.0);
    EXPECT_DOUBLE_EQ(r.ideal_rerank_pass_at_1, 0.5);
    EXPECT_DOUBLE_EQ(r.reranked_pass_at_1, 0.25);
    ASSERT_EQ(r.topics.size(), 2u);
    EXPECT_EQ(r.topics[0].topic, "a");
    EXPECT_DOUBLE_EQ(r.topics[0].pass_at_1[1], 1.0);
    const std::string csv = pass_matrix_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "task_id,none,block-pkg,reranked,ideal");
    EXPECT_NE(csv.find("t1,0,1,1,1"), std::string::npos);
    const auto j = to_json(r);
    EXPECT_EQ(j["pass_at_1"]["block-pkg"], 0.5);
    EXPECT_FALSE(summary_table(r).empty());
}
