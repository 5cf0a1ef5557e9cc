#include <gtest/gtest.h>

#include "pkgraph/error.hpp"
#include "pkgraph/rerank/runner.hpp"

using namespace pkgraph;

TEST(Runner, ParsesVerdictLines) {
    const RunVerdict ok = parse_verdict(R"({"status":"ok","error_kind":null,"stderr_tail":"","duration_ms":1.5})");
    EXPECT_EQ(ok.status, RunStatus::Ok);
    EXPECT_FALSE(ok.error_kind.has_value());
    EXPECT_EQ(ok.duration_ms, 1.5);
    const RunVerdict err = parse_verdict(R"({"status":"error","error_kind":"NameError","stderr_tail":"x","duration_ms":2})");
    EXPECT_EQ(err.status, RunStatus::Error);
    EXPECT_EQ(err.error_kind, "NameError");
    EXPECT_THROW(parse_verdict("garbage"), Error);
    EXPECT_THROW(parse_verdict(R"({"status":"maybe"})"), Error);
}

TEST(Runner, ClassifiesFailures) {
    RunVerdict v;
    v.status = RunStatus::Error;
    v.error_kind = "TypeError";
    EXPECT_EQ(classify(v), "TypeError");
    v.error_kind = "ZeroDivisionError";
    EXPECT_EQ(classify(v), "Other");
    v.error_kind.reset();
    v.stderr_tail = "Traceback (most recent call last):\n  File \"x\", line 1\nAssertionError: boom\n\n";
    EXPECT_EQ(classify(v), "AssertionError");
    v.stderr_tail = "  File \"x\", line 2\n    pass\nIndentationError: unexpected indent\n";
    EXPECT_EQ(classify(v), "IndentationError");
    v.status = RunStatus::Timeout;
    EXPECT_EQ(classify(v), "Timeout");
}

TEST(Runner, SpecValidation) {
    RunnerSpec spec;
    spec.command = "x";
    EXPECT_NO_THROW(validate(spec));
    spec.timeout_seconds = 0;
    EXPECT_THROW(validate(spec), Error);
    spec.timeout_seconds = 1;
    spec.memory_limit_mb = 0;
    EXPECT_THROW(validate(spec), Error);
}

TEST(ProcessRunner, SpeaksProtocolWithStub) {
    ProcessRunner runner(RunnerSpec{PKGRAPH_STUB_RUNNER, 5, 256});
    EXPECT_EQ(runner.run("print(1)\n").status, RunStatus::Ok);
    const RunVerdict fail = runner.run("x = 1\n#!fail:TypeError\n");
    EXPECT_EQ(fail.status, RunStatus::Error);
    EXPECT_EQ(fail.error_kind, "TypeError");
    EXPECT_EQ(runner.run("#!fail-on-judge:AssertionError\n").status, RunStatus::Ok);
    EXPECT_EQ(runner.run("#!fail-on-judge:AssertionError\n#!judge\n").error_kind, "AssertionError");
    EXPECT_EQ(runner.run("#!timeout\n").status, RunStatus::Timeout);
}

TEST(ProcessRunner, MissingCommandIsUnavailable) {
    try {
        ProcessRunner runner(RunnerSpec{"/nonexistent/runner-binary", 5, 256});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RunnerUnavailable);
    }
    EXPECT_THROW(ProcessRunner(RunnerSpec{"no-such-runner-on-path-xyz", 5, 256}), Error);
}

#ifdef PKGRAPH_PY_RUNNER
TEST(ProcessRunner, ExecutesPythonPrograms) {
    ProcessRunner runner(RunnerSpec{PKGRAPH_PY_RUNNER, 2, 512});
    EXPECT_EQ(runner.run("assert 1 + 1 == 2\n").status, RunStatus::Ok);
    EXPECT_EQ(classify(runner.run("assert False\n")), "AssertionError");
    EXPECT_EQ(classify(runner.run("undefined_name\n")), "NameError");
    EXPECT_EQ(classify(runner.run("1 + 'a'\n")), "TypeError");
    EXPECT_EQ(classify(runner.run("def f(:\n")), "SyntaxError");
    EXPECT_EQ(classify(runner.run("x = 1\n  y = 2\n")), "IndentationError");
    EXPECT_EQ(classify(runner.run("1 / 0\n")), "Other");
    EXPECT_EQ(classify(runner.run("while True:\n    pass\n")), "Timeout");
}
#endif
