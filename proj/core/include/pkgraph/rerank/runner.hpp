// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace pkgraph {

struct RunnerSpec {
    std::string command;  // whitespace-separated program and leading arguments
    double timeout_seconds = 5.0;
    std::size_t memory_limit_mb = 512;
};

/// Throws InvalidConfig naming the offending field.
void validate(const RunnerSpec& spec);

enum class RunStatus { Ok, Error, Timeout };

std::string_view to_string(RunStatus status) noexcept;

struct RunVerdict {
    RunStatus status = RunStatus::Ok;
    std::optional<std::string> error_kind;
    std::string stderr_tail;
    double duration_ms = 0.0;
};

/// Parses the single JSON line a runner prints. Throws RunnerUnavailable on malformed output.
RunVerdict parse_verdict(std::string_view line);

inline constexpr std::string_view kErrorClasses[] = {"AssertionError", "NameError", "TypeError", "SyntaxError",
                                                     "IndentationError"};

/// Error class of a failed run: one of kErrorClasses, "Timeout", or "Other". Uses the runner's
/// error_kind when given, else the exception name on the last non-blank stderr line.
std::string classify(const RunVerdict& verdict);

class Runner {
public:
    virtual ~Runner() = default;
    /// Executes one program. Must be callable from several threads at once.
    virtual RunVerdict run(const std::string& source) = 0;
};

/// Spawns `command <file> --timeout S --memory-mb M` per program and reads its verdict line.
class ProcessRunner final : public Runner {
public:
    /// Throws RunnerUnavailable when the command cannot be found or is not executable.
    explicit ProcessRunner(RunnerSpec spec);

    RunVerdict run(const std::string& source) override;
    const RunnerSpec& spec() const noexcept { return spec_; }

private:
    RunnerSpec spec_;
    std::string program_;  // resolved executable path
};

class CallbackRunner final : public Runner {
public:
    using Fn = std::function<RunVerdict(const std::string&)>;
    explicit CallbackRunner(Fn fn) : fn_(std::move(fn)) {}
    RunVerdict run(const std::string& source) override { return fn_(source); }

private:
    Fn fn_;
};

}  // namespace pkgraph
