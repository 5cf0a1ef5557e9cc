// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/rerank/runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "pkgraph/error.hpp"

extern char** environ;

namespace pkgraph {

void validate(const RunnerSpec& spec) {
    if (spec.command.find_first_not_of(" \t") == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "runner.command must not be empty");
    }
    if (!(spec.timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "runner.timeout_seconds must be positive");
    if (spec.memory_limit_mb == 0) throw Error(ErrorCode::InvalidConfig, "runner.memory_limit_mb must be positive");
}

std::string_view to_string(RunStatus status) noexcept {
    switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Error: return "error";
    case RunStatus::Timeout: return "timeout";
    }
    return "error";
}

RunVerdict parse_verdict(std::string_view line) {
    RunVerdict v;
    try {
        const nlohmann::json j = nlohmann::json::parse(line);
        const std::string status = j.at("status").get<std::string>();
        if (status == "ok") {
            v.status = RunStatus::Ok;
        } else if (status == "error") {
            v.status = RunStatus::Error;
        } else if (status == "timeout") {
            v.status = RunStatus::Timeout;
        } else {
            throw Error(ErrorCode::RunnerUnavailable, "runner reported unknown status '" + status + "'");
        }
        if (j.contains("error_kind") && j["error_kind"].is_string()) v.error_kind = j["error_kind"].get<std::string>();
        if (j.contains("stderr_tail") && j["stderr_tail"].is_string()) v.stderr_tail = j["stderr_tail"].get<std::string>();
        if (j.contains("duration_ms") && j["duration_ms"].is_number()) v.duration_ms = j["duration_ms"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::RunnerUnavailable, std::string("malformed runner output: ") + e.what());
    }
    return v;
}

std::string classify(const RunVerdict& verdict) {
    if (verdict.status == RunStatus::Timeout) return "Timeout";
    std::string kind;
    if (verdict.error_kind) {
        kind = *verdict.error_kind;
    } else {
        std::string_view tail = verdict.stderr_tail;
        while (!tail.empty() && (tail.back() == '\n' || tail.back() == '\r' || tail.back() == ' ')) tail.remove_suffix(1);
        const std::size_t nl = tail.find_last_of('\n');
        std::string_view last = nl == std::string_view::npos ? tail : tail.substr(nl + 1);
        kind = std::string(last.substr(0, last.find(':')));
    }
    // Qualified names such as "builtins.NameError".
    if (const std::size_t dot = kind.find_last_of('.'); dot != std::string::npos) kind = kind.substr(dot + 1);
    for (std::string_view known : kErrorClasses) {
        if (kind == known) return kind;
    }
    return "Other";
}

namespace {

std::vector<std::string> split_command(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> parts;
    for (std::string p; in >> p;) parts.push_back(p);
    return parts;
}

bool executable(const std::filesystem::path& p) {
    struct stat st {};
    return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
}

std::string resolve_program(const std::string& name) {
    if (name.find('/') != std::string::npos) return executable(name) ? name : std::string();
    const char* path = std::getenv("PATH");
    std::string_view dirs = path ? path : "/usr/bin:/bin";
    while (true) {
        const std::size_t colon = dirs.find(':');
        const std::string_view dir = dirs.substr(0, colon);
        const std::filesystem::path candidate = std::filesystem::path(dir.empty() ? "." : std::string(dir)) / name;
        if (executable(candidate)) return candidate.string();
        if (colon == std::string_view::npos) return {};
        dirs.remove_prefix(colon + 1);
    }
}

class TempFile {
public:
    explicit TempFile(const std::string& contents) {
        std::string tmpl = (std::filesystem::temp_directory_path() / "pkgraph-cand-XXXXXX.py").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        const int fd = ::mkstemps(buf.data(), 3);
        if (fd < 0) throw Error(ErrorCode::Io, std::string("mkstemps: ") + std::strerror(errno));
        path_ = buf.data();
        std::size_t off = 0;
        while (off < contents.size()) {
            const ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) {
                ::close(fd);
                throw Error(ErrorCode::Io, "cannot write candidate file " + path_);
            }
            off += static_cast<std::size_t>(n);
        }
        ::close(fd);
    }
    ~TempFile() { ::unlink(path_.c_str()); }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

std::string format_seconds(double s) {
    std::ostringstream out;
    out << s;
    return out.str();
}

}  // namespace

ProcessRunner::ProcessRunner(RunnerSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    const std::vector<std::string> parts = split_command(spec_.command);
    program_ = resolve_program(parts.front());
    if (program_.empty()) throw Error(ErrorCode::RunnerUnavailable, "command not found: " + parts.front());
}

RunVerdict ProcessRunner::run(const std::string& source) {
    const TempFile file(source);
    std::vector<std::string> args = split_command(spec_.command);
    args.front() = program_;
    args.push_back(file.path());
    args.push_back("--timeout");
    args.push_back(format_seconds(spec_.timeout_seconds));
    args.push_back("--memory-mb");
    args.push_back(std::to_string(spec_.memory_limit_mb));
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    int out_pipe[2];
    int err_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::Io, "pipe failed");
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        throw Error(ErrorCode::Io, "pipe failed");
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], 2);
    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, program_.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    if (rc != 0) {
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        throw Error(ErrorCode::RunnerUnavailable, "cannot start " + program_ + ": " + std::strerror(rc));
    }

    // The runner enforces the candidate timeout itself; this deadline only guards against a
    // runner that hangs.
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(static_cast<long long>(spec_.timeout_seconds * 2000.0) + 10000);
    std::string out;
    std::string err;
    pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    int open_fds = 2;
    bool killed = false;
    while (open_fds > 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            ::kill(pid, SIGKILL);
            killed = true;
            break;
        }
        const int n = ::poll(fds, 2, static_cast<int>(left.count()));
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) break;
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            char buf[4096];
            const ssize_t r = ::read(fds[i].fd, buf, sizeof buf);
            if (r > 0) {
                (i == 0 ? out : err).append(buf, static_cast<std::size_t>(r));
            } else if (r == 0 || errno != EINTR) {
                ::close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }
    for (pollfd& f : fds) {
        if (f.fd >= 0) ::close(f.fd);
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (killed) throw Error(ErrorCode::RunnerUnavailable, "runner did not finish: " + spec_.command);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw Error(ErrorCode::RunnerUnavailable, "runner failed (status " + std::to_string(status) + "): " + err);
    }
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    const std::size_t nl = out.find_last_of('\n');
    return parse_verdict(nl == std::string::npos ? out : out.substr(nl + 1));
}

}  // namespace pkgraph
