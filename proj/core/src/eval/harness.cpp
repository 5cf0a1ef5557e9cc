// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "pkgraph/error.hpp"
#include "pkgraph/rerank/reranker.hpp"

namespace pkgraph {

std::vector<Task> load_tasks(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::vector<Task> tasks;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.filename().string() + " line " + std::to_string(lineno);
        Task t;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            t.task_id = j.at("task_id").get<std::string>();
            t.prompt = j.at("prompt").get<std::string>();
            t.test_script = j.at("test_script").get<std::string>();
            t.entry_point = j.value("entry_point", std::string());
            if (j.contains("topic") && j["topic"].is_string()) t.topic = j["topic"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::CorruptRecord, where + ": " + e.what());
        }
        if (t.test_script.empty()) throw Error(ErrorCode::CorruptRecord, where + ": empty test_script");
        if (!seen.insert(t.task_id).second) throw Error(ErrorCode::CorruptRecord, where + ": duplicate task_id " + t.task_id);
        tasks.push_back(std::move(t));
    }
    return tasks;
}

void apply_topics(std::vector<Task>& tasks, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::CorruptRecord, path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::CorruptRecord, path.string() + ": expected an object");
    for (Task& t : tasks) {
        if (const auto it = j.find(t.task_id); it != j.end() && it->is_string()) t.topic = it->get<std::string>();
    }
}

Approach parse_approach(std::string_view label, std::string_view template_id) {
    Approach a;
    a.label = std::string(label);
    a.template_id = std::string(template_id);
    std::string_view base = label;
    constexpr std::string_view kNoPrune = "-noprune";
    if (base.size() > kNoPrune.size() && base.substr(base.size() - kNoPrune.size()) == kNoPrune) {
        a.prune = false;
        base.remove_suffix(kNoPrune.size());
    }
    if (base == "none" && a.prune) return a;
    if (base == "block-pkg") {
        a.mode = RetrievalMode::BlockWise;
    } else if (base == "func-pkg") {
        a.mode = RetrievalMode::FunctionWise;
    } else if (base == "json-pkg") {
        a.mode = RetrievalMode::PathValue;
    } else {
        throw Error(ErrorCode::InvalidConfig, "approaches: unknown approach '" + std::string(label) + "'");
    }
    return a;
}

std::string extract_code(std::string_view completion) {
    constexpr std::string_view kOpen = "[PYTHON]";
    constexpr std::string_view kClose = "[/PYTHON]";
    const auto trim_newlines = [](std::string_view s) {
        while (!s.empty() && (s.front() == '\n' || s.front() == '\r')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
        return std::string(s);
    };
    if (const std::size_t open = completion.find(kOpen); open != std::string_view::npos) {
        const std::size_t start = open + kOpen.size();
        const std::size_t close = completion.find(kClose, start);
        return trim_newlines(completion.substr(start, close == std::string_view::npos ? std::string_view::npos : close - start));
    }
    if (const std::size_t fence = completion.find("```"); fence != std::string_view::npos) {
        const std::size_t header_end = completion.find('\n', fence);
        if (header_end != std::string_view::npos) {
            const std::size_t close = completion.find("```", header_end + 1);
            return trim_newlines(completion.substr(
                header_end + 1, close == std::string_view::npos ? std::string_view::npos : close - header_end - 1));
        }
    }
    return std::string(completion);
}

JudgeVerdict judge(std::string_view solution, const Task& task, Runner& runner) {
    std::string program(solution);
    program += '\n';
    program += task.test_script;
    const RunVerdict v = runner.run(program);
    JudgeVerdict out;
    out.passed = v.status == RunStatus::Ok;
    if (!out.passed) out.error_kind = classify(v);
    return out;
}

std::size_t context_token_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            in_word = false;
        } else if (std::isalnum(c) || c == '_' || c >= 0x80) {
            if (!in_word) ++count;
            in_word = true;
        } else {
            ++count;
            in_word = false;
        }
    }
    return count;
}

namespace {

struct Generated {
    bool ok = false;
    std::string completion;
};

Generated generate_with_retries(Generator& generator, const std::string& prompt, std::size_t retries) {
    for (std::size_t attempt = 0;; ++attempt) {
        try {
            return {true, generator.generate(prompt)};
        } catch (const Error& e) {
            if (e.code() != ErrorCode::GeneratorError) throw;
            if (attempt >= retries) return {};
        }
    }
}

TaskOutcome evaluate_task(const Task& task, const Retriever* retriever, const std::vector<Approach>& approaches,
                          const TemplateRegistry& templates, Generator& generator, Runner& runner, Embedder& embedder,
                          const SuiteOptions& options) {
    TaskOutcome out;
    out.task_id = task.task_id;
    out.topic = task.topic;
    std::vector<Candidate> candidates;
    for (const Approach& a : approaches) {
        Attempt at;
        std::string prompt;
        if (a.mode) {
            if (!retriever) throw Error(ErrorCode::InvalidConfig, "approach " + a.label + " needs a graph");
            PruneConfig cfg = retriever->options().prune;
            cfg.enabled = cfg.enabled && a.prune;
            const RetrievalResult r = retriever->retrieve(task.prompt, *a.mode, cfg);
            at.context_tokens = context_token_count(r.rendered_context + render_helpers(r.resolved_calls));
            prompt = augment(task.prompt, r, a.template_id, templates);
        } else {
            prompt = augment(task.prompt, a.template_id, templates);
        }
        const Generated g = generate_with_retries(generator, prompt, options.generator_retries);
        if (g.ok) {
            at.generated = true;
            const std::string solution = extract_code(g.completion);
            const JudgeVerdict v = judge(solution, task, runner);
            at.passed = v.passed;
            at.error_kind = v.error_kind;
            candidates.push_back({a.label, a.label, solution, {}, {}, {}, {}, {}});
        } else {
            at.error_kind = "Other";
        }
        out.attempts.push_back(std::move(at));
    }
    if (!candidates.empty()) {
        const RerankReport rr = rerank(candidates, task.prompt, runner, embedder, 1);
        out.reranked_choice = rr.chosen_id;
        out.reranked_tier = static_cast<int>(rr.tier);
        for (std::size_t i = 0; i < approaches.size(); ++i) {
            const auto it = std::find_if(rr.candidates.begin(), rr.candidates.end(),
                                         [&](const Candidate& c) { return c.id == approaches[i].label; });
            if (it == rr.candidates.end()) continue;
            out.attempts[i].syntax_ok = it->syntax_ok;
            out.attempts[i].runtime_ok = it->runtime_ok;
            if (it->id == rr.chosen_id) out.reranked_passed = out.attempts[i].passed;
        }
    }
    return out;
}

}  // namespace

EvalReport run_suite(const std::vector<Task>& tasks, const Retriever* retriever, const std::vector<Approach>& approaches,
                     const TemplateRegistry& templates, Generator& generator, Runner& runner, Embedder& embedder,
                     const SuiteOptions& options) {
    if (tasks.empty()) throw Error(ErrorCode::InvalidConfig, "task suite is empty");
    if (approaches.empty()) throw Error(ErrorCode::InvalidConfig, "approaches: none given");
    std::set<std::string> labels;
    for (const Approach& a : approaches) {
        if (!labels.insert(a.label).second) throw Error(ErrorCode::InvalidConfig, "approaches: duplicate " + a.label);
        templates.get(a.template_id);
    }

    EvalReport report;
    for (const Approach& a : approaches) report.approaches.push_back(a.label);
    std::vector<TaskOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                outcomes[i] = evaluate_task(tasks[i], retriever, approaches, templates, generator, runner, embedder, options);
            } catch (...) {
                const std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(options.workers, tasks.size()));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::sort(outcomes.begin(), outcomes.end(),
              [](const TaskOutcome& a, const TaskOutcome& b) { return a.task_id < b.task_id; });
    report.tasks = std::move(outcomes);
    summarize(report);
    report.metadata["token_count_rule"] = "whitespace runs split at punctuation; approximate";
    report.metadata["embedder"] = embedder.id();
    report.metadata["tasks"] = tasks.size();
    return report;
}

}  // namespace pkgraph
