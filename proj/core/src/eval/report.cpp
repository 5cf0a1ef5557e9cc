// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/eval/report.hpp"

#include <cstdio>
#include <map>

namespace pkgraph {

std::string_view histogram_class(std::string_view kind) noexcept {
    for (std::string_view c : kHistogramClasses) {
        if (c == kind) return c;
    }
    return "Other";
}

namespace {

std::size_t class_index(std::string_view kind) {
    const std::string_view c = histogram_class(kind);
    for (std::size_t i = 0; i < kHistogramClasses.size(); ++i) {
        if (kHistogramClasses[i] == c) return i;
    }
    return kHistogramClasses.size() - 1;
}

bool ideal(const TaskOutcome& t) {
    for (const Attempt& a : t.attempts) {
        if (a.passed) return true;
    }
    return false;
}

double frac(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void summarize(EvalReport& report) {
    const std::size_t n = report.tasks.size();
    report.summaries.clear();
    for (std::size_t a = 0; a < report.approaches.size(); ++a) {
        ApproachSummary s;
        s.label = report.approaches[a];
        std::size_t passed = 0;
        std::size_t syntax_errors = 0;
        std::size_t runtime_errors = 0;
        std::size_t tokens = 0;
        for (const TaskOutcome& t : report.tasks) {
            const Attempt& at = t.attempts[a];
            tokens += at.context_tokens;
            if (at.passed) {
                ++passed;
            } else {
                ++s.error_histogram[at.generated ? class_index(at.error_kind.value_or("Other")) : class_index("Other")];
            }
            if (at.syntax_ok && !*at.syntax_ok) ++syntax_errors;
            if (at.runtime_ok && !*at.runtime_ok) ++runtime_errors;
        }
        s.pass_at_1 = frac(passed, n);
        s.syntax_error_rate = frac(syntax_errors, n);
        s.runtime_error_rate = frac(runtime_errors, n);
        s.avg_context_tokens = n == 0 ? 0.0 : static_cast<double>(tokens) / static_cast<double>(n);
        report.summaries.push_back(s);
    }
    std::size_t reranked = 0;
    std::size_t best = 0;
    std::map<std::string, std::vector<const TaskOutcome*>> by_topic;
    for (const TaskOutcome& t : report.tasks) {
        reranked += t.reranked_passed ? 1 : 0;
        best += ideal(t) ? 1 : 0;
        if (t.topic) by_topic[*t.topic].push_back(&t);
    }
    report.reranked_pass_at_1 = frac(reranked, n);
    report.ideal_rerank_pass_at_1 = frac(best, n);
    report.topics.clear();
    for (const auto& [topic, tasks] : by_topic) {
        TopicSummary ts;
        ts.topic = topic;
        ts.tasks = tasks.size();
        for (std::size_t a = 0; a < report.approaches.size(); ++a) {
            std::size_t p = 0;
            for (const TaskOutcome* t : tasks) p += t->attempts[a].passed ? 1 : 0;
            ts.pass_at_1.push_back(frac(p, tasks.size()));
        }
        std::size_t r = 0;
        std::size_t i = 0;
        for (const TaskOutcome* t : tasks) {
            r += t->reranked_passed ? 1 : 0;
            i += ideal(*t) ? 1 : 0;
        }
        ts.reranked_pass_at_1 = frac(r, tasks.size());
        ts.ideal_rerank_pass_at_1 = frac(i, tasks.size());
        report.topics.push_back(std::move(ts));
    }
}

nlohmann::ordered_json to_json(const EvalReport& report) {
    using oj = nlohmann::ordered_json;
    oj j;
    j["approaches"] = report.approaches;
    oj pass = oj::object();
    for (const ApproachSummary& s : report.summaries) pass[s.label] = s.pass_at_1;
    j["pass_at_1"] = std::move(pass);
    j["reranked_pass_at_1"] = report.reranked_pass_at_1;
    j["ideal_rerank_pass_at_1"] = report.ideal_rerank_pass_at_1;

    oj matrix = oj::array();
    for (const TaskOutcome& t : report.tasks) {
        oj row;
        row["task_id"] = t.task_id;
        row["topic"] = t.topic ? oj(*t.topic) : oj(nullptr);
        oj results = oj::object();
        for (std::size_t a = 0; a < report.approaches.size(); ++a) {
            const Attempt& at = t.attempts[a];
            results[report.approaches[a]] = {{"passed", at.passed},
                                             {"generated", at.generated},
                                             {"error_kind", at.error_kind ? oj(*at.error_kind) : oj(nullptr)},
                                             {"syntax_ok", at.syntax_ok ? oj(*at.syntax_ok) : oj(nullptr)},
                                             {"runtime_ok", at.runtime_ok ? oj(*at.runtime_ok) : oj(nullptr)},
                                             {"context_tokens", at.context_tokens}};
        }
        row["results"] = std::move(results);
        row["reranked"] = {{"choice", t.reranked_choice ? oj(*t.reranked_choice) : oj(nullptr)},
                           {"tier", t.reranked_tier},
                           {"passed", t.reranked_passed}};
        row["ideal"] = ideal(t);
        matrix.push_back(std::move(row));
    }
    j["pass_matrix"] = std::move(matrix);

    oj hist = oj::object();
    oj stages = oj::object();
    oj tokens = oj::object();
    for (const ApproachSummary& s : report.summaries) {
        oj h = oj::object();
        for (std::size_t i = 0; i < kHistogramClasses.size(); ++i) h[std::string(kHistogramClasses[i])] = s.error_histogram[i];
        hist[s.label] = std::move(h);
        stages[s.label] = {{"syntax_error_rate", s.syntax_error_rate}, {"runtime_error_rate", s.runtime_error_rate}};
        tokens[s.label] = s.avg_context_tokens;
    }
    j["error_histogram"] = std::move(hist);
    j["stage_error_rates"] = std::move(stages);
    j["avg_context_tokens"] = std::move(tokens);

    oj topics = oj::array();
    for (const TopicSummary& ts : report.topics) {
        oj p = oj::object();
        for (std::size_t a = 0; a < report.approaches.size(); ++a) p[report.approaches[a]] = ts.pass_at_1[a];
        topics.push_back({{"topic", ts.topic},
                          {"tasks", ts.tasks},
                          {"pass_at_1", std::move(p)},
                          {"reranked_pass_at_1", ts.reranked_pass_at_1},
                          {"ideal_rerank_pass_at_1", ts.ideal_rerank_pass_at_1}});
    }
    j["topics"] = std::move(topics);
    j["metadata"] = report.metadata;
    return j;
}

std::string pass_matrix_csv(const EvalReport& report) {
    std::string out = "task_id";
    for (const std::string& a : report.approaches) out += "," + a;
    out += ",reranked,ideal\n";
    for (const TaskOutcome& t : report.tasks) {
        out += t.task_id;
        for (const Attempt& a : t.attempts) out += a.passed ? ",1" : ",0";
        out += t.reranked_passed ? ",1" : ",0";
        out += ideal(t) ? ",1\n" : ",0\n";
    }
    return out;
}

std::string summary_table(const EvalReport& report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %8s %10s\n", "approach", "pass@1", "ctx tokens");
    out += buf;
    for (const ApproachSummary& s : report.summaries) {
        std::snprintf(buf, sizeof buf, "%-24s %8.3f %10.1f\n", s.label.c_str(), s.pass_at_1, s.avg_context_tokens);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-24s %8.3f\n", "reranked", report.reranked_pass_at_1);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-24s %8.3f\n", "ideal reranker", report.ideal_rerank_pass_at_1);
    out += buf;
    return out;
}

}  // namespace pkgraph
