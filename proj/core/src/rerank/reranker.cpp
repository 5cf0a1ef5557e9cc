// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/rerank/reranker.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "pkgraph/embed/embedding.hpp"
#include "pkgraph/error.hpp"
#include "pkgraph/python/ast.hpp"

namespace pkgraph {

void syntax_filter(std::vector<Candidate>& candidates) {
    for (Candidate& c : candidates) {
        const std::optional<python::SyntaxIssue> issue = python::check_syntax(c.source);
        c.syntax_ok = !issue.has_value();
        if (issue) {
            c.syntax_error = issue->kind == python::SyntaxErrorKind::Syntax ? "SyntaxError"
                             : issue->kind == python::SyntaxErrorKind::Indentation ? "IndentationError"
                                                                                   : "TabError";
        } else {
            c.syntax_error.reset();
        }
    }
}

void runtime_filter(std::vector<Candidate>& candidates, Runner& runner, std::size_t workers) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Candidate& c = candidates[i];
        c.runtime_ok.reset();
        c.runtime_error_kind.reset();
        if (c.syntax_ok.value_or(false)) todo.push_back(i);
    }
    std::vector<std::optional<RunVerdict>> verdicts(todo.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto work = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            try {
                verdicts[k] = runner.run(candidates[todo[k]].source);
            } catch (...) {
                const std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(workers, todo.size()));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t k = 0; k < todo.size(); ++k) {
        Candidate& c = candidates[todo[k]];
        c.runtime_ok = verdicts[k]->status == RunStatus::Ok;
        if (!*c.runtime_ok) c.runtime_error_kind = classify(*verdicts[k]);
    }
}

Selection select(std::vector<Candidate>& candidates, const Embedding& query, Embedder& embedder) {
    if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "nothing to select from");
    std::vector<std::size_t> runs;
    std::vector<std::size_t> parses;
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].similarity.reset();
        all.push_back(i);
        if (candidates[i].syntax_ok.value_or(false)) {
            parses.push_back(i);
            if (candidates[i].runtime_ok.value_or(false)) runs.push_back(i);
        }
    }
    Selection sel;
    const std::vector<std::size_t>* tier = &all;
    if (!runs.empty()) {
        tier = &runs;
        sel.tier = Tier::Runs;
    } else if (!parses.empty()) {
        tier = &parses;
        sel.tier = Tier::Parses;
    }
    std::vector<std::string> texts;
    for (std::size_t i : *tier) texts.push_back(candidates[i].source);
    const std::vector<Embedding> vectors = embedder.embed_batch(texts);
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < tier->size(); ++k) {
        Candidate& c = candidates[(*tier)[k]];
        c.similarity = similarity(query, vectors[k]);
        if (!best) {
            best = (*tier)[k];
            continue;
        }
        const Candidate& b = candidates[*best];
        if (*c.similarity > *b.similarity || (*c.similarity == *b.similarity && c.id < b.id)) best = (*tier)[k];
    }
    sel.index = *best;
    return sel;
}

RerankReport rerank(std::vector<Candidate> candidates, std::string_view query, Runner& runner, Embedder& embedder,
                    std::size_t workers) {
    if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "nothing to rerank");
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
    syntax_filter(candidates);
    runtime_filter(candidates, runner, workers);
    const Selection sel = select(candidates, embedder.embed(query), embedder);

    RerankReport report;
    report.chosen_index = sel.index;
    report.chosen_id = candidates[sel.index].id;
    report.tier = sel.tier;
    std::map<std::string, OriginStats> origins;
    for (const Candidate& c : candidates) {
        ++report.total;
        OriginStats& o = origins[c.origin];
        o.origin = c.origin;
        ++o.total;
        if (!c.syntax_ok.value_or(false)) {
            ++o.syntax_errors;
            continue;
        }
        ++report.parsed;
        if (c.runtime_ok.value_or(false)) {
            ++report.ran;
        } else {
            ++o.runtime_errors;
        }
    }
    for (auto& [_, o] : origins) {
        o.syntax_error_rate = static_cast<double>(o.syntax_errors) / static_cast<double>(o.total);
        o.runtime_error_rate = static_cast<double>(o.runtime_errors) / static_cast<double>(o.total);
        report.origins.push_back(o);
    }
    report.candidates = std::move(candidates);
    return report;
}

namespace {

template <typename T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json to_json(const Candidate& c) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["origin"] = c.origin;
    j["syntax_ok"] = opt(c.syntax_ok);
    j["syntax_error"] = opt(c.syntax_error);
    j["runtime_ok"] = opt(c.runtime_ok);
    j["runtime_error_kind"] = opt(c.runtime_error_kind);
    j["similarity"] = opt(c.similarity);
    return j;
}

nlohmann::ordered_json to_json(const RerankReport& r) {
    nlohmann::ordered_json j;
    j["chosen_id"] = r.chosen_id;
    j["tier"] = static_cast<int>(r.tier);
    j["survivors"] = {{"all", r.total}, {"syntax_ok", r.parsed}, {"runtime_ok", r.ran}};
    nlohmann::ordered_json cands = nlohmann::ordered_json::array();
    for (const Candidate& c : r.candidates) cands.push_back(to_json(c));
    j["candidates"] = std::move(cands);
    nlohmann::ordered_json origins = nlohmann::ordered_json::array();
    for (const OriginStats& o : r.origins) {
        origins.push_back({{"origin", o.origin},
                           {"total", o.total},
                           {"syntax_errors", o.syntax_errors},
                           {"runtime_errors", o.runtime_errors},
                           {"syntax_error_rate", o.syntax_error_rate},
                           {"runtime_error_rate", o.runtime_error_rate}});
    }
    j["origins"] = std::move(origins);
    return j;
}

std::vector<Candidate> load_candidates(const std::filesystem::path& dir) {
    const std::filesystem::path index = dir / "index.jsonl";
    std::ifstream in(index, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + index.string());
    std::vector<Candidate> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Candidate c;
        std::filesystem::path file;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            c.id = j.at("id").get<std::string>();
            c.origin = j.at("origin").get<std::string>();
            file = dir / j.at("path").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::CorruptRecord, "index.jsonl line " + std::to_string(lineno) + ": " + e.what());
        }
        std::ifstream src(file, std::ios::binary);
        if (!src) throw Error(ErrorCode::Io, "cannot read " + file.string());
        std::ostringstream buf;
        buf << src.rdbuf();
        c.source = buf.str();
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace pkgraph
