// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/analyze/corpus.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "pkgraph/analyze/json_analyzer.hpp"
#include "pkgraph/error.hpp"

namespace pkgraph {

namespace {

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

template <typename Fn>
void for_each_record(const std::filesystem::path& path, BuildReport& report, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        ++report.records;
        fn(line, lineno);
    }
}

}  // namespace

std::vector<std::string> strip_code_fences(std::string_view text) {
    std::vector<std::string> bodies;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        const std::size_t header_end = text.find('\n', open);
        if (header_end == std::string_view::npos) break;
        std::size_t close = text.find("```", header_end + 1);
        if (close == std::string_view::npos) close = text.size();
        std::string body(text.substr(header_end + 1, close - header_end - 1));
        // Drop whatever precedes the closing fence on its own line.
        if (const std::size_t last_nl = body.find_last_of('\n'); last_nl != std::string::npos) {
            if (is_blank(std::string_view(body).substr(last_nl + 1))) body.resize(last_nl + 1);
        }
        bodies.push_back(std::move(body));
        if (close == text.size()) break;
        pos = close + 3;
    }
    if (bodies.empty()) bodies.emplace_back(text);
    return bodies;
}

BuildReport build_code_graph(const std::filesystem::path& corpus, Graph& builder) {
    BuildReport report;
    const std::string stem = corpus.stem().string();
    for_each_record(corpus, report, [&](const std::string& line, std::size_t lineno) {
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            report.skipped.push_back({lineno, e.what()});
            return;
        }
        if (!record.is_object() || !record.contains("output") || !record["output"].is_string()) {
            report.skipped.push_back({lineno, "record has no string field 'output'"});
            return;
        }
        const std::vector<std::string> bodies = strip_code_fences(record["output"].get<std::string>());
        for (std::size_t k = 0; k < bodies.size(); ++k) {
            std::string doc_id = stem + ":" + std::to_string(lineno);
            if (bodies.size() > 1) doc_id += ":" + std::to_string(k);
            ExtractResult extracted = extract_functions(bodies[k], doc_id);
            ++report.documents;
            report.functions += extracted.functions.size();
            for (const FunctionRecord& fn : extracted.functions) report.blocks += fn.blocks.size();
            emit_graph(extracted.functions, builder);
            for (ParseDiagnostic& d : extracted.diagnostics) report.diagnostics.push_back(std::move(d));
        }
    });
    return report;
}

BuildReport build_json_graph(const std::filesystem::path& corpus, Graph& builder) {
    BuildReport report;
    const std::string stem = corpus.stem().string();
    for_each_record(corpus, report, [&](const std::string& line, std::size_t lineno) {
        try {
            json_to_graph(line, stem + ":" + std::to_string(lineno), builder);
            ++report.documents;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ParseFailure && e.code() != ErrorCode::NotAnObject) throw;
            report.skipped.push_back({lineno, e.what()});
        }
    });
    return report;
}

}  // namespace pkgraph
