// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/analyze/code_analyzer.hpp"
#include "pkgraph/model/graph.hpp"

namespace pkgraph {

/// Bodies of the markdown code fences in `text`, or the whole text when it has none.
std::vector<std::string> strip_code_fences(std::string_view text);

struct LineFailure {
    std::size_t line = 0;
    std::string message;
};

struct BuildReport {
    std::size_t records = 0;    // non-blank input lines
    std::size_t documents = 0;  // code: fenced regions analyzed; json: documents ingested
    std::size_t functions = 0;
    std::size_t blocks = 0;
    std::vector<LineFailure> skipped;  // records that could not be read at all
    std::vector<ParseDiagnostic> diagnostics;
};

/// Code corpus: JSON Lines with `instruction` and `output`; functions are extracted from the
/// fenced code in `output`. Document ids are "<file stem>:<line>" with ":<k>" appended for the
/// k-th fence when a record holds more than one.
BuildReport build_code_graph(const std::filesystem::path& corpus, Graph& builder);

/// JSON corpus: one JSON object per line, document id "<file stem>:<line>".
BuildReport build_json_graph(const std::filesystem::path& corpus, Graph& builder);

}  // namespace pkgraph
