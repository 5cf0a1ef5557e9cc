// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

enum class Construct { If, For, While, With, Try };

std::string_view to_string(Construct c) noexcept;

struct BlockRecord {
    Construct construct = Construct::If;
    std::string source;  // whole lines, indentation as in the function source
    Span span;           // file lines
    std::optional<std::size_t> parent;
};

struct FunctionRecord {
    std::string name;
    std::string source;  // decorators through the last body line, dedented to column 0
    std::vector<BlockRecord> blocks;
    std::string doc_id;
    Span span;
};

struct ParseDiagnostic {
    std::string doc_id;
    int line = 0;
    std::string message;
};

struct ExtractResult {
    std::vector<FunctionRecord> functions;
    std::vector<ParseDiagnostic> diagnostics;
};

/// Module-level and class-level function definitions with their blocks already filled in.
/// When the whole text does not parse, each top-level chunk is tried on its own.
ExtractResult extract_functions(std::string_view source, std::string_view doc_id);

/// Re-derives the blocks of `fn` from its source. Throws ParseFailure if the source no longer
/// parses as a single function definition.
std::vector<BlockRecord> extract_blocks(const FunctionRecord& fn);

struct EmittedFunction {
    NodeId name_id = 0;
    NodeId impl_id = 0;
    std::vector<NodeId> block_ids;  // parallel to FunctionRecord::blocks
};

std::vector<EmittedFunction> emit_graph(const std::vector<FunctionRecord>& fns, Graph& builder);

}  // namespace pkgraph
