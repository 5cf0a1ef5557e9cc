// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/analyze/code_analyzer.hpp"

#include <algorithm>
#include <cctype>

#include "pkgraph/error.hpp"
#include "pkgraph/python/ast.hpp"

namespace pkgraph {

namespace py = python;

std::string_view to_string(Construct c) noexcept {
    switch (c) {
    case Construct::If: return "if";
    case Construct::For: return "for";
    case Construct::While: return "while";
    case Construct::With: return "with";
    case Construct::Try: return "try";
    }
    return "if";
}

namespace {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        pos = nl + 1;
    }
    return lines;
}

std::optional<Construct> construct_of(py::StmtKind kind) {
    switch (kind) {
    case py::StmtKind::If: return Construct::If;
    case py::StmtKind::For: return Construct::For;
    case py::StmtKind::While: return Construct::While;
    case py::StmtKind::With: return Construct::With;
    case py::StmtKind::Try: return Construct::Try;
    default: return std::nullopt;
    }
}

// Lines [first, last] (1-based into `lines`), each LF-terminated, with up to `strip` leading
// whitespace bytes removed.
std::string join_lines(const std::vector<std::string>& lines, int first, int last, int strip) {
    std::string out;
    for (int l = first; l <= last; ++l) {
        const std::string& s = lines[static_cast<std::size_t>(l - 1)];
        std::size_t k = 0;
        while (k < s.size() && static_cast<int>(k) < strip && (s[k] == ' ' || s[k] == '\t' || s[k] == '\f')) ++k;
        out.append(s, k);
        out.push_back('\n');
    }
    return out;
}

struct BlockWalker {
    const std::vector<std::string>& fn_lines;  // dedented function source
    int fn_first_line;                         // file line of fn_lines[0]
    int shift;                                 // statement line + shift = file line
    std::vector<BlockRecord>& out;

    void walk(const py::Suite& suite, std::optional<std::size_t> parent) {
        for (const py::Stmt& s : suite) {
            std::optional<std::size_t> inner = parent;
            if (const auto c = construct_of(s.kind)) {
                BlockRecord b;
                b.construct = *c;
                b.span = Span{s.line + shift, s.end_line + shift};
                b.source = join_lines(fn_lines, b.span.start - fn_first_line + 1, b.span.end - fn_first_line + 1, 0);
                b.parent = parent;
                out.push_back(std::move(b));
                inner = out.size() - 1;
            }
            for (const py::Suite& body : s.suites) walk(body, inner);
        }
    }
};

void collect_functions(const py::Suite& suite, const std::vector<std::string>& lines, int shift,
                       std::string_view doc_id, std::vector<FunctionRecord>& out) {
    for (const py::Stmt& s : suite) {
        if (s.kind == py::StmtKind::ClassDef) {
            for (const py::Suite& body : s.suites) collect_functions(body, lines, shift, doc_id, out);
            continue;
        }
        if (s.kind != py::StmtKind::FunctionDef) continue;
        FunctionRecord fn;
        fn.name = s.name;
        fn.doc_id = std::string(doc_id);
        fn.span = Span{s.first_line + shift, s.end_line + shift};
        // Strip the indentation of the header line; s.col points past "async" for coroutines.
        const std::string& head = lines[static_cast<std::size_t>(s.first_line - 1)];
        const int indent = static_cast<int>(std::min(head.find_first_not_of(" \t\f"), head.size()));
        fn.source = join_lines(lines, s.first_line, s.end_line, indent);
        const std::vector<std::string> fn_lines = split_lines(fn.source);
        BlockWalker walker{fn_lines, fn.span.start, shift, fn.blocks};
        for (const py::Suite& body : s.suites) walker.walk(body, std::nullopt);
        out.push_back(std::move(fn));
    }
}

bool is_clause_continuation(std::string_view line) {
    for (std::string_view kw : {"else", "elif", "except", "finally"}) {
        if (line.substr(0, kw.size()) != kw) continue;
        if (line.size() == kw.size()) return true;
        const unsigned char next = static_cast<unsigned char>(line[kw.size()]);
        if (!std::isalnum(next) && next != '_') return true;
    }
    return false;
}

// Splits at column-0 statement starts. Decorators stay with the definition they decorate.
std::vector<std::pair<int, int>> top_level_chunks(const std::vector<std::string>& lines) {
    std::vector<std::pair<int, int>> chunks;
    bool only_decorators = false;
    for (int l = 1; l <= static_cast<int>(lines.size()); ++l) {
        const std::string& s = lines[static_cast<std::size_t>(l - 1)];
        const bool starts = !s.empty() && s[0] != ' ' && s[0] != '\t' && s[0] != '\f' && s[0] != '#' && s[0] != ')' &&
                            s[0] != ']' && s[0] != '}' && !is_clause_continuation(s);
        if (starts && !(only_decorators && !chunks.empty())) {
            chunks.emplace_back(l, l);
            only_decorators = s[0] == '@';
        } else if (starts) {
            only_decorators = s[0] == '@';
        }
        if (!chunks.empty()) chunks.back().second = l;
    }
    return chunks;
}

}  // namespace

ExtractResult extract_functions(std::string_view source, std::string_view doc_id) {
    ExtractResult result;
    const std::vector<std::string> lines = split_lines(source);
    py::ParseOutcome whole = py::parse_module(source);
    if (whole.ok()) {
        collect_functions(whole.module->body, lines, 0, doc_id, result.functions);
        return result;
    }
    for (const auto& [first, last] : top_level_chunks(lines)) {
        const std::string chunk = join_lines(lines, first, last, 0);
        const std::vector<std::string> chunk_lines = split_lines(chunk);
        py::ParseOutcome part = py::parse_module(chunk);
        if (part.ok()) {
            collect_functions(part.module->body, chunk_lines, first - 1, doc_id, result.functions);
        } else {
            result.diagnostics.push_back({std::string(doc_id), part.error->line + first - 1, part.error->message});
        }
    }
    if (result.diagnostics.empty()) {
        // Chunks parsed individually but not together; report the original failure.
        result.diagnostics.push_back({std::string(doc_id), whole.error->line, whole.error->message});
    }
    return result;
}

std::vector<BlockRecord> extract_blocks(const FunctionRecord& fn) {
    py::ParseOutcome parsed = py::parse_module(fn.source);
    if (!parsed.ok()) {
        throw Error(ErrorCode::ParseFailure, fn.doc_id + ": function " + fn.name + " line " +
                                                 std::to_string(parsed.error->line) + ": " + parsed.error->message);
    }
    const py::Suite& body = parsed.module->body;
    if (body.size() != 1 || body[0].kind != py::StmtKind::FunctionDef) {
        throw Error(ErrorCode::ParseFailure, fn.doc_id + ": source of " + fn.name + " is not a single function");
    }
    std::vector<BlockRecord> blocks;
    const std::vector<std::string> fn_lines = split_lines(fn.source);
    BlockWalker walker{fn_lines, fn.span.start, fn.span.start - 1, blocks};
    for (const py::Suite& suite : body[0].suites) walker.walk(suite, std::nullopt);
    return blocks;
}

std::vector<EmittedFunction> emit_graph(const std::vector<FunctionRecord>& fns, Graph& builder) {
    std::vector<EmittedFunction> emitted;
    emitted.reserve(fns.size());
    for (const FunctionRecord& fn : fns) {
        EmittedFunction e;
        PkgNode name;
        name.kind = NodeKind::FunctionName;
        name.content = fn.name;
        name.doc_id = fn.doc_id;
        e.name_id = builder.add_node(std::move(name));

        PkgNode impl;
        impl.kind = NodeKind::FunctionImpl;
        impl.content = fn.source;
        impl.doc_id = fn.doc_id;
        impl.function_id = e.name_id;
        impl.span = fn.span;
        e.impl_id = builder.add_node(std::move(impl));
        builder.add_edge({e.name_id, e.impl_id, EdgeKind::NameToImpl});

        for (const BlockRecord& b : fn.blocks) {
            PkgNode block;
            block.kind = NodeKind::CodeBlock;
            block.content = b.source;
            block.doc_id = fn.doc_id;
            block.function_id = e.name_id;
            block.span = b.span;
            const NodeId id = builder.add_node(std::move(block));
            if (b.parent) {
                builder.add_edge({e.block_ids[*b.parent], id, EdgeKind::BlockToBlock});
            } else {
                builder.add_edge({e.impl_id, id, EdgeKind::ImplToBlock});
            }
            e.block_ids.push_back(id);
        }
        emitted.push_back(std::move(e));
    }
    return emitted;
}

}  // namespace pkgraph
