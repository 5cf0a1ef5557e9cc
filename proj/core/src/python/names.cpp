// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/python/names.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace pkgraph::python {

namespace {

// Sorted for binary search.
constexpr auto kBuiltins = std::to_array<std::string_view>({
    "__import__", "abs", "aiter", "all", "anext", "any", "ascii", "bin", "bool", "breakpoint",
    "bytearray", "bytes", "callable", "chr", "classmethod", "compile", "complex", "copyright",
    "credits", "delattr", "dict", "dir", "divmod", "enumerate", "eval", "exec", "exit", "filter",
    "float", "format", "frozenset", "getattr", "globals", "hasattr", "hash", "help", "hex", "id",
    "input", "int", "isinstance", "issubclass", "iter", "len", "license", "list", "locals", "map",
    "max", "memoryview", "min", "next", "object", "oct", "open", "ord", "pow", "print", "property",
    "quit", "range", "repr", "reversed", "round", "set", "setattr", "slice", "sorted",
    "staticmethod", "str", "sum", "super", "tuple", "type", "vars", "zip",
});

class Collector {
public:
    NameUsage usage;

    void suite(const Suite& body) {
        for (const Stmt& s : body) stmt(s);
    }

private:
    std::set<std::string> seen_calls_;

    void bind_target(const Expr& e) {
        switch (e.kind) {
        case ExprKind::Name: usage.defined.insert(e.name); break;
        case ExprKind::Starred:
        case ExprKind::Tuple:
        case ExprKind::List:
            for (const Expr& c : e.children) bind_target(c);
            break;
        default: expr(e); break;
        }
    }

    void stmt(const Stmt& s) {
        if (s.kind == StmtKind::FunctionDef || s.kind == StmtKind::ClassDef) usage.defined.insert(s.name);
        if (s.kind != StmtKind::Global && s.kind != StmtKind::Nonlocal) {
            for (const std::string& b : s.bound) usage.defined.insert(b);
        }
        for (const Expr& e : s.exprs) expr(e);
        for (const Expr& t : s.targets) {
            if (s.kind == StmtKind::AugAssign || s.kind == StmtKind::Del) {
                expr(t);
            } else {
                bind_target(t);
            }
        }
        for (const Suite& body : s.suites) suite(body);
    }

    void expr(const Expr& e) {
        switch (e.kind) {
        case ExprKind::Call: {
            const Expr& fn = e.children.front();
            if (fn.kind == ExprKind::Name && seen_calls_.insert(fn.name).second) usage.called.push_back(fn.name);
            break;
        }
        case ExprKind::NamedExpr: usage.defined.insert(e.children.front().name); break;
        case ExprKind::Lambda:
            for (const std::string& b : e.bound) usage.defined.insert(b);
            break;
        case ExprKind::Comprehension: bind_target(e.children.front()); break;
        default: break;
        }
        for (const Expr& c : e.children) expr(c);
    }
};

}  // namespace

NameUsage collect_names(const Module& module) {
    Collector c;
    c.suite(module.body);
    return std::move(c.usage);
}

namespace {

void scan_tokens(const std::vector<Token>& toks, NameUsage& usage, std::set<std::string>& seen) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.type != TokenType::Name || is_keyword(t.text)) continue;
        const Token* prev = i > 0 ? &toks[i - 1] : nullptr;
        const Token* next = i + 1 < toks.size() ? &toks[i + 1] : nullptr;
        if (prev && prev->type == TokenType::Name && (prev->text == "def" || prev->text == "class")) {
            usage.defined.emplace(t.text);
            continue;
        }
        if (prev && prev->type == TokenType::Op && prev->text == ".") continue;
        if (next && next->type == TokenType::Op) {
            if (next->text == "(") {
                std::string name(t.text);
                if (seen.insert(name).second) usage.called.push_back(std::move(name));
            } else if (next->text == "=" || next->text == ":=") {
                usage.defined.emplace(t.text);
            }
        }
    }
}

}  // namespace

// Fragments rarely tokenize cleanly. After a lexical error the rest is rescanned with the
// indentation dropped, so names past a bad dedent or an open bracket are still seen.
NameUsage scan_names(std::string_view source) {
    NameUsage usage;
    std::set<std::string> seen;
    std::string rest(source);
    while (!rest.empty()) {
        const TokenStream ts = tokenize(rest);
        scan_tokens(ts.tokens, usage, seen);
        if (!ts.error) break;
        // Restart at the failing line; if that line itself cannot be lexed, skip past it.
        std::size_t pos = 0;
        for (int l = 1; l < ts.error->line && pos < rest.size(); ++l) pos = std::min(rest.find('\n', pos), rest.size()) + 1;
        if (pos >= rest.size()) break;
        std::string next;
        std::size_t at = pos;
        while (at < rest.size()) {
            const std::size_t eol = std::min(rest.find('\n', at), rest.size());
            const std::size_t text = std::min(rest.find_first_not_of(" \t\f", at), eol);
            next.append(rest, text, eol - text);
            next.push_back('\n');
            at = eol + 1;
        }
        if (next == rest) {
            const std::size_t eol = next.find('\n');
            next = eol == std::string::npos ? std::string() : next.substr(eol + 1);
        }
        rest = std::move(next);
    }
    return usage;
}

bool is_builtin_function(std::string_view name) noexcept {
    return std::binary_search(kBuiltins.begin(), kBuiltins.end(), name);
}

}  // namespace pkgraph::python
