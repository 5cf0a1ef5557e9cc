// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/python/tokenizer.hpp"

namespace pkgraph::python {

enum class ExprKind {
    Name,
    Constant,
    JoinedStr,
    Attribute,
    Subscript,
    Slice,
    Starred,
    DoubleStarred,
    Tuple,
    List,
    Set,
    Dict,
    KeyValue,
    Call,
    Keyword,
    BinOp,
    UnaryOp,
    BoolOp,
    Compare,
    Lambda,
    IfExp,
    NamedExpr,
    Await,
    Yield,
    YieldFrom,
    ListComp,
    SetComp,
    DictComp,
    GeneratorExp,
    Comprehension,
};

/// Expression node. The tree keeps only what the analyzers consume: kinds, positions,
/// identifiers and children. `name` holds the identifier for Name, the attribute for
/// Attribute, the argument name for Keyword and the literal spelling class for Constant.
struct Expr {
    ExprKind kind = ExprKind::Name;
    std::string name;
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
    bool parenthesized = false;
    std::vector<Expr> children;
    std::vector<std::string> bound;  // lambda parameter names
};

enum class StmtKind {
    Expr,
    Assign,
    AugAssign,
    AnnAssign,
    Pass,
    Break,
    Continue,
    Return,
    Raise,
    Global,
    Nonlocal,
    Del,
    Assert,
    Import,
    ImportFrom,
    FunctionDef,
    ClassDef,
    If,
    For,
    While,
    With,
    Try,
    Match,
};

struct Stmt;
using Suite = std::vector<Stmt>;

/// Statement node. Compound statements keep every clause body in `suites` in source order
/// (an if/elif/else chain is one statement with one suite per clause).
struct Stmt {
    StmtKind kind = StmtKind::Pass;
    int line = 0;        // line of the leading keyword (def/class line for decorated defs)
    int first_line = 0;  // first decorator line, or `line`
    int col = 0;
    int end_line = 0;
    int end_col = 0;
    bool is_async = false;
    std::string name;                 // def/class name
    std::vector<Expr> exprs;          // header expressions: values, tests, decorators, bases, defaults
    std::vector<Expr> targets;        // assignment-like targets (Assign, AugAssign, AnnAssign, For, With)
    std::vector<std::string> bound;   // names bound without an Expr: params, imports, except-as, captures
    std::vector<Suite> suites;
};

struct Module {
    Suite body;
};

struct ParseOutcome {
    std::optional<Module> module;
    std::optional<SyntaxIssue> error;

    bool ok() const noexcept { return module.has_value(); }
};

/// Parses a complete module with the grammar and the parse-time checks of the reference
/// interpreter's `ast.parse` (Python 3.10). Compile-time checks such as `return` outside a
/// function are not applied.
ParseOutcome parse_module(std::string_view source);

/// Convenience wrapper: the first syntax issue, or nullopt when `source` parses.
std::optional<SyntaxIssue> check_syntax(std::string_view source);

std::string_view to_string(StmtKind kind) noexcept;

}  // namespace pkgraph::python
