// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/python/ast.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

namespace pkgraph::python {

std::string_view to_string(StmtKind kind) noexcept {
    switch (kind) {
    case StmtKind::Expr: return "Expr";
    case StmtKind::Assign: return "Assign";
    case StmtKind::AugAssign: return "AugAssign";
    case StmtKind::AnnAssign: return "AnnAssign";
    case StmtKind::Pass: return "Pass";
    case StmtKind::Break: return "Break";
    case StmtKind::Continue: return "Continue";
    case StmtKind::Return: return "Return";
    case StmtKind::Raise: return "Raise";
    case StmtKind::Global: return "Global";
    case StmtKind::Nonlocal: return "Nonlocal";
    case StmtKind::Del: return "Del";
    case StmtKind::Assert: return "Assert";
    case StmtKind::Import: return "Import";
    case StmtKind::ImportFrom: return "ImportFrom";
    case StmtKind::FunctionDef: return "FunctionDef";
    case StmtKind::ClassDef: return "ClassDef";
    case StmtKind::If: return "If";
    case StmtKind::For: return "For";
    case StmtKind::While: return "While";
    case StmtKind::With: return "With";
    case StmtKind::Try: return "Try";
    case StmtKind::Match: return "Match";
    }
    return "Stmt";
}

namespace {

struct ParseError {
    SyntaxIssue issue;
    bool lexical = false;
};

constexpr std::array<std::string_view, 13> kAugOps = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                                      "&=", "|=", "^=", ">>=", "<<=", "**="};

enum class TargetCtx { Store, Del };

bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

class Parser {
public:
    explicit Parser(TokenStream stream)
        : toks_(std::move(stream.tokens)),
          lex_error_(std::move(stream.error)),
          lex_preempts_(stream.error_preempts) {
        levels_.reserve(toks_.size());
        int level = 0;
        for (const Token& t : toks_) {
            if (t.type == TokenType::Op && (t.text == "(" || t.text == "[" || t.text == "{")) ++level;
            if (t.type == TokenType::Op && (t.text == ")" || t.text == "]" || t.text == "}") && level > 0) --level;
            levels_.push_back(level);
        }
    }

    // A grammar error yields to a lexical error further down the file, the way the reference
    // parser re-tokenizes the remaining source before reporting.
    SyntaxIssue resolve(const ParseError& err) const {
        if (err.lexical || !lex_error_) return err.issue;
        if (err.issue.message == "unexpected indent") return err.issue;
        if (lex_preempts_) return *lex_error_;
        if (lex_error_->message.ends_with("was never closed") && toks_[max_seen_].line > lex_error_->line) {
            return *lex_error_;
        }
        return err.issue;
    }

    Module parse_file() {
        Module m;
        while (peek().type != TokenType::EndMarker) {
            if (peek().type == TokenType::Newline) {
                take();
                continue;
            }
            parse_statement(m.body);
        }
        return m;
    }

    // Body of an f-string replacement field, already wrapped in parentheses.
    Expr parse_wrapped_expression() {
        Expr e = parse_atom();
        if (peek().type != TokenType::Newline) invalid_syntax();
        take();
        if (peek().type != TokenType::EndMarker) invalid_syntax();
        return e;
    }

private:
    std::vector<Token> toks_;
    std::optional<SyntaxIssue> lex_error_;
    bool lex_preempts_ = false;
    mutable std::size_t max_seen_ = 0;
    std::vector<int> levels_;  // bracket depth after each token
    int probing_ = 0;          // >0 while checking for a missing comma
    std::size_t i_ = 0;
    int last_line_ = 0;
    int last_col_ = 0;

    struct Snapshot {
        std::size_t i;
        int line;
        int col;
    };
    Snapshot snapshot() const { return {i_, last_line_, last_col_}; }
    void restore(const Snapshot& s) {
        i_ = s.i;
        last_line_ = s.line;
        last_col_ = s.col;
    }

    // ---- token access -------------------------------------------------------------------

    const Token& peek(std::size_t k = 0) const {
        const std::size_t j = std::min(i_ + k, toks_.size() - 1);
        max_seen_ = std::max(max_seen_, j);
        const Token& t = toks_[j];
        if (k == 0 && t.type == TokenType::Error) throw ParseError{*lex_error_, true};
        return t;
    }

    Token take() {
        const Token t = peek();
        if (t.type != TokenType::EndMarker) ++i_;
        if (t.type == TokenType::Name || t.type == TokenType::Number || t.type == TokenType::String ||
            t.type == TokenType::Op) {
            last_line_ = t.end_line;
            last_col_ = t.end_col;
        }
        return t;
    }

    static bool is_op(const Token& t, std::string_view s) { return t.type == TokenType::Op && t.text == s; }
    static bool is_kw(const Token& t, std::string_view s) { return t.type == TokenType::Name && t.text == s; }
    static bool is_plain_name(const Token& t) { return t.type == TokenType::Name && !is_keyword(t.text); }
    bool at_op(std::string_view s) const { return is_op(peek(), s); }
    bool at_kw(std::string_view s) const { return is_kw(peek(), s); }

    [[noreturn]] void error_at(const Token& t, std::string msg,
                               SyntaxErrorKind kind = SyntaxErrorKind::Syntax) const {
        throw ParseError{SyntaxIssue{kind, std::move(msg), t.line, t.col}};
    }
    [[noreturn]] void error_at(const Expr& e, std::string msg) const {
        throw ParseError{SyntaxIssue{SyntaxErrorKind::Syntax, std::move(msg), e.line, e.col}};
    }
    [[noreturn]] void invalid_syntax() const { error_at(peek(), "invalid syntax"); }

    void expect_op(std::string_view s) {
        if (!at_op(s)) invalid_syntax();
        take();
    }
    void expect_kw(std::string_view s) {
        if (!at_kw(s)) invalid_syntax();
        take();
    }
    std::string expect_name() {
        if (!is_plain_name(peek())) invalid_syntax();
        return std::string(take().text);
    }

    static bool starts_expression(const Token& t) {
        switch (t.type) {
        case TokenType::Number:
        case TokenType::String: return true;
        case TokenType::Name:
            if (!is_keyword(t.text)) return true;
            return t.text == "None" || t.text == "True" || t.text == "False" || t.text == "not" ||
                   t.text == "lambda" || t.text == "await";
        case TokenType::Op:
            return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                   t.text == "~" || t.text == "..." || t.text == "*";
        default: return false;
        }
    }

    Expr start_expr(ExprKind kind, const Token& t) const {
        Expr e;
        e.kind = kind;
        e.line = t.line;
        e.col = t.col;
        return e;
    }
    Expr start_expr(ExprKind kind, const Expr& first) const {
        Expr e;
        e.kind = kind;
        e.line = first.line;
        e.col = first.col;
        return e;
    }
    void finish(Expr& e) const {
        e.end_line = last_line_;
        e.end_col = last_col_;
    }
    Stmt start_stmt(StmtKind kind, const Token& t) const {
        Stmt s;
        s.kind = kind;
        s.line = s.first_line = t.line;
        s.col = t.col;
        return s;
    }
    void finish(Stmt& s) const {
        s.end_line = last_line_;
        s.end_col = last_col_;
    }

    // ---- statements ---------------------------------------------------------------------

    void parse_statement(Suite& out) {
        const Token& t = peek();
        if (t.type == TokenType::Indent) error_at(t, "unexpected indent", SyntaxErrorKind::Indentation);
        if (t.type == TokenType::Name) {
            const std::string_view w = t.text;
            if (w == "def") {
                out.push_back(parse_funcdef({}, t.line, false));
                return;
            }
            if (w == "class") {
                out.push_back(parse_classdef({}, t.line));
                return;
            }
            if (w == "if") {
                out.push_back(parse_if());
                return;
            }
            if (w == "while") {
                out.push_back(parse_while());
                return;
            }
            if (w == "for") {
                out.push_back(parse_for(false));
                return;
            }
            if (w == "try") {
                out.push_back(parse_try());
                return;
            }
            if (w == "with") {
                out.push_back(parse_with(false));
                return;
            }
            if (w == "async") {
                const Token& next = peek(1);
                if (is_kw(next, "def")) {
                    out.push_back(parse_funcdef({}, t.line, true));
                    return;
                }
                if (is_kw(next, "for")) {
                    out.push_back(parse_for(true));
                    return;
                }
                if (is_kw(next, "with")) {
                    out.push_back(parse_with(true));
                    return;
                }
                invalid_syntax();
            }
            if (w == "match") {
                if (auto m = try_match()) {
                    out.push_back(std::move(*m));
                    return;
                }
            }
        }
        if (is_op(t, "@")) {
            out.push_back(parse_decorated());
            return;
        }
        parse_simple_stmts(out);
    }

    Suite parse_block(std::string_view what, int header_line) {
        Suite body;
        if (peek().type == TokenType::Newline) {
            take();
            if (peek().type != TokenType::Indent) {
                error_at(peek(),
                         "expected an indented block after " + std::string(what) + " on line " +
                             std::to_string(header_line),
                         SyntaxErrorKind::Indentation);
            }
            take();
            while (peek().type != TokenType::Dedent && peek().type != TokenType::EndMarker) {
                parse_statement(body);
            }
            if (peek().type == TokenType::Dedent) take();
        } else {
            parse_simple_stmts(body);
        }
        return body;
    }

    void parse_simple_stmts(Suite& out) {
        out.push_back(parse_simple_stmt());
        while (at_op(";")) {
            take();
            if (peek().type == TokenType::Newline) break;
            out.push_back(parse_simple_stmt());
        }
        if (peek().type != TokenType::Newline) invalid_syntax();
        take();
    }

    Stmt parse_simple_stmt() {
        const Token t = peek();
        if (t.type == TokenType::Name) {
            const std::string_view w = t.text;
            if (w == "pass" || w == "break" || w == "continue") {
                Stmt s = start_stmt(w == "pass" ? StmtKind::Pass : w == "break" ? StmtKind::Break : StmtKind::Continue, t);
                take();
                finish(s);
                return s;
            }
            if (w == "return") {
                Stmt s = start_stmt(StmtKind::Return, t);
                take();
                if (starts_expression(peek())) s.exprs.push_back(parse_star_expressions());
                finish(s);
                return s;
            }
            if (w == "raise") {
                Stmt s = start_stmt(StmtKind::Raise, t);
                take();
                if (starts_expression(peek())) {
                    s.exprs.push_back(parse_expression());
                    if (at_kw("from")) {
                        take();
                        s.exprs.push_back(parse_expression());
                    }
                }
                finish(s);
                return s;
            }
            if (w == "global" || w == "nonlocal") {
                Stmt s = start_stmt(w == "global" ? StmtKind::Global : StmtKind::Nonlocal, t);
                take();
                s.bound.push_back(expect_name());
                while (at_op(",")) {
                    take();
                    s.bound.push_back(expect_name());
                }
                finish(s);
                return s;
            }
            if (w == "del") return parse_del();
            if (w == "assert") {
                Stmt s = start_stmt(StmtKind::Assert, t);
                take();
                s.exprs.push_back(parse_expression());
                if (at_op(",")) {
                    take();
                    s.exprs.push_back(parse_expression());
                }
                finish(s);
                return s;
            }
            if (w == "import") return parse_import();
            if (w == "from") return parse_from_import();
        }
        return parse_expr_stmt();
    }

    Stmt parse_del() {
        Stmt s = start_stmt(StmtKind::Del, peek());
        take();
        if (!starts_expression(peek())) invalid_syntax();
        Expr targets = parse_star_expressions();
        validate_target(targets, TargetCtx::Del);
        if (!at_op(";") && peek().type != TokenType::Newline) invalid_syntax();
        s.targets.push_back(std::move(targets));
        finish(s);
        return s;
    }

    std::string parse_dotted_name() {
        std::string name = expect_name();
        while (at_op(".")) {
            take();
            name += ".";
            name += expect_name();
        }
        return name;
    }

    Stmt parse_import() {
        Stmt s = start_stmt(StmtKind::Import, peek());
        take();
        while (true) {
            std::string dotted = parse_dotted_name();
            if (at_kw("as")) {
                take();
                s.bound.push_back(expect_name());
            } else {
                s.bound.push_back(dotted.substr(0, dotted.find('.')));
            }
            if (!at_op(",")) break;
            take();
        }
        finish(s);
        return s;
    }

    Stmt parse_from_import() {
        Stmt s = start_stmt(StmtKind::ImportFrom, peek());
        take();
        int dots = 0;
        while (at_op(".") || at_op("...")) {
            dots += static_cast<int>(take().text.size());
        }
        if (!at_kw("import")) {
            parse_dotted_name();
        } else if (dots == 0) {
            invalid_syntax();
        }
        expect_kw("import");
        if (at_op("*")) {
            take();
            finish(s);
            return s;
        }
        const bool parens = at_op("(");
        if (parens) take();
        while (true) {
            std::string name = expect_name();
            if (at_kw("as")) {
                take();
                name = expect_name();
            }
            s.bound.push_back(std::move(name));
            if (!at_op(",")) break;
            const Token comma = take();
            if (parens && at_op(")")) break;
            if (!parens && (peek().type == TokenType::Newline || at_op(";"))) {
                error_at(comma, "trailing comma not allowed without surrounding parentheses");
            }
        }
        if (parens) expect_op(")");
        finish(s);
        return s;
    }

    bool at_aug_op() const {
        const Token& t = peek();
        if (t.type != TokenType::Op) return false;
        return std::find(kAugOps.begin(), kAugOps.end(), t.text) != kAugOps.end();
    }

    Expr parse_yield_or_star_expressions() {
        if (at_kw("yield")) return parse_yield_expr();
        return parse_star_expressions();
    }

    Stmt parse_expr_stmt() {
        const Token t = peek();
        Stmt s = start_stmt(StmtKind::Expr, t);
        Expr first = parse_yield_or_star_expressions();
        if (at_op(":")) {
            check_annotation_target(first);
            take();
            s.kind = StmtKind::AnnAssign;
            s.exprs.push_back(parse_expression());
            if (at_op("=")) {
                take();
                s.exprs.push_back(parse_yield_or_star_expressions());
            }
            s.targets.push_back(std::move(first));
        } else if (at_aug_op()) {
            check_augassign_target(first);
            take();
            s.kind = StmtKind::AugAssign;
            s.exprs.push_back(parse_yield_or_star_expressions());
            s.targets.push_back(std::move(first));
        } else if (at_op("=")) {
            s.kind = StmtKind::Assign;
            std::vector<Expr> targets;
            targets.push_back(std::move(first));
            Expr value;
            while (at_op("=")) {
                take();
                Expr next = parse_yield_or_star_expressions();
                if (at_op("=")) {
                    targets.push_back(std::move(next));
                } else {
                    value = std::move(next);
                }
            }
            for (const Expr& target : targets) validate_target(target, TargetCtx::Store);
            s.targets = std::move(targets);
            s.exprs.push_back(std::move(value));
        } else {
            s.exprs.push_back(std::move(first));
        }
        finish(s);
        return s;
    }

    void check_annotation_target(const Expr& e) const {
        switch (e.kind) {
        case ExprKind::Name:
        case ExprKind::Attribute:
        case ExprKind::Subscript: return;
        case ExprKind::Tuple: error_at(e, "only single target (not tuple) can be annotated");
        case ExprKind::List: error_at(e, "only single target (not list) can be annotated");
        default: error_at(e, "illegal target for annotation");
        }
    }

    void check_augassign_target(const Expr& e) const {
        switch (e.kind) {
        case ExprKind::Name:
        case ExprKind::Attribute:
        case ExprKind::Subscript: return;
        default: error_at(e, "'" + describe(e) + "' is an illegal expression for augmented assignment");
        }
    }

    static std::string describe(const Expr& e) {
        switch (e.kind) {
        case ExprKind::Constant:
            if (e.name == "True" || e.name == "False" || e.name == "None") return e.name;
            if (e.name == "...") return "ellipsis";
            return "literal";
        case ExprKind::JoinedStr: return "f-string expression";
        case ExprKind::Tuple: return "tuple";
        case ExprKind::List: return "list";
        case ExprKind::Set: return "set display";
        case ExprKind::Dict: return "dict literal";
        case ExprKind::Call: return "function call";
        case ExprKind::Compare: return "comparison";
        case ExprKind::Lambda: return "lambda";
        case ExprKind::IfExp: return "conditional expression";
        case ExprKind::NamedExpr: return "named expression";
        case ExprKind::Await: return "await expression";
        case ExprKind::Yield:
        case ExprKind::YieldFrom: return "yield expression";
        case ExprKind::ListComp: return "list comprehension";
        case ExprKind::SetComp: return "set comprehension";
        case ExprKind::DictComp: return "dict comprehension";
        case ExprKind::GeneratorExp: return "generator expression";
        case ExprKind::Starred: return "starred";
        default: return "expression";
        }
    }

    void validate_target(const Expr& e, TargetCtx ctx) const {
        switch (e.kind) {
        case ExprKind::Name:
        case ExprKind::Attribute:
        case ExprKind::Subscript: return;
        case ExprKind::Starred:
            if (ctx == TargetCtx::Del) error_at(e, "cannot delete starred");
            validate_target(e.children.front(), ctx);
            return;
        case ExprKind::Tuple:
        case ExprKind::List:
            for (const Expr& child : e.children) validate_target(child, ctx);
            return;
        case ExprKind::Yield:
        case ExprKind::YieldFrom:
            if (ctx == TargetCtx::Store) error_at(e, "assignment to yield expression not possible");
            error_at(e, "cannot delete yield expression");
        default:
            if (ctx == TargetCtx::Del) error_at(e, "cannot delete " + describe(e));
            error_at(e, "cannot assign to " + describe(e));
        }
    }

    // ---- compound statements ------------------------------------------------------------

    Stmt parse_decorated() {
        const int first_line = peek().line;
        std::vector<Expr> decorators;
        while (at_op("@")) {
            take();
            decorators.push_back(parse_named_expression());
            if (peek().type != TokenType::Newline) invalid_syntax();
            take();
        }
        if (at_kw("def")) return parse_funcdef(std::move(decorators), first_line, false);
        if (at_kw("class")) return parse_classdef(std::move(decorators), first_line);
        if (at_kw("async") && is_kw(peek(1), "def")) return parse_funcdef(std::move(decorators), first_line, true);
        invalid_syntax();
    }

    struct ParamList {
        std::vector<std::string> names;
        std::vector<Expr> exprs;
    };

    ParamList parse_params(std::string_view close, bool annotations) {
        ParamList out;
        bool seen_slash = false;
        bool seen_star = false;
        bool bare_star = false;
        bool seen_kwargs = false;
        bool seen_default = false;
        int positional = 0;
        int kwonly = 0;
        const auto annotation = [&] {
            if (annotations && at_op(":")) {
                take();
                out.exprs.push_back(parse_expression());
            }
        };
        while (!at_op(close)) {
            if (seen_kwargs) invalid_syntax();
            if (at_op("/")) {
                if (seen_slash || seen_star || positional == 0) invalid_syntax();
                take();
                seen_slash = true;
            } else if (at_op("*")) {
                if (seen_star) invalid_syntax();
                const Token star = take();
                seen_star = true;
                if (at_op(",") || at_op(close)) {
                    bare_star = true;
                } else {
                    out.names.push_back(expect_name());
                    annotation();
                    if (at_op("=")) invalid_syntax();
                }
                (void)star;
            } else if (at_op("**")) {
                take();
                out.names.push_back(expect_name());
                annotation();
                if (at_op("=")) invalid_syntax();
                seen_kwargs = true;
            } else {
                const Token name_tok = peek();
                out.names.push_back(expect_name());
                annotation();
                bool has_default = false;
                if (at_op("=")) {
                    take();
                    out.exprs.push_back(parse_expression());
                    has_default = true;
                }
                if (!seen_star) {
                    if (has_default) {
                        seen_default = true;
                    } else if (seen_default) {
                        error_at(name_tok, "non-default argument follows default argument");
                    }
                    ++positional;
                } else {
                    ++kwonly;
                }
            }
            if (!at_op(",")) break;
            take();
        }
        if (bare_star && kwonly == 0) error_at(peek(), "named arguments must follow bare *");
        return out;
    }

    Stmt parse_funcdef(std::vector<Expr> decorators, int first_line, bool is_async) {
        if (is_async) take();
        const Token def_tok = peek();
        Stmt s = start_stmt(StmtKind::FunctionDef, def_tok);
        s.first_line = first_line;
        s.is_async = is_async;
        s.exprs = std::move(decorators);
        expect_kw("def");
        s.name = expect_name();
        expect_op("(");
        ParamList params = parse_params(")", true);
        expect_op(")");
        s.bound = std::move(params.names);
        for (Expr& e : params.exprs) s.exprs.push_back(std::move(e));
        if (at_op("->")) {
            take();
            s.exprs.push_back(parse_expression());
        }
        expect_op(":");
        s.suites.push_back(parse_block("function definition", def_tok.line));
        finish(s);
        return s;
    }

    Stmt parse_classdef(std::vector<Expr> decorators, int first_line) {
        const Token class_tok = peek();
        Stmt s = start_stmt(StmtKind::ClassDef, class_tok);
        s.first_line = first_line;
        s.exprs = std::move(decorators);
        take();
        s.name = expect_name();
        if (at_op("(")) {
            take();
            Expr args = start_expr(ExprKind::Call, class_tok);
            parse_call_args(args, false);
            expect_op(")");
            for (Expr& e : args.children) s.exprs.push_back(std::move(e));
        }
        expect_op(":");
        s.suites.push_back(parse_block("class definition", class_tok.line));
        finish(s);
        return s;
    }

    Stmt parse_if() {
        const Token if_tok = take();
        Stmt s = start_stmt(StmtKind::If, if_tok);
        s.exprs.push_back(parse_named_expression());
        expect_op(":");
        s.suites.push_back(parse_block("'if' statement", if_tok.line));
        while (at_kw("elif")) {
            const Token elif_tok = take();
            s.exprs.push_back(parse_named_expression());
            expect_op(":");
            s.suites.push_back(parse_block("'elif' statement", elif_tok.line));
        }
        if (at_kw("else")) {
            const Token else_tok = take();
            expect_op(":");
            s.suites.push_back(parse_block("'else' statement", else_tok.line));
        }
        finish(s);
        return s;
    }

    void parse_else_clause(Stmt& s) {
        if (at_kw("else")) {
            const Token else_tok = take();
            expect_op(":");
            s.suites.push_back(parse_block("'else' statement", else_tok.line));
        }
    }

    Stmt parse_while() {
        const Token tok = take();
        Stmt s = start_stmt(StmtKind::While, tok);
        s.exprs.push_back(parse_named_expression());
        expect_op(":");
        s.suites.push_back(parse_block("'while' statement", tok.line));
        parse_else_clause(s);
        finish(s);
        return s;
    }

    // Comma-separated assignment targets that stop before `in`.
    Expr parse_target_list() {
        const auto one = [&]() -> Expr {
            if (at_op("*")) {
                const Token star = take();
                Expr e = start_expr(ExprKind::Starred, star);
                e.children.push_back(parse_bitwise_or());
                finish(e);
                return e;
            }
            return parse_bitwise_or();
        };
        Expr first = one();
        if (!at_op(",")) return first;
        Expr tup = start_expr(ExprKind::Tuple, first);
        tup.children.push_back(std::move(first));
        while (at_op(",")) {
            take();
            if (!starts_expression(peek())) break;
            tup.children.push_back(one());
        }
        finish(tup);
        return tup;
    }

    Stmt parse_for(bool is_async) {
        const Token first = peek();
        if (is_async) take();
        const Token tok = take();
        Stmt s = start_stmt(StmtKind::For, first);
        s.is_async = is_async;
        Expr target = parse_target_list();
        validate_target(target, TargetCtx::Store);
        s.targets.push_back(std::move(target));
        expect_kw("in");
        s.exprs.push_back(parse_star_expressions());
        expect_op(":");
        s.suites.push_back(parse_block("'for' statement", tok.line));
        parse_else_clause(s);
        finish(s);
        return s;
    }

    void parse_with_item(Stmt& s) {
        s.exprs.push_back(parse_expression());
        if (at_kw("as")) {
            take();
            Expr target = parse_bitwise_or();
            validate_target(target, TargetCtx::Store);
            if (!at_op(",") && !at_op(")") && !at_op(":")) invalid_syntax();
            s.targets.push_back(std::move(target));
        }
    }

    Stmt parse_with(bool is_async) {
        const Token first = peek();
        if (is_async) take();
        const Token tok = take();
        Stmt s = start_stmt(StmtKind::With, first);
        s.is_async = is_async;
        bool done = false;
        if (at_op("(")) {
            const Snapshot snap = snapshot();
            Stmt trial = s;
            try {
                take();
                while (true) {
                    parse_with_item(trial);
                    if (!at_op(",")) break;
                    take();
                    if (at_op(")")) break;
                }
                expect_op(")");
                expect_op(":");
                s = std::move(trial);
                done = true;
            } catch (const ParseError&) {
                restore(snap);
            }
        }
        if (!done) {
            parse_with_item(s);
            while (at_op(",")) {
                take();
                parse_with_item(s);
            }
            expect_op(":");
        }
        s.suites.push_back(parse_block("'with' statement", tok.line));
        finish(s);
        return s;
    }

    Stmt parse_try() {
        const Token tok = take();
        Stmt s = start_stmt(StmtKind::Try, tok);
        expect_op(":");
        s.suites.push_back(parse_block("'try' statement", tok.line));
        int handlers = 0;
        while (at_kw("except")) {
            const Token except_tok = take();
            if (!at_op(":")) {
                s.exprs.push_back(parse_expression());
                if (at_op(",")) error_at(peek(), "multiple exception types must be parenthesized");
                if (at_kw("as")) {
                    take();
                    s.bound.push_back(expect_name());
                }
            }
            expect_op(":");
            s.suites.push_back(parse_block("'except' statement", except_tok.line));
            ++handlers;
        }
        if (at_kw("else")) {
            if (handlers == 0) error_at(peek(), "expected 'except' or 'finally' block");
            const Token else_tok = take();
            expect_op(":");
            s.suites.push_back(parse_block("'else' statement", else_tok.line));
        }
        bool has_finally = false;
        if (at_kw("finally")) {
            const Token fin_tok = take();
            expect_op(":");
            s.suites.push_back(parse_block("'finally' statement", fin_tok.line));
            has_finally = true;
        }
        if (handlers == 0 && !has_finally) error_at(peek(), "expected 'except' or 'finally' block");
        finish(s);
        return s;
    }

    // ---- match statement (soft keyword) -------------------------------------------------

    std::optional<Stmt> try_match() {
        const Snapshot snap = snapshot();
        const Token tok = peek();
        Stmt s = start_stmt(StmtKind::Match, tok);
        try {
            take();
            if (at_op("*")) {
                Expr tup = start_expr(ExprKind::Tuple, peek());
                tup.children.push_back(parse_star_named_expression());
                while (at_op(",")) {
                    take();
                    if (at_op(":")) break;
                    tup.children.push_back(parse_star_named_expression());
                }
                finish(tup);
                s.exprs.push_back(std::move(tup));
            } else {
                Expr subject = parse_named_expression();
                if (at_op(",")) {
                    Expr tup = start_expr(ExprKind::Tuple, subject);
                    tup.children.push_back(std::move(subject));
                    while (at_op(",")) {
                        take();
                        if (at_op(":")) break;
                        tup.children.push_back(parse_star_named_expression());
                    }
                    finish(tup);
                    subject = std::move(tup);
                }
                s.exprs.push_back(std::move(subject));
            }
            expect_op(":");
            if (peek().type != TokenType::Newline) invalid_syntax();
        } catch (const ParseError&) {
            restore(snap);
            return std::nullopt;
        }
        take();
        if (peek().type != TokenType::Indent) {
            error_at(peek(), "expected an indented block after 'match' statement on line " + std::to_string(tok.line),
                     SyntaxErrorKind::Indentation);
        }
        take();
        while (peek().type != TokenType::Dedent && peek().type != TokenType::EndMarker) {
            if (!at_kw("case")) invalid_syntax();
            const Token case_tok = take();
            parse_patterns(s);
            if (at_kw("if")) {
                take();
                s.exprs.push_back(parse_named_expression());
            }
            expect_op(":");
            s.suites.push_back(parse_block("'case' statement", case_tok.line));
        }
        if (peek().type == TokenType::Dedent) take();
        finish(s);
        return s;
    }

    void bind_capture(Stmt& s, const Token& name_tok) {
        if (name_tok.text != "_") s.bound.emplace_back(name_tok.text);
    }

    void parse_patterns(Stmt& s) {
        parse_maybe_star_pattern(s);
        while (at_op(",")) {
            take();
            if (at_op(":") || at_kw("if")) break;
            parse_maybe_star_pattern(s);
        }
    }

    // Returns true when the pattern was a star pattern.
    bool parse_maybe_star_pattern(Stmt& s) {
        if (at_op("*")) {
            take();
            if (!is_plain_name(peek())) invalid_syntax();
            bind_capture(s, take());
            return true;
        }
        parse_pattern(s);
        return false;
    }

    void parse_pattern(Stmt& s) {
        parse_or_pattern(s);
        if (at_kw("as")) {
            take();
            const Token& t = peek();
            if (!is_plain_name(t)) invalid_syntax();
            if (t.text == "_") error_at(t, "cannot use '_' as a target");
            bind_capture(s, take());
        }
    }

    void parse_or_pattern(Stmt& s) {
        parse_closed_pattern(s);
        while (at_op("|")) {
            take();
            parse_closed_pattern(s);
        }
    }

    static bool is_imaginary(std::string_view number) {
        return !number.empty() && (number.back() == 'j' || number.back() == 'J');
    }

    void parse_signed_number_pattern() {
        if (at_op("-")) take();
        if (peek().type != TokenType::Number) invalid_syntax();
        const Token real = take();
        if (at_op("+") || at_op("-")) {
            if (is_imaginary(real.text)) error_at(real, "real number required in complex literal");
            take();
            if (peek().type != TokenType::Number) invalid_syntax();
            const Token imag = take();
            if (!is_imaginary(imag.text)) error_at(imag, "imaginary number required in complex literal");
        }
    }

    void parse_literal_key() {
        const Token& t = peek();
        if (t.type == TokenType::Number || is_op(t, "-")) {
            parse_signed_number_pattern();
        } else if (t.type == TokenType::String) {
            parse_strings();
        } else if (is_kw(t, "None") || is_kw(t, "True") || is_kw(t, "False")) {
            take();
        } else if (is_plain_name(t) && is_op(peek(1), ".")) {
            take();
            while (at_op(".")) {
                take();
                expect_name();
            }
        } else {
            invalid_syntax();
        }
    }

    void parse_closed_pattern(Stmt& s) {
        const Token t = peek();
        if (t.type == TokenType::Number || is_op(t, "-")) {
            parse_signed_number_pattern();
            return;
        }
        if (t.type == TokenType::String) {
            parse_strings();
            return;
        }
        if (t.type == TokenType::Name) {
            if (is_kw(t, "None") || is_kw(t, "True") || is_kw(t, "False")) {
                take();
                return;
            }
            if (is_keyword(t.text)) invalid_syntax();
            take();
            bool dotted = false;
            while (at_op(".")) {
                take();
                expect_name();
                dotted = true;
            }
            if (at_op("(")) {
                parse_class_pattern_args(s);
                return;
            }
            if (!dotted) bind_capture(s, t);
            return;
        }
        if (is_op(t, "(")) {
            take();
            if (at_op(")")) {
                take();
                return;
            }
            const bool star = parse_maybe_star_pattern(s);
            if (at_op(",")) {
                while (at_op(",")) {
                    take();
                    if (at_op(")")) break;
                    parse_maybe_star_pattern(s);
                }
            } else if (star) {
                invalid_syntax();
            }
            expect_op(")");
            return;
        }
        if (is_op(t, "[")) {
            take();
            while (!at_op("]")) {
                parse_maybe_star_pattern(s);
                if (!at_op(",")) break;
                take();
            }
            expect_op("]");
            return;
        }
        if (is_op(t, "{")) {
            take();
            while (!at_op("}")) {
                if (at_op("**")) {
                    take();
                    if (!is_plain_name(peek())) invalid_syntax();
                    bind_capture(s, take());
                    if (at_op(",")) take();
                    break;
                }
                parse_literal_key();
                expect_op(":");
                parse_pattern(s);
                if (!at_op(",")) break;
                take();
            }
            expect_op("}");
            return;
        }
        invalid_syntax();
    }

    void parse_class_pattern_args(Stmt& s) {
        take();
        bool seen_keyword = false;
        while (!at_op(")")) {
            if (peek().type == TokenType::Name && is_op(peek(1), "=")) {
                expect_name();
                take();
                parse_pattern(s);
                seen_keyword = true;
            } else {
                if (seen_keyword) error_at(peek(), "positional patterns follow keyword patterns");
                parse_pattern(s);
            }
            if (!at_op(",")) break;
            take();
        }
        expect_op(")");
    }

    // ---- expressions --------------------------------------------------------------------

    Expr parse_star_expressions() {
        Expr first = parse_star_expression();
        if (!at_op(",")) return first;
        Expr tup = start_expr(ExprKind::Tuple, first);
        tup.children.push_back(std::move(first));
        while (at_op(",")) {
            take();
            if (!starts_expression(peek())) break;
            tup.children.push_back(parse_star_expression());
        }
        finish(tup);
        return tup;
    }

    Expr parse_star_expression() {
        if (at_op("*")) {
            const Token star = take();
            Expr e = start_expr(ExprKind::Starred, star);
            e.children.push_back(parse_bitwise_or());
            finish(e);
            return e;
        }
        return parse_expression();
    }

    Expr parse_star_named_expression() {
        if (at_op("*")) {
            const Token star = take();
            Expr e = start_expr(ExprKind::Starred, star);
            e.children.push_back(parse_bitwise_or());
            finish(e);
            return e;
        }
        return parse_named_expression();
    }

    Expr parse_named_expression() {
        if (is_plain_name(peek()) && is_op(peek(1), ":=")) {
            const Token name_tok = take();
            Expr e = start_expr(ExprKind::NamedExpr, name_tok);
            Expr target = start_expr(ExprKind::Name, name_tok);
            target.name = std::string(name_tok.text);
            finish(target);
            take();
            e.children.push_back(std::move(target));
            e.children.push_back(parse_expression());
            finish(e);
            return e;
        }
        Expr e = parse_expression();
        if (at_op(":=")) error_at(e, "cannot use assignment expressions with " + describe(e));
        return e;
    }

    Expr parse_expression() {
        if (at_kw("lambda")) return parse_lambda();
        const std::size_t start = i_;
        Expr body = parse_disjunction();
        if (at_kw("if")) {
            take();
            Expr e = start_expr(ExprKind::IfExp, body);
            e.children.push_back(std::move(body));
            e.children.push_back(parse_disjunction());
            if (!at_kw("else")) error_at(peek(), "expected 'else' after 'if' expression");
            take();
            e.children.push_back(parse_expression());
            finish(e);
            return e;
        }
        check_missing_comma(body, start);
        return body;
    }

    // Two expressions side by side inside brackets. Reported at the first one, unless it
    // starts with a soft keyword or a name directly followed by a string.
    void check_missing_comma(const Expr& first, std::size_t start) {
        if (probing_ > 0 || !starts_expression(peek())) return;
        const Token& head = toks_[start];
        if (head.type == TokenType::Name &&
            (head.text == "match" || head.text == "case" || head.text == "_" ||
             (start + 1 < toks_.size() && toks_[start + 1].type == TokenType::String))) {
            return;
        }
        const Snapshot s = snapshot();
        ++probing_;
        bool second = true;
        try {
            parse_expression();
        } catch (const ParseError&) {
            second = false;
        }
        --probing_;
        const int level = i_ > 0 ? levels_[i_ - 1] : 0;
        restore(s);
        if (second && level > 0) error_at(first, "invalid syntax. Perhaps you forgot a comma?");
    }

    Expr parse_lambda() {
        const Token tok = take();
        Expr e = start_expr(ExprKind::Lambda, tok);
        ParamList params = parse_params(":", false);
        expect_op(":");
        e.bound = std::move(params.names);
        e.children = std::move(params.exprs);
        e.children.push_back(parse_expression());
        finish(e);
        return e;
    }

    Expr parse_disjunction() {
        Expr first = parse_conjunction();
        if (!at_kw("or")) return first;
        Expr e = start_expr(ExprKind::BoolOp, first);
        e.name = "or";
        e.children.push_back(std::move(first));
        while (at_kw("or")) {
            take();
            e.children.push_back(parse_conjunction());
        }
        finish(e);
        return e;
    }

    Expr parse_conjunction() {
        Expr first = parse_inversion();
        if (!at_kw("and")) return first;
        Expr e = start_expr(ExprKind::BoolOp, first);
        e.name = "and";
        e.children.push_back(std::move(first));
        while (at_kw("and")) {
            take();
            e.children.push_back(parse_inversion());
        }
        finish(e);
        return e;
    }

    Expr parse_inversion() {
        if (at_kw("not")) {
            const Token tok = take();
            Expr e = start_expr(ExprKind::UnaryOp, tok);
            e.name = "not";
            e.children.push_back(parse_inversion());
            finish(e);
            return e;
        }
        return parse_comparison();
    }

    bool take_compare_op() {
        const Token& t = peek();
        if (t.type == TokenType::Op &&
            (t.text == "==" || t.text == "!=" || t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=")) {
            take();
            return true;
        }
        if (is_kw(t, "in")) {
            take();
            return true;
        }
        if (is_kw(t, "not") && is_kw(peek(1), "in")) {
            take();
            take();
            return true;
        }
        if (is_kw(t, "is")) {
            take();
            if (at_kw("not")) take();
            return true;
        }
        return false;
    }

    Expr parse_comparison() {
        Expr first = parse_bitwise_or();
        const Snapshot snap = snapshot();
        if (!take_compare_op()) return first;
        restore(snap);
        Expr e = start_expr(ExprKind::Compare, first);
        e.children.push_back(std::move(first));
        while (take_compare_op()) e.children.push_back(parse_bitwise_or());
        finish(e);
        return e;
    }

    template <typename Next>
    Expr parse_binary(std::initializer_list<std::string_view> ops, Next next) {
        Expr left = (this->*next)();
        while (true) {
            const Token& t = peek();
            if (t.type != TokenType::Op) break;
            if (std::find(ops.begin(), ops.end(), t.text) == ops.end()) break;
            take();
            Expr e = start_expr(ExprKind::BinOp, left);
            e.name = std::string(t.text);
            e.children.push_back(std::move(left));
            e.children.push_back((this->*next)());
            finish(e);
            left = std::move(e);
        }
        return left;
    }

    Expr parse_bitwise_or() { return parse_binary({"|"}, &Parser::parse_bitwise_xor); }
    Expr parse_bitwise_xor() { return parse_binary({"^"}, &Parser::parse_bitwise_and); }
    Expr parse_bitwise_and() { return parse_binary({"&"}, &Parser::parse_shift); }
    Expr parse_shift() { return parse_binary({"<<", ">>"}, &Parser::parse_sum); }
    Expr parse_sum() { return parse_binary({"+", "-"}, &Parser::parse_term); }
    Expr parse_term() { return parse_binary({"*", "/", "//", "%", "@"}, &Parser::parse_factor); }

    Expr parse_factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            const Token tok = take();
            Expr e = start_expr(ExprKind::UnaryOp, tok);
            e.name = std::string(tok.text);
            e.children.push_back(parse_factor());
            finish(e);
            return e;
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_await_primary();
        if (!at_op("**")) return base;
        take();
        Expr e = start_expr(ExprKind::BinOp, base);
        e.name = "**";
        e.children.push_back(std::move(base));
        e.children.push_back(parse_factor());
        finish(e);
        return e;
    }

    Expr parse_await_primary() {
        if (at_kw("await")) {
            const Token tok = take();
            Expr e = start_expr(ExprKind::Await, tok);
            e.children.push_back(parse_primary());
            finish(e);
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        Expr e = parse_atom();
        while (true) {
            if (at_op(".")) {
                take();
                Expr attr = start_expr(ExprKind::Attribute, e);
                attr.name = expect_name();
                attr.children.push_back(std::move(e));
                finish(attr);
                e = std::move(attr);
            } else if (at_op("(")) {
                take();
                Expr call = start_expr(ExprKind::Call, e);
                call.children.push_back(std::move(e));
                parse_call_args(call, true);
                expect_op(")");
                finish(call);
                e = std::move(call);
            } else if (at_op("[")) {
                take();
                Expr sub = start_expr(ExprKind::Subscript, e);
                sub.children.push_back(std::move(e));
                sub.children.push_back(parse_slices());
                expect_op("]");
                finish(sub);
                e = std::move(sub);
            } else {
                break;
            }
        }
        return e;
    }

    void parse_call_args(Expr& call, bool allow_genexp) {
        bool seen_keyword = false;
        bool seen_double_star = false;
        int count = 0;
        while (!at_op(")")) {
            Expr arg;
            if (at_op("*")) {
                const Token star = take();
                arg = start_expr(ExprKind::Starred, star);
                arg.children.push_back(parse_expression());
                finish(arg);
                if (seen_double_star) {
                    error_at(star, "iterable argument unpacking follows keyword argument unpacking");
                }
            } else if (at_op("**")) {
                const Token star = take();
                arg = start_expr(ExprKind::DoubleStarred, star);
                arg.children.push_back(parse_expression());
                finish(arg);
                seen_double_star = true;
            } else if (peek().type == TokenType::Name && is_op(peek(1), "=")) {
                const Token name_tok = take();
                if (is_keyword(name_tok.text)) {
                    if (name_tok.text == "True" || name_tok.text == "False" || name_tok.text == "None") {
                        error_at(name_tok, "cannot assign to " + std::string(name_tok.text));
                    }
                    error_at(name_tok, "invalid syntax");
                }
                take();
                arg = start_expr(ExprKind::Keyword, name_tok);
                arg.name = std::string(name_tok.text);
                arg.children.push_back(parse_expression());
                finish(arg);
                seen_keyword = true;
            } else {
                arg = parse_named_expression();
                if (at_op("=")) {
                    error_at(arg, "expression cannot contain assignment, perhaps you meant \"==\"?");
                }
                if (at_comp_for()) {
                    Expr gen = start_expr(ExprKind::GeneratorExp, arg);
                    gen.children.push_back(std::move(arg));
                    parse_comp_fors(gen);
                    finish(gen);
                    if (!allow_genexp || count > 0 || !at_op(")")) {
                        error_at(gen, "Generator expression must be parenthesized");
                    }
                    arg = std::move(gen);
                }
                if (seen_double_star) error_at(arg, "positional argument follows keyword argument unpacking");
                if (seen_keyword) error_at(arg, "positional argument follows keyword argument");
            }
            call.children.push_back(std::move(arg));
            ++count;
            if (!at_op(",")) break;
            take();
        }
    }

    Expr parse_slices() {
        Expr first = parse_slice();
        if (!at_op(",")) return first;
        Expr tup = start_expr(ExprKind::Tuple, first);
        tup.children.push_back(std::move(first));
        while (at_op(",")) {
            take();
            if (at_op("]")) break;
            tup.children.push_back(parse_slice());
        }
        finish(tup);
        return tup;
    }

    Expr parse_slice() {
        const Token start = peek();
        Expr s = start_expr(ExprKind::Slice, start);
        if (!at_op(":")) {
            Expr e = parse_named_expression();
            if (!at_op(":")) return e;
            if (e.kind == ExprKind::NamedExpr && !e.parenthesized) invalid_syntax();
            s.children.push_back(std::move(e));
        }
        take();
        if (!at_op(":") && !at_op(",") && !at_op("]")) s.children.push_back(parse_expression());
        if (at_op(":")) {
            take();
            if (!at_op(",") && !at_op("]")) s.children.push_back(parse_expression());
        }
        finish(s);
        return s;
    }

    bool at_comp_for() const { return at_kw("for") || (at_kw("async") && is_kw(peek(1), "for")); }

    void parse_comp_fors(Expr& into) {
        while (at_comp_for()) {
            const Token tok = peek();
            Expr comp = start_expr(ExprKind::Comprehension, tok);
            if (at_kw("async")) take();
            take();
            Expr target = parse_target_list();
            validate_target(target, TargetCtx::Store);
            comp.children.push_back(std::move(target));
            expect_kw("in");
            comp.children.push_back(parse_disjunction());
            while (at_kw("if")) {
                take();
                comp.children.push_back(parse_disjunction());
            }
            finish(comp);
            into.children.push_back(std::move(comp));
        }
    }

    Expr parse_yield_expr() {
        const Token tok = take();
        if (at_kw("from")) {
            take();
            Expr e = start_expr(ExprKind::YieldFrom, tok);
            e.children.push_back(parse_expression());
            finish(e);
            return e;
        }
        Expr e = start_expr(ExprKind::Yield, tok);
        if (starts_expression(peek())) e.children.push_back(parse_star_expressions());
        finish(e);
        return e;
    }

    Expr parse_atom() {
        const Token t = peek();
        switch (t.type) {
        case TokenType::Name: {
            if (is_keyword(t.text)) {
                if (t.text == "True" || t.text == "False" || t.text == "None") {
                    take();
                    Expr e = start_expr(ExprKind::Constant, t);
                    e.name = std::string(t.text);
                    finish(e);
                    return e;
                }
                invalid_syntax();
            }
            take();
            Expr e = start_expr(ExprKind::Name, t);
            e.name = std::string(t.text);
            finish(e);
            return e;
        }
        case TokenType::Number: {
            take();
            Expr e = start_expr(ExprKind::Constant, t);
            e.name = "number";
            finish(e);
            return e;
        }
        case TokenType::String: return parse_strings();
        case TokenType::Op:
            if (t.text == "(") return parse_paren();
            if (t.text == "[") return parse_list();
            if (t.text == "{") return parse_brace();
            if (t.text == "...") {
                take();
                Expr e = start_expr(ExprKind::Constant, t);
                e.name = "...";
                finish(e);
                return e;
            }
            break;
        default: break;
        }
        invalid_syntax();
    }

    Expr parse_paren() {
        const Token open = take();
        if (at_op(")")) {
            take();
            Expr e = start_expr(ExprKind::Tuple, open);
            e.parenthesized = true;
            finish(e);
            return e;
        }
        if (at_kw("yield")) {
            Expr e = parse_yield_expr();
            expect_op(")");
            e.parenthesized = true;
            return e;
        }
        Expr first = parse_star_named_expression();
        if (at_comp_for()) {
            if (first.kind == ExprKind::Starred) error_at(first, "iterable unpacking cannot be used in comprehension");
            Expr gen = start_expr(ExprKind::GeneratorExp, open);
            gen.children.push_back(std::move(first));
            parse_comp_fors(gen);
            expect_op(")");
            finish(gen);
            gen.parenthesized = true;
            return gen;
        }
        if (at_op(",")) {
            Expr tup = start_expr(ExprKind::Tuple, open);
            tup.children.push_back(std::move(first));
            while (at_op(",")) {
                take();
                if (at_op(")")) break;
                tup.children.push_back(parse_star_named_expression());
            }
            expect_op(")");
            finish(tup);
            tup.parenthesized = true;
            return tup;
        }
        expect_op(")");
        if (first.kind == ExprKind::Starred) error_at(first, "cannot use starred expression here");
        first.parenthesized = true;
        return first;
    }

    Expr parse_list() {
        const Token open = take();
        Expr list = start_expr(ExprKind::List, open);
        if (at_op("]")) {
            take();
            finish(list);
            return list;
        }
        Expr first = parse_star_named_expression();
        if (at_comp_for()) {
            if (first.kind == ExprKind::Starred) error_at(first, "iterable unpacking cannot be used in comprehension");
            Expr comp = start_expr(ExprKind::ListComp, open);
            comp.children.push_back(std::move(first));
            parse_comp_fors(comp);
            expect_op("]");
            finish(comp);
            return comp;
        }
        list.children.push_back(std::move(first));
        while (at_op(",")) {
            take();
            if (at_op("]")) break;
            list.children.push_back(parse_star_named_expression());
        }
        expect_op("]");
        finish(list);
        return list;
    }

    Expr parse_brace() {
        const Token open = take();
        if (at_op("}")) {
            take();
            Expr d = start_expr(ExprKind::Dict, open);
            finish(d);
            return d;
        }
        if (at_op("**")) {
            Expr d = start_expr(ExprKind::Dict, open);
            const Token star = take();
            Expr first = start_expr(ExprKind::DoubleStarred, star);
            first.children.push_back(parse_bitwise_or());
            finish(first);
            if (at_comp_for()) error_at(first, "dict unpacking cannot be used in dict comprehension");
            d.children.push_back(std::move(first));
            parse_dict_items(d);
            return d;
        }
        Expr first = parse_star_named_expression();
        if (first.kind != ExprKind::Starred && at_op(":")) {
            if (first.kind == ExprKind::NamedExpr && !first.parenthesized) invalid_syntax();
            take();
            Expr kv = start_expr(ExprKind::KeyValue, first);
            kv.children.push_back(std::move(first));
            kv.children.push_back(parse_expression());
            finish(kv);
            if (at_comp_for()) {
                Expr comp = start_expr(ExprKind::DictComp, open);
                comp.children.push_back(std::move(kv));
                parse_comp_fors(comp);
                expect_op("}");
                finish(comp);
                return comp;
            }
            Expr d = start_expr(ExprKind::Dict, open);
            d.children.push_back(std::move(kv));
            parse_dict_items(d);
            return d;
        }
        if (at_comp_for()) {
            if (first.kind == ExprKind::Starred) error_at(first, "iterable unpacking cannot be used in comprehension");
            Expr comp = start_expr(ExprKind::SetComp, open);
            comp.children.push_back(std::move(first));
            parse_comp_fors(comp);
            expect_op("}");
            finish(comp);
            return comp;
        }
        Expr set = start_expr(ExprKind::Set, open);
        set.children.push_back(std::move(first));
        while (at_op(",")) {
            take();
            if (at_op("}")) break;
            set.children.push_back(parse_star_named_expression());
        }
        expect_op("}");
        finish(set);
        return set;
    }

    void parse_dict_items(Expr& d) {
        while (at_op(",")) {
            take();
            if (at_op("}")) break;
            if (at_op("**")) {
                const Token star = take();
                Expr item = start_expr(ExprKind::DoubleStarred, star);
                item.children.push_back(parse_bitwise_or());
                finish(item);
                d.children.push_back(std::move(item));
                continue;
            }
            Expr key = parse_expression();
            if (!at_op(":")) error_at(peek(), "':' expected after dictionary key");
            take();
            Expr kv = start_expr(ExprKind::KeyValue, key);
            kv.children.push_back(std::move(key));
            kv.children.push_back(parse_expression());
            finish(kv);
            d.children.push_back(std::move(kv));
        }
        expect_op("}");
        finish(d);
    }

    // ---- string literals ----------------------------------------------------------------

    struct StringParts {
        std::string_view prefix;
        std::string_view body;
        bool raw = false;
        bool bytes = false;
        bool fstring = false;
    };

    static StringParts split_string(std::string_view text) {
        StringParts p;
        std::size_t q = 0;
        while (q < text.size() && text[q] != '\'' && text[q] != '"') ++q;
        p.prefix = text.substr(0, q);
        for (char c : p.prefix) {
            const char l = static_cast<char>(c | 0x20);
            p.raw |= l == 'r';
            p.bytes |= l == 'b';
            p.fstring |= l == 'f';
        }
        const std::size_t qlen = (text.size() >= q + 6 && text[q + 1] == text[q] && text[q + 2] == text[q]) ? 3 : 1;
        p.body = text.substr(q + qlen, text.size() - q - 2 * qlen);
        return p;
    }

    void check_escapes(std::string_view body, bool bytes, const Token& tok) const {
        const auto fail = [&](const std::string& msg) { error_at(tok, msg); };
        for (std::size_t i = 0; i < body.size(); ++i) {
            const unsigned char c = static_cast<unsigned char>(body[i]);
            if (bytes && c >= 0x80) fail("bytes can only contain ASCII literal characters");
            if (c != '\\') continue;
            ++i;
            if (i >= body.size()) break;
            const char e = body[i];
            const auto need_hex = [&](std::size_t count, const char* what) {
                for (std::size_t k = 1; k <= count; ++k) {
                    if (i + k >= body.size() || !is_hex_digit(body[i + k])) {
                        fail(std::string("(unicode error) truncated ") + what + " escape");
                    }
                }
            };
            if (e == 'x') {
                need_hex(2, "\\xXX");
                i += 2;
            } else if (!bytes && e == 'u') {
                need_hex(4, "\\uXXXX");
                i += 4;
            } else if (!bytes && e == 'U') {
                need_hex(8, "\\UXXXXXXXX");
                const unsigned long value = std::stoul(std::string(body.substr(i + 1, 8)), nullptr, 16);
                if (value > 0x10FFFF) fail("(unicode error) illegal Unicode character");
                i += 8;
            } else if (!bytes && e == 'N') {
                if (i + 1 >= body.size() || body[i + 1] != '{') fail("(unicode error) malformed \\N character escape");
                const std::size_t close = body.find('}', i + 2);
                if (close == std::string_view::npos || close == i + 2) {
                    fail("(unicode error) malformed \\N character escape");
                }
                i = close;
            }
        }
    }

    Expr parse_strings() {
        const Token first = peek();
        bool any_bytes = false;
        bool any_text = false;
        bool any_f = false;
        std::vector<Expr> parts;
        while (peek().type == TokenType::String) {
            const Token tok = take();
            const StringParts p = split_string(tok.text);
            if (p.bytes) {
                any_bytes = true;
            } else {
                any_text = true;
            }
            if (any_bytes && any_text) error_at(tok, "cannot mix bytes and nonbytes literals");
            if (p.fstring) {
                any_f = true;
                parse_fstring_segment(p.body, 0, p.raw, tok, parts, 0, false);
            } else if (!p.raw) {
                check_escapes(p.body, p.bytes, tok);
            } else if (p.bytes) {
                check_escapes_raw_bytes(p.body, tok);
            }
        }
        Expr e = start_expr(any_f ? ExprKind::JoinedStr : ExprKind::Constant, first);
        e.name = any_bytes ? "bytes" : "str";
        e.children = std::move(parts);
        finish(e);
        return e;
    }

    void check_escapes_raw_bytes(std::string_view body, const Token& tok) const {
        for (char c : body) {
            if (static_cast<unsigned char>(c) >= 0x80) error_at(tok, "bytes can only contain ASCII literal characters");
        }
    }

    // Scans literal text of an f-string (or a format spec when `in_spec`), parsing replacement
    // fields. Returns the index where scanning stopped: body.size(), or the closing '}' of a spec.
    std::size_t parse_fstring_segment(std::string_view body, std::size_t i, bool raw, const Token& tok,
                                      std::vector<Expr>& out, int depth, bool in_spec) {
        std::size_t literal_start = i;
        const auto flush_literal = [&](std::size_t end) {
            if (!raw && end > literal_start) check_escapes(body.substr(literal_start, end - literal_start), false, tok);
        };
        while (i < body.size()) {
            const char c = body[i];
            if (!raw && c == '\\') {
                if (i + 2 < body.size() && body[i + 1] == 'N' && body[i + 2] == '{') {
                    const std::size_t close = body.find('}', i + 3);
                    if (close == std::string_view::npos) error_at(tok, "(unicode error) malformed \\N character escape");
                    i = close + 1;
                } else {
                    i += 2;
                }
                continue;
            }
            if (c == '{') {
                if (i + 1 < body.size() && body[i + 1] == '{') {
                    i += 2;
                    continue;
                }
                flush_literal(i);
                i = parse_replacement_field(body, i + 1, raw, tok, out, depth);
                literal_start = i;
                continue;
            }
            if (c == '}') {
                if (in_spec) {
                    flush_literal(i);
                    return i;
                }
                if (i + 1 < body.size() && body[i + 1] == '}') {
                    i += 2;
                    continue;
                }
                error_at(tok, "f-string: single '}' is not allowed");
            }
            ++i;
        }
        flush_literal(i);
        return i;
    }

    std::size_t parse_replacement_field(std::string_view body, std::size_t start, bool raw, const Token& tok,
                                        std::vector<Expr>& out, int depth) {
        if (depth >= 2) error_at(tok, "f-string: expressions nested too deeply");
        std::vector<char> stack;
        char quote = 0;
        bool triple = false;
        std::size_t j = start;
        bool self_doc = false;
        for (; j < body.size(); ++j) {
            const char ch = body[j];
            if (ch == '\\') error_at(tok, "f-string expression part cannot include a backslash");
            if (quote != 0) {
                if (ch == quote) {
                    if (!triple) {
                        quote = 0;
                    } else if (j + 2 < body.size() && body[j + 1] == quote && body[j + 2] == quote) {
                        quote = 0;
                        j += 2;
                    }
                }
                continue;
            }
            if (ch == '\'' || ch == '"') {
                quote = ch;
                triple = j + 2 < body.size() && body[j + 1] == ch && body[j + 2] == ch;
                if (triple) j += 2;
                continue;
            }
            if (ch == '(' || ch == '[' || ch == '{') {
                stack.push_back(ch);
                continue;
            }
            if (ch == ')' || ch == ']' || ch == '}') {
                if (stack.empty()) {
                    if (ch == '}') break;
                    error_at(tok, std::string("f-string: unmatched '") + ch + "'");
                }
                const char open = stack.back();
                const char expected = open == '(' ? ')' : open == '[' ? ']' : '}';
                if (ch != expected) {
                    error_at(tok, std::string("f-string: closing parenthesis '") + ch +
                                      "' does not match opening parenthesis '" + open + "'");
                }
                stack.pop_back();
                continue;
            }
            if (ch == '#') error_at(tok, "f-string expression part cannot include '#'");
            if (!stack.empty()) continue;
            const char next = j + 1 < body.size() ? body[j + 1] : '\0';
            if (ch == '!') {
                if (next == '=') {
                    ++j;
                    continue;
                }
                break;
            }
            if (ch == ':') break;
            if (ch == '=' || ch == '<' || ch == '>') {
                if (next == '=') {
                    ++j;
                    continue;
                }
                if (ch == '=') {
                    self_doc = true;
                    break;
                }
            }
        }
        if (j >= body.size()) {
            if (quote != 0) error_at(tok, "f-string: unterminated string");
            error_at(tok, "f-string: expecting '}'");
        }
        const std::string_view expr_text = body.substr(start, j - start);
        if (expr_text.find_first_not_of(" \t\r\n\f") == std::string_view::npos) {
            error_at(tok, "f-string: empty expression not allowed");
        }
        out.push_back(parse_fstring_expression(expr_text, tok));
        if (self_doc) {
            ++j;
            while (j < body.size() && (body[j] == ' ' || body[j] == '\t')) ++j;
        }
        if (j < body.size() && body[j] == '!') {
            ++j;
            if (j >= body.size()) error_at(tok, "f-string: expecting '}'");
            const char conv = body[j];
            if (conv != 's' && conv != 'r' && conv != 'a') {
                error_at(tok, "f-string: invalid conversion character: expected 's', 'r', or 'a'");
            }
            ++j;
            if (j >= body.size() || (body[j] != ':' && body[j] != '}')) error_at(tok, "f-string: expecting '}'");
        }
        if (j < body.size() && body[j] == ':') {
            j = parse_fstring_segment(body, j + 1, raw, tok, out, depth + 1, true);
        }
        if (j >= body.size() || body[j] != '}') error_at(tok, "f-string: expecting '}'");
        return j + 1;
    }

    Expr parse_fstring_expression(std::string_view expr_text, const Token& tok) const {
        std::string wrapped = "(";
        wrapped += expr_text;
        wrapped += ")";
        TokenStream ts = tokenize(wrapped);
        try {
            Parser sub(std::move(ts));
            Expr e = sub.parse_wrapped_expression();
            return e;
        } catch (const ParseError& err) {
            const std::string& m = err.issue.message;
            error_at(tok, m.starts_with("f-string") ? m : "f-string: " + m);
        }
    }

};

}  // namespace

ParseOutcome parse_module(std::string_view source) {
    ParseOutcome outcome;
    Parser parser(tokenize(source));
    try {
        outcome.module = parser.parse_file();
    } catch (const ParseError& e) {
        outcome.error = parser.resolve(e);
    }
    return outcome;
}

std::optional<SyntaxIssue> check_syntax(std::string_view source) {
    return parse_module(source).error;
}

}  // namespace pkgraph::python
