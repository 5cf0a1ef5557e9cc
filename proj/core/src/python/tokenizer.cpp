// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/python/tokenizer.hpp"

#include <algorithm>
#include <array>

namespace pkgraph::python {

std::string_view to_string(SyntaxErrorKind kind) noexcept {
    switch (kind) {
    case SyntaxErrorKind::Syntax: return "SyntaxError";
    case SyntaxErrorKind::Indentation: return "IndentationError";
    case SyntaxErrorKind::Tab: return "TabError";
    }
    return "SyntaxError";
}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await",
    "break", "class",  "continue", "def",     "del",    "elif",   "else",  "except",
    "finally", "for",  "from",    "global",   "if",     "import", "in",    "is",
    "lambda", "nonlocal", "not",  "or",       "pass",   "raise",  "return", "try",
    "while", "with",   "yield"};

bool is_ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(unsigned char c) { return is_ident_start(c) || is_digit(c); }
bool is_hex(unsigned char c) {
    return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_oct(unsigned char c) { return c >= '0' && c <= '7'; }
bool is_bin(unsigned char c) { return c == '0' || c == '1'; }

bool is_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    std::string lower;
    for (char c : word) lower.push_back(static_cast<char>(c | 0x20));
    return lower == "r" || lower == "u" || lower == "b" || lower == "br" || lower == "rb" ||
           lower == "f" || lower == "fr" || lower == "rf";
}

constexpr std::array<std::string_view, 3> kOps3 = {"**=", "//=", "..."};
constexpr std::array<std::string_view, 21> kOps2 = {
    ">>", "<<", "**", "//", "<=", ">=", "==", "!=", "->", ":=", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ">>", "<<"};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=";

struct LexError {
    SyntaxIssue issue;
    bool preempts = true;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    TokenStream run() {
        try {
            lex();
        } catch (const LexError& e) {
            Token err;
            err.type = TokenType::Error;
            err.line = e.issue.line;
            err.col = e.issue.col;
            err.end_line = e.issue.line;
            err.end_col = e.issue.col;
            out_.tokens.push_back(err);
            out_.error = e.issue;
            out_.error_preempts = e.preempts;
        }
        return std::move(out_);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::size_t line_start_ = 0;
    std::vector<int> indents_{0};
    std::vector<int> alt_indents_{0};
    struct Bracket {
        char ch;
        int line;
        int col;
    };
    std::vector<Bracket> brackets_;
    TokenStream out_;

    unsigned char at(std::size_t p) const {
        return p < src_.size() ? static_cast<unsigned char>(src_[p]) : '\0';
    }
    unsigned char cur() const { return at(pos_); }
    int col_of(std::size_t p) const { return static_cast<int>(p - line_start_); }

    [[noreturn]] void fail(SyntaxErrorKind kind, std::string msg, int line, int col, bool preempts = true) const {
        throw LexError{SyntaxIssue{kind, std::move(msg), line, col}, preempts};
    }
    [[noreturn]] void fail_deferred(std::string msg) const {
        fail(SyntaxErrorKind::Syntax, std::move(msg), line_, col_of(pos_), false);
    }
    [[noreturn]] void fail_here(std::string msg) const {
        fail(SyntaxErrorKind::Syntax, std::move(msg), line_, col_of(pos_));
    }

    // Length of the line terminator at p, 0 if none.
    std::size_t newline_len(std::size_t p) const {
        if (p >= src_.size()) return 0;
        if (src_[p] == '\n') return 1;
        if (src_[p] == '\r') return (p + 1 < src_.size() && src_[p + 1] == '\n') ? 2 : 1;
        return 0;
    }

    void advance_line(std::size_t after) {
        pos_ = after;
        ++line_;
        line_start_ = after;
    }

    void emit(TokenType type, std::size_t start, int line, int col) {
        Token t;
        t.type = type;
        t.text = src_.substr(start, pos_ - start);
        t.line = line;
        t.col = col;
        t.end_line = line_;
        t.end_col = col_of(pos_);
        out_.tokens.push_back(t);
    }

    void emit_marker(TokenType type) {
        Token t;
        t.type = type;
        t.line = line_;
        t.col = col_of(pos_);
        t.end_line = line_;
        t.end_col = t.col;
        out_.tokens.push_back(t);
    }

    void lex() {
        bool at_line_start = true;
        while (true) {
            if (at_line_start && brackets_.empty()) {
                int col = 0;
                int alt = 0;
                std::size_t p = pos_;
                while (p < src_.size()) {
                    char c = src_[p];
                    if (c == ' ') {
                        ++col;
                        ++alt;
                    } else if (c == '\t') {
                        col = (col / 8 + 1) * 8;
                        ++alt;
                    } else if (c == '\f') {
                        col = alt = 0;
                    } else {
                        break;
                    }
                    ++p;
                }
                if (p >= src_.size()) {
                    pos_ = p;
                    break;
                }
                if (src_[p] == '#' || newline_len(p) > 0) {
                    while (p < src_.size() && newline_len(p) == 0) ++p;
                    if (p >= src_.size()) {
                        pos_ = p;
                        break;
                    }
                    advance_line(p + newline_len(p));
                    continue;
                }
                pos_ = p;
                if (src_[p] == '\\' && p + 1 < src_.size() && newline_len(p + 1) == 0) {
                    fail_here("unexpected character after line continuation character");
                }
                indent_to(col, alt);
                at_line_start = false;
            }

            while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\f')) {
                ++pos_;
            }
            if (pos_ >= src_.size()) break;

            const unsigned char c = cur();
            if (c == '#') {
                while (pos_ < src_.size() && newline_len(pos_) == 0) ++pos_;
                continue;
            }
            if (std::size_t nl = newline_len(pos_); nl > 0) {
                if (brackets_.empty()) {
                    const std::size_t start = pos_;
                    const int col = col_of(pos_);
                    const int line = line_;
                    pos_ += nl;
                    Token t;
                    t.type = TokenType::Newline;
                    t.text = src_.substr(start, nl);
                    t.line = line;
                    t.col = col;
                    t.end_line = line;
                    t.end_col = col + static_cast<int>(nl);
                    out_.tokens.push_back(t);
                    advance_line(pos_);
                    at_line_start = true;
                } else {
                    advance_line(pos_ + nl);
                }
                continue;
            }
            if (c == '\\') {
                const std::size_t nl2 = newline_len(pos_ + 1);
                if (nl2 > 0) {
                    advance_line(pos_ + 1 + nl2);
                    if (pos_ >= src_.size()) fail_deferred("unexpected EOF while parsing");
                    continue;
                }
                if (pos_ + 1 >= src_.size()) fail_deferred("unexpected EOF while parsing");
                fail_here("unexpected character after line continuation character");
            }
            if (is_ident_start(c)) {
                lex_name();
                continue;
            }
            if (is_digit(c) || (c == '.' && is_digit(at(pos_ + 1)))) {
                lex_number();
                continue;
            }
            if (c == '"' || c == '\'') {
                lex_string(pos_, pos_);
                continue;
            }
            lex_op();
        }

        if (!brackets_.empty()) {
            const Bracket& b = brackets_.back();
            fail(SyntaxErrorKind::Syntax, std::string("'") + b.ch + "' was never closed", b.line, b.col, false);
        }
        if (!out_.tokens.empty() && out_.tokens.back().type != TokenType::Newline &&
            out_.tokens.back().type != TokenType::Dedent && out_.tokens.back().type != TokenType::Indent) {
            emit_marker(TokenType::Newline);
        }
        // End-of-input tokens sit on the last physical line.
        const std::size_t first_eof = out_.tokens.size();
        while (indents_.size() > 1) {
            indents_.pop_back();
            alt_indents_.pop_back();
            emit_marker(TokenType::Dedent);
        }
        emit_marker(TokenType::EndMarker);
        if (!src_.empty() && src_.back() == '\n' && line_ > 1) {
            for (std::size_t k = first_eof; k < out_.tokens.size(); ++k) {
                out_.tokens[k].line = out_.tokens[k].end_line = line_ - 1;
            }
        }
    }

    void indent_to(int col, int alt) {
        const auto tab_error = [&] {
            fail(SyntaxErrorKind::Tab, "inconsistent use of tabs and spaces in indentation", line_, col_of(pos_), false);
        };
        if (col == indents_.back()) {
            if (alt != alt_indents_.back()) tab_error();
        } else if (col > indents_.back()) {
            if (alt <= alt_indents_.back()) tab_error();
            indents_.push_back(col);
            alt_indents_.push_back(alt);
            emit_marker(TokenType::Indent);
        } else {
            while (indents_.size() > 1 && col < indents_.back()) {
                indents_.pop_back();
                alt_indents_.pop_back();
                emit_marker(TokenType::Dedent);
            }
            if (col != indents_.back()) {
                fail(SyntaxErrorKind::Indentation, "unindent does not match any outer indentation level", line_,
                     col_of(pos_), false);
            }
            if (alt != alt_indents_.back()) tab_error();
        }
    }

    void lex_name() {
        const std::size_t start = pos_;
        const int col = col_of(pos_);
        while (pos_ < src_.size() && is_ident_char(cur())) ++pos_;
        const std::string_view word = src_.substr(start, pos_ - start);
        if ((cur() == '"' || cur() == '\'') && is_string_prefix(word)) {
            lex_string(start, pos_);
            return;
        }
        emit(TokenType::Name, start, line_, col);
    }

    // Accepts a trailing keyword glued to a number ("1if x else y"); rejects other identifier chars.
    void verify_end_of_number(std::string_view kind) {
        const unsigned char c = cur();
        const auto ahead = [&](std::string_view rest) { return src_.substr(pos_ + 1).starts_with(rest); };
        bool keyword = false;
        switch (c) {
        case 'a': keyword = ahead("nd"); break;
        case 'e': keyword = ahead("lse"); break;
        case 'f': keyword = ahead("or"); break;
        case 'i': keyword = ahead("f") || ahead("n") || ahead("s"); break;
        case 'o': keyword = ahead("r"); break;
        case 'n': keyword = ahead("ot"); break;
        default: break;
        }
        if (keyword) return;
        if (is_ident_char(c)) fail_here("invalid " + std::string(kind) + " literal");
    }

    template <typename Pred>
    bool scan_digits(Pred pred, std::string_view kind, bool allow_leading_underscore) {
        bool any = false;
        bool first = true;
        while (true) {
            if (cur() == '_') {
                if (first && !allow_leading_underscore) break;
                ++pos_;
                if (!pred(cur())) fail_here("invalid " + std::string(kind) + " literal");
            }
            if (!pred(cur())) break;
            while (pred(cur())) {
                ++pos_;
                any = true;
            }
            first = false;
        }
        return any;
    }

    void lex_number() {
        const std::size_t start = pos_;
        const int col = col_of(pos_);
        const unsigned char c = cur();
        const unsigned char n1 = at(pos_ + 1) | 0x20;
        if (c == '0' && (n1 == 'x' || n1 == 'o' || n1 == 'b')) {
            pos_ += 2;
            if (n1 == 'x') {
                if (!scan_digits(is_hex, "hexadecimal", true)) fail_here("invalid hexadecimal literal");
                verify_end_of_number("hexadecimal");
            } else if (n1 == 'o') {
                if (!scan_digits(is_oct, "octal", true)) {
                    if (is_digit(cur())) fail_here(std::string("invalid digit '") + static_cast<char>(cur()) + "' in octal literal");
                    fail_here("invalid octal literal");
                }
                if (is_digit(cur())) fail_here(std::string("invalid digit '") + static_cast<char>(cur()) + "' in octal literal");
                verify_end_of_number("octal");
            } else {
                if (!scan_digits(is_bin, "binary", true)) {
                    if (is_digit(cur())) fail_here(std::string("invalid digit '") + static_cast<char>(cur()) + "' in binary literal");
                    fail_here("invalid binary literal");
                }
                if (is_digit(cur())) fail_here(std::string("invalid digit '") + static_cast<char>(cur()) + "' in binary literal");
                verify_end_of_number("binary");
            }
            emit(TokenType::Number, start, line_, col);
            return;
        }

        bool is_float = false;
        bool leading_zero_int = false;
        if (c != '.') {
            const bool starts_zero = c == '0';
            scan_digits(is_digit, "decimal", false);
            if (starts_zero) {
                for (std::size_t p = start; p < pos_; ++p) {
                    if (src_[p] != '0' && src_[p] != '_') leading_zero_int = true;
                }
            }
        }
        if (cur() == '.') {
            ++pos_;
            is_float = true;
            if (is_digit(cur())) scan_digits(is_digit, "decimal", false);
        }
        if ((cur() | 0x20) == 'e') {
            const std::size_t e_pos = pos_;
            ++pos_;
            bool signed_exp = false;
            if (cur() == '+' || cur() == '-') {
                ++pos_;
                signed_exp = true;
            }
            if (!is_digit(cur())) {
                if (signed_exp) fail_here("invalid decimal literal");
                pos_ = e_pos;
                verify_end_of_number("decimal");
                if (leading_zero_int && !is_float) {
                    fail(SyntaxErrorKind::Syntax,
                         "leading zeros in decimal integer literals are not permitted; use an 0o prefix for octal integers",
                         line_, col);
                }
                emit(TokenType::Number, start, line_, col);
                return;
            }
            scan_digits(is_digit, "decimal", false);
            is_float = true;
        }
        if ((cur() | 0x20) == 'j') {
            ++pos_;
            is_float = true;
        }
        verify_end_of_number("decimal");
        if (leading_zero_int && !is_float) {
            fail(SyntaxErrorKind::Syntax,
                 "leading zeros in decimal integer literals are not permitted; use an 0o prefix for octal integers",
                 line_, col);
        }
        emit(TokenType::Number, start, line_, col);
    }

    void lex_string(std::size_t start, std::size_t quote_pos) {
        const int line = line_;
        const int col = col_of(start);
        const char q = src_[quote_pos];
        const bool triple = at(quote_pos + 1) == static_cast<unsigned char>(q) &&
                            at(quote_pos + 2) == static_cast<unsigned char>(q);
        pos_ = quote_pos + (triple ? 3 : 1);
        while (true) {
            if (pos_ >= src_.size()) {
                fail(SyntaxErrorKind::Syntax,
                     std::string(triple ? "unterminated triple-quoted string literal" : "unterminated string literal") +
                         " (detected at line " + std::to_string(line_) + ")",
                     line, col);
            }
            const char c = src_[pos_];
            if (c == '\\') {
                ++pos_;
                if (std::size_t nl = newline_len(pos_); nl > 0) {
                    advance_line(pos_ + nl);
                } else if (pos_ < src_.size()) {
                    ++pos_;
                }
                continue;
            }
            if (std::size_t nl = newline_len(pos_); nl > 0) {
                if (!triple) {
                    fail(SyntaxErrorKind::Syntax,
                         "unterminated string literal (detected at line " + std::to_string(line_) + ")", line, col);
                }
                advance_line(pos_ + nl);
                continue;
            }
            if (c == q) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (at(pos_ + 1) == static_cast<unsigned char>(q) && at(pos_ + 2) == static_cast<unsigned char>(q)) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        Token t;
        t.type = TokenType::String;
        t.text = src_.substr(start, pos_ - start);
        t.line = line;
        t.col = col;
        t.end_line = line_;
        t.end_col = col_of(pos_);
        out_.tokens.push_back(t);
    }

    void lex_op() {
        const std::size_t start = pos_;
        const int col = col_of(pos_);
        const std::string_view rest = src_.substr(pos_);
        std::size_t len = 0;
        for (auto op : kOps3) {
            if (rest.starts_with(op)) {
                len = 3;
                break;
            }
        }
        if (len == 0 && (rest.starts_with(">>=") || rest.starts_with("<<="))) len = 3;
        if (len == 0) {
            for (auto op : kOps2) {
                if (rest.starts_with(op)) {
                    len = 2;
                    break;
                }
            }
        }
        const char c = rest[0];
        if (len == 0) {
            if (kOps1.find(c) == std::string_view::npos) {
                fail_deferred(c == '!' ? "invalid syntax" : std::string("invalid character '") + c + "'");
            }
            len = 1;
        }
        if (len == 1 && (c == '(' || c == '[' || c == '{')) {
            brackets_.push_back({c, line_, col});
        } else if (len == 1 && (c == ')' || c == ']' || c == '}')) {
            if (brackets_.empty()) fail_here(std::string("unmatched '") + c + "'");
            const char open = brackets_.back().ch;
            const char expected = open == '(' ? ')' : open == '[' ? ']' : '}';
            if (c != expected) {
                fail_here(std::string("closing parenthesis '") + c + "' does not match opening parenthesis '" + open + "'");
            }
            brackets_.pop_back();
        }
        pos_ += len;
        emit(TokenType::Op, start, line_, col);
    }
};

}  // namespace

bool is_keyword(std::string_view word) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

TokenStream tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace pkgraph::python
