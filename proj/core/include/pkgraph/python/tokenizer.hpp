// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pkgraph::python {

enum class TokenType { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker, Error };

/// One lexical token. `text` views into the tokenized source, which must outlive the token.
/// Lines are 1-based, columns are 0-based byte offsets.
struct Token {
    TokenType type = TokenType::EndMarker;
    std::string_view text;
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
};

enum class SyntaxErrorKind { Syntax, Indentation, Tab };

/// A syntax error the way the reference interpreter would classify it.
struct SyntaxIssue {
    SyntaxErrorKind kind = SyntaxErrorKind::Syntax;
    std::string message;
    int line = 0;
    int col = 0;
};

std::string_view to_string(SyntaxErrorKind kind) noexcept;

/// Tokens up to the first lexical error. When `error` is set the last token has type Error
/// and the parser reports the issue only if it actually reaches that token.
struct TokenStream {
    std::vector<Token> tokens;
    std::optional<SyntaxIssue> error;
    // Set when the lexical error outranks a grammar error found earlier in the file. Errors at
    // end of input, dedent mismatches and tab errors only surface when the parser reaches them.
    bool error_preempts = false;
};

TokenStream tokenize(std::string_view source);

bool is_keyword(std::string_view word) noexcept;

}  // namespace pkgraph::python
