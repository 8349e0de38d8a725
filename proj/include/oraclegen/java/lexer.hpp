#pragma once

// Java lexical analysis. Produces a flat token vector with byte offsets into
// the source plus a side list of comments, so declaration and statement
// parsers can recover original text spans and attached comment blocks.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oraclegen::java {

enum class TokenKind {
    Identifier,  // includes keywords; use Token::is() to test spelling
    Number,
    String,
    Char,
    Punct,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    std::string_view text;

    bool is(std::string_view s) const noexcept {
        return (kind == TokenKind::Identifier || kind == TokenKind::Punct) && text == s;
    }
    bool is_ident() const noexcept { return kind == TokenKind::Identifier; }
};

enum class CommentKind { Line, Block, Doc };

struct Comment {
    CommentKind kind = CommentKind::Line;
    std::size_t begin = 0;
    std::size_t end = 0;
    int first_line = 1;
    int last_line = 1;
};

class LexError : public std::runtime_error {
public:
    LexError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct LexResult {
    std::vector<Token> tokens;  // always terminated by an End token
    std::vector<Comment> comments;
};

/// Tokenizes `source`. The returned string_views point into `source`, which
/// must outlive the result. `<` and `>` are always single-character tokens so
/// nested generic closers (`>>`) need no splitting.
LexResult lex(std::string_view source);

bool is_java_keyword(std::string_view word) noexcept;

/// Text of a comment with delimiters, leading asterisks and the conventional
/// single space after them removed. Interior whitespace is preserved; leading
/// and trailing blank lines are dropped.
std::string strip_comment_markers(std::string_view raw);

}  // namespace oraclegen::java
