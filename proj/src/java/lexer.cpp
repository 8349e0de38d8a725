#include "oraclegen/java/lexer.hpp"

#include <algorithm>
#include <array>

namespace oraclegen::java {
namespace {

bool ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool ident_part(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Longest first. `<` and `>` deliberately absent from multi-char forms.
constexpr std::array<std::string_view, 16> kMultiPunct = {
    "...", "->", "::", "==", "!=", "&&", "||", "++",
    "--",  "+=", "-=", "*=", "/=", "%=", "&=", "|=",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_space();
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (c == '/' && peek(1) == '/') {
                line_comment(out);
            } else if (c == '/' && peek(1) == '*') {
                block_comment(out);
            } else if (ident_start(static_cast<unsigned char>(c))) {
                auto start = pos_;
                while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
                push(out, TokenKind::Identifier, start);
            } else if (is_digit(static_cast<unsigned char>(c)) ||
                       (c == '.' && is_digit(static_cast<unsigned char>(peek(1))))) {
                number(out);
            } else if (c == '"') {
                string_literal(out);
            } else if (c == '\'') {
                char_literal(out);
            } else {
                punct(out);
            }
        }
        Token end;
        end.kind = TokenKind::End;
        end.begin = end.end = src_.size();
        end.line = line_;
        out.tokens.push_back(end);
        return out;
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') ++line_;
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
                advance();
            } else {
                break;
            }
        }
    }

    void push(LexResult& out, TokenKind kind, std::size_t start, int line = -1) {
        Token t;
        t.kind = kind;
        t.begin = start;
        t.end = pos_;
        t.line = line < 0 ? line_ : line;
        t.text = src_.substr(start, pos_ - start);
        out.tokens.push_back(t);
    }

    void line_comment(LexResult& out) {
        Comment c;
        c.kind = CommentKind::Line;
        c.begin = pos_;
        c.first_line = c.last_line = line_;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        c.end = pos_;
        out.comments.push_back(c);
    }

    void block_comment(LexResult& out) {
        Comment c;
        c.begin = pos_;
        c.first_line = line_;
        c.kind = (peek(2) == '*' && peek(3) != '/') ? CommentKind::Doc : CommentKind::Block;
        pos_ += 2;
        while (true) {
            if (pos_ >= src_.size()) throw LexError("unterminated comment", c.first_line);
            if (src_[pos_] == '*' && peek(1) == '/') {
                pos_ += 2;
                break;
            }
            advance();
        }
        c.end = pos_;
        c.last_line = line_;
        out.comments.push_back(c);
    }

    void number(LexResult& out) {
        auto start = pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (ident_part(static_cast<unsigned char>(c)) || c == '.') {
                bool exponent = (c == 'e' || c == 'E' || c == 'p' || c == 'P');
                bool hex = start + 1 < src_.size() && src_[start] == '0' &&
                           (src_[start + 1] == 'x' || src_[start + 1] == 'X');
                ++pos_;
                if (exponent && (peek(0) == '+' || peek(0) == '-') && !(hex && (c == 'e' || c == 'E'))) {
                    ++pos_;
                }
            } else {
                break;
            }
        }
        push(out, TokenKind::Number, start);
    }

    void string_literal(LexResult& out) {
        auto start = pos_;
        int line = line_;
        if (peek(1) == '"' && peek(2) == '"') {
            pos_ += 3;
            while (true) {
                if (pos_ >= src_.size()) throw LexError("unterminated text block", line);
                if (src_[pos_] == '\\') {
                    advance();
                    if (pos_ < src_.size()) advance();
                    continue;
                }
                if (src_[pos_] == '"' && peek(1) == '"' && peek(2) == '"') {
                    pos_ += 3;
                    break;
                }
                advance();
            }
            push(out, TokenKind::String, start, line);
            return;
        }
        ++pos_;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') throw LexError("unterminated string literal", line);
            if (src_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (src_[pos_] == '"') {
                ++pos_;
                break;
            }
            ++pos_;
        }
        push(out, TokenKind::String, start, line);
    }

    void char_literal(LexResult& out) {
        auto start = pos_;
        ++pos_;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') throw LexError("unterminated character literal", line_);
            if (src_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (src_[pos_] == '\'') {
                ++pos_;
                break;
            }
            ++pos_;
        }
        push(out, TokenKind::Char, start);
    }

    void punct(LexResult& out) {
        auto start = pos_;
        auto rest = src_.substr(pos_);
        for (auto p : kMultiPunct) {
            if (rest.substr(0, p.size()) == p) {
                pos_ += p.size();
                push(out, TokenKind::Punct, start);
                return;
            }
        }
        unsigned char c = static_cast<unsigned char>(src_[pos_]);
        if (c < 0x20 && c != '\t') throw LexError("unexpected control character", line_);
        ++pos_;
        push(out, TokenKind::Punct, start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

constexpr std::array<std::string_view, 51> kKeywords = {
    "abstract", "assert",     "boolean",  "break",      "byte",      "case",      "catch",
    "char",     "class",      "const",    "continue",   "default",   "do",        "double",
    "else",     "enum",       "extends",  "final",      "finally",   "float",     "for",
    "goto",     "if",         "implements", "import",   "instanceof", "int",      "interface",
    "long",     "native",     "new",      "package",    "private",   "protected", "public",
    "return",   "short",      "static",   "strictfp",   "super",     "switch",    "synchronized",
    "this",     "throw",      "throws",   "transient",  "try",       "void",      "volatile",
    "while",    "_",
};

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

bool is_java_keyword(std::string_view word) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::string strip_comment_markers(std::string_view raw) {
    std::vector<std::string> lines;
    bool block = raw.substr(0, 2) == "/*";
    if (block) {
        raw.remove_prefix(2);
        while (!raw.empty() && raw.front() == '*') raw.remove_prefix(1);
        if (raw.size() >= 2 && raw.substr(raw.size() - 2) == "*/") raw.remove_suffix(2);
        while (!raw.empty() && raw.back() == '*') raw.remove_suffix(1);
    }

    std::size_t start = 0;
    while (start <= raw.size()) {
        auto nl = raw.find('\n', start);
        auto line = raw.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        line.remove_prefix(i);
        if (block) {
            if (!line.empty() && line.front() == '*') {
                while (!line.empty() && line.front() == '*') line.remove_prefix(1);
                if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            }
        } else if (line.substr(0, 2) == "//") {
            line.remove_prefix(2);
            while (!line.empty() && line.front() == '/') line.remove_prefix(1);
            if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        }
        lines.emplace_back(rtrim(line));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }

    auto blank = [](const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; };
    while (!lines.empty() && blank(lines.front())) lines.erase(lines.begin());
    while (!lines.empty() && blank(lines.back())) lines.pop_back();

    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

}  // namespace oraclegen::java
