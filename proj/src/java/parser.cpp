#include "oraclegen/java/parser.hpp"

#include <algorithm>
#include <array>

namespace oraclegen::java {
namespace {

constexpr std::array<std::string_view, 14> kModifiers = {
    "public",   "protected", "private",      "static",    "final",    "abstract", "native",
    "synchronized", "transient", "volatile", "strictfp", "default", "sealed", "non-sealed",
};

bool is_modifier(std::string_view s) {
    return std::find(kModifiers.begin(), kModifiers.end(), s) != kModifiers.end();
}

class TokenCursor {
public:
    TokenCursor(std::string_view src, LexResult lx) : src_(src), lx_(std::move(lx)) {}

protected:
    const Token& cur() const { return lx_.tokens[i_]; }
    const Token& at(std::size_t k) const {
        return lx_.tokens[std::min(i_ + k, lx_.tokens.size() - 1)];
    }
    bool done() const { return cur().kind == TokenKind::End; }
    void advance() {
        if (!done()) ++i_;
    }
    bool accept(std::string_view s) {
        if (cur().is(s)) {
            advance();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        std::string found = done() ? "end of input" : "'" + std::string(cur().text) + "'";
        throw SyntaxError(msg + ", found " + found, cur().line);
    }
    void expect(std::string_view s) {
        if (!accept(s)) fail("expected '" + std::string(s) + "'");
    }
    std::string expect_ident() {
        if (!cur().is_ident()) fail("expected identifier");
        std::string out(cur().text);
        advance();
        return out;
    }

    // At an opening delimiter; moves past its matching closer. Other bracket
    // kinds nested inside must balance too.
    void skip_balanced() {
        std::vector<char> stack;
        do {
            const Token& t = cur();
            if (done()) fail("unbalanced delimiters");
            if (t.kind == TokenKind::Punct && t.text.size() == 1) {
                char c = t.text[0];
                if (c == '(' || c == '[' || c == '{') {
                    stack.push_back(c);
                } else if (c == ')' || c == ']' || c == '}') {
                    char open = c == ')' ? '(' : c == ']' ? '[' : '{';
                    if (stack.empty() || stack.back() != open) fail("mismatched delimiter");
                    stack.pop_back();
                }
            }
            advance();
        } while (!stack.empty());
    }

    void skip_angles() {
        int depth = 0;
        do {
            if (done()) fail("unbalanced type arguments");
            if (cur().is("<")) ++depth;
            if (cur().is(">")) --depth;
            advance();
        } while (depth > 0);
    }

    // Source tokens [from, to) joined with single spaces where the source had
    // any gap (whitespace or comments).
    std::string render(std::size_t from, std::size_t to) const {
        std::string out;
        for (std::size_t k = from; k < to; ++k) {
            const Token& t = lx_.tokens[k];
            if (k > from && t.begin > lx_.tokens[k - 1].end) out += ' ';
            out += t.text;
        }
        return out;
    }

    std::string_view src_;
    LexResult lx_;
    std::size_t i_ = 0;
};

struct Modifiers {
    std::vector<std::string> annotations;
    std::vector<std::string> keywords;
    std::size_t first_token = 0;
    std::size_t first_keyword = SIZE_MAX;  // first non-annotation token of the declaration
};

class DeclParser : TokenCursor {
public:
    using TokenCursor::TokenCursor;

    CompilationUnit run() {
        CompilationUnit cu;
        // Package annotations are legal; skip them.
        while (cur().is("@") && !at(1).is("interface") && at(1).is_ident() && is_package_ahead()) {
            skip_annotation();
        }
        if (accept("package")) {
            cu.package = qualified_name();
            expect(";");
        }
        while (cur().is("import")) {
            advance();
            accept("static");
            std::string name = qualified_name();
            if (accept(".")) {
                expect("*");
                name += ".*";
            }
            expect(";");
            cu.imports.push_back(std::move(name));
        }
        while (!done()) {
            if (accept(";")) continue;
            Modifiers mods = modifiers();
            if (!starts_type_decl()) fail("expected type declaration");
            cu.types.push_back(type_decl(mods));
        }
        return cu;
    }

private:
    bool is_package_ahead() const {
        // Skip over a run of annotations and see if `package` follows.
        std::size_t k = i_;
        const auto& toks = lx_.tokens;
        while (k < toks.size() && toks[k].is("@")) {
            ++k;
            while (k < toks.size() && (toks[k].is_ident() || toks[k].is("."))) ++k;
            if (k < toks.size() && toks[k].is("(")) {
                int depth = 0;
                do {
                    if (toks[k].is("(")) ++depth;
                    if (toks[k].is(")")) --depth;
                    ++k;
                } while (depth > 0 && k < toks.size());
            }
        }
        return k < toks.size() && toks[k].is("package");
    }

    std::string qualified_name() {
        std::string name = expect_ident();
        while (cur().is(".") && at(1).is_ident()) {
            advance();
            name += '.';
            name += expect_ident();
        }
        return name;
    }

    std::string skip_annotation() {
        expect("@");
        std::string name = qualified_name();
        if (cur().is("(")) skip_balanced();
        auto dot = name.rfind('.');
        return dot == std::string::npos ? name : name.substr(dot + 1);
    }

    Modifiers modifiers() {
        Modifiers m;
        m.first_token = i_;
        while (true) {
            if (cur().is("@") && !at(1).is("interface")) {
                m.annotations.push_back(skip_annotation());
                continue;
            }
            if (cur().is("non") && at(1).is("-") && at(2).is("sealed")) {
                if (m.first_keyword == SIZE_MAX) m.first_keyword = i_;
                m.keywords.emplace_back("non-sealed");
                advance();
                advance();
                advance();
                continue;
            }
            if (cur().is_ident() && is_modifier(cur().text) &&
                // `default` opens an annotation-element default or a switch label
                // elsewhere; only treat it as modifier when a declaration follows.
                !(cur().is("default") && (at(1).is(":") || at(1).is("->")))) {
                if (m.first_keyword == SIZE_MAX) m.first_keyword = i_;
                m.keywords.emplace_back(cur().text);
                advance();
                continue;
            }
            break;
        }
        if (m.first_keyword == SIZE_MAX) m.first_keyword = i_;
        return m;
    }

    bool starts_type_decl() const {
        if (cur().is("class") || cur().is("interface") || cur().is("enum")) return true;
        if (cur().is("@") && at(1).is("interface")) return true;
        return cur().is("record") && at(1).is_ident() && (at(2).is("(") || at(2).is("<"));
    }

    static std::string visibility_of(const Modifiers& m, bool interface_member) {
        for (const auto& k : m.keywords) {
            if (k == "public" || k == "protected" || k == "private") return k;
        }
        return interface_member ? "public" : "package";
    }

    // Type rendered with canonical spacing: "Map<String, List<Integer>>", "int[]".
    std::string type() {
        while (cur().is("@")) skip_annotation();
        std::string out;
        if (!cur().is_ident()) fail("expected type");
        out += cur().text;
        advance();
        if (cur().is("<")) out += type_args();
        while (cur().is(".") && at(1).is_ident()) {
            advance();
            out += '.';
            out += cur().text;
            advance();
            if (cur().is("<")) out += type_args();
        }
        while (true) {
            while (cur().is("@")) skip_annotation();
            if (cur().is("[") && at(1).is("]")) {
                advance();
                advance();
                out += "[]";
                continue;
            }
            break;
        }
        if (accept("...")) out += "...";
        return out;
    }

    std::string type_args() {
        expect("<");
        std::string out = "<";
        bool first = true;
        while (!cur().is(">")) {
            if (!first) {
                expect(",");
                out += ", ";
            }
            first = false;
            while (cur().is("@")) skip_annotation();
            if (accept("?")) {
                out += '?';
                if (cur().is("extends") || cur().is("super")) {
                    out += ' ';
                    out += cur().text;
                    out += ' ';
                    advance();
                    out += type();
                }
            } else {
                out += type();
            }
            while (accept("&")) out += " & " + type();
        }
        expect(">");
        out += '>';
        return out;
    }

    static std::string strip_type_args(const std::string& t) {
        auto lt = t.find('<');
        return lt == std::string::npos ? t : t.substr(0, lt);
    }

    std::string attached_comment(std::size_t decl_token) const {
        const auto& toks = lx_.tokens;
        std::size_t lo = decl_token == 0 ? 0 : toks[decl_token - 1].end;
        std::size_t hi = toks[decl_token].begin;
        int prev_line = decl_token == 0 ? 0 : toks[decl_token - 1].line;
        int decl_line = toks[decl_token].line;
        const auto& cs = lx_.comments;

        // Last comment in the gap before the declaration.
        auto it = std::find_if(cs.rbegin(), cs.rend(),
                               [&](const Comment& c) { return c.end <= hi && c.begin >= lo; });
        if (it == cs.rend()) return {};
        std::size_t idx = static_cast<std::size_t>(cs.rend() - it) - 1;
        const Comment& last = cs[idx];
        if (decl_token > 0 && last.first_line == prev_line) return {};  // trailing comment of previous code

        if (last.kind == CommentKind::Doc) return strip_comment_markers(src_.substr(last.begin, last.end - last.begin));
        if (last.last_line + 1 < decl_line) return {};  // blank line in between
        if (last.kind == CommentKind::Block) return strip_comment_markers(src_.substr(last.begin, last.end - last.begin));

        // Consecutive line comments, each on its own line, with no blank line.
        std::size_t first = idx;
        while (first > 0) {
            const Comment& prev = cs[first - 1];
            if (prev.kind != CommentKind::Line || prev.begin < lo) break;
            if (prev.last_line + 1 != cs[first].first_line) break;
            if (decl_token > 0 && prev.first_line == prev_line) break;
            --first;
        }
        std::string joined;
        for (std::size_t k = first; k <= idx; ++k) {
            if (k > first) joined += '\n';
            joined += strip_comment_markers(src_.substr(cs[k].begin, cs[k].end - cs[k].begin));
        }
        return joined;
    }

    TypeDecl type_decl(const Modifiers& mods) {
        TypeDecl td;
        td.decl.begin = lx_.tokens[mods.first_token].begin;
        std::size_t sig_start = mods.first_keyword;
        if (cur().is("@")) {
            td.kind = TypeKind::Annotation;
            advance();
            advance();
        } else {
            std::string_view kw = cur().text;
            td.kind = kw == "class"       ? TypeKind::Class
                      : kw == "interface" ? TypeKind::Interface
                      : kw == "enum"      ? TypeKind::Enum
                                          : TypeKind::Record;
            advance();
        }
        td.name = expect_ident();
        if (cur().is("<")) skip_angles();
        if (td.kind == TypeKind::Record) {
            expect("(");
            while (!cur().is(")")) {
                while (cur().is("@")) skip_annotation();
                FieldDecl f;
                f.type = type();
                f.name = expect_ident();
                f.visibility = "private";
                td.fields.push_back(std::move(f));
                if (!accept(",")) break;
            }
            expect(")");
        }
        while (true) {
            if (accept("extends")) {
                if (td.kind == TypeKind::Interface) {
                    do td.interfaces.push_back(strip_type_args(type()));
                    while (accept(","));
                } else {
                    td.super_class = strip_type_args(type());
                }
            } else if (accept("implements")) {
                do td.interfaces.push_back(strip_type_args(type()));
                while (accept(","));
            } else if (accept("permits")) {
                do type();
                while (accept(","));
            } else {
                break;
            }
        }
        td.signature = render(sig_start, i_);
        if (!cur().is("{")) fail("expected '{' to open type body");
        advance();
        bool interface_like = td.kind == TypeKind::Interface || td.kind == TypeKind::Annotation;
        if (td.kind == TypeKind::Enum) enum_constants();
        members(td, interface_like);
        td.decl.end = lx_.tokens[i_ - 1].end;
        return td;
    }

    void enum_constants() {
        while (!cur().is(";") && !cur().is("}")) {
            while (cur().is("@")) skip_annotation();
            expect_ident();
            if (cur().is("(")) skip_balanced();
            if (cur().is("{")) skip_balanced();
            if (!accept(",")) break;
        }
        accept(";");
    }

    void members(TypeDecl& td, bool interface_like) {
        while (!accept("}")) {
            if (done()) fail("unterminated type body");
            if (accept(";")) continue;
            if (cur().is("{")) {
                skip_balanced();
                continue;
            }
            if (cur().is("static") && at(1).is("{")) {
                advance();
                skip_balanced();
                continue;
            }
            Modifiers mods = modifiers();
            if (starts_type_decl()) {
                // Nested and inner types are not part of the flat class model.
                while (!cur().is("{")) {
                    if (done()) fail("unterminated nested type");
                    if (cur().is("(")) {
                        skip_balanced();
                    } else {
                        advance();
                    }
                }
                skip_balanced();
                continue;
            }
            member(td, mods, interface_like);
        }
    }

    void member(TypeDecl& td, const Modifiers& mods, bool interface_like) {
        std::size_t decl_token = mods.first_token;
        std::size_t sig_start = mods.first_keyword;
        if (cur().is("<")) skip_angles();

        if (td.kind == TypeKind::Record && cur().is_ident() && cur().text == td.name && at(1).is("{")) {
            advance();  // compact canonical constructor
            skip_balanced();
            return;
        }

        MethodDecl m;
        if (cur().is_ident() && cur().text == td.name && at(1).is("(")) {
            m.is_constructor = true;
            m.name = expect_ident();
        } else {
            m.return_type = type();
            m.name = expect_ident();
        }

        if (!cur().is("(")) {
            fields(td, mods, interface_like, m.return_type, m.name);
            return;
        }

        params(m);
        while (cur().is("[") && at(1).is("]")) {
            advance();
            advance();
            m.return_type += "[]";
        }
        if (accept("throws")) {
            do type();
            while (accept(","));
        }
        m.signature = render(sig_start, i_);
        m.visibility = visibility_of(mods, interface_like);
        m.annotations = mods.annotations;
        m.comment = attached_comment(decl_token);
        m.decl.begin = lx_.tokens[decl_token].begin;
        m.header = Span{m.decl.begin, lx_.tokens[i_ - 1].end};
        if (cur().is("{")) {
            std::size_t open = cur().end;
            skip_balanced();
            std::size_t close = lx_.tokens[i_ - 1].begin;
            m.body = Span{open, close};
        } else if (accept("default")) {
            // annotation element default value
            while (!cur().is(";")) {
                if (done()) fail("unterminated annotation element");
                if (cur().is("(") || cur().is("{") || cur().is("[")) {
                    skip_balanced();
                } else {
                    advance();
                }
            }
            expect(";");
        } else {
            expect(";");
        }
        m.decl.end = lx_.tokens[i_ - 1].end;
        td.methods.push_back(std::move(m));
    }

    void fields(TypeDecl& td, const Modifiers& mods, bool interface_like, const std::string& first_type,
                std::string first_name) {
        std::string vis = visibility_of(mods, interface_like);
        std::string name = std::move(first_name);
        while (true) {
            std::string t = first_type;
            while (cur().is("[") && at(1).is("]")) {
                advance();
                advance();
                t += "[]";
            }
            td.fields.push_back(FieldDecl{name, t, vis});
            if (accept("=")) skip_initializer();
            if (accept(";")) return;
            expect(",");
            name = expect_ident();
        }
    }

    void skip_initializer() {
        while (true) {
            if (done()) fail("unterminated field initializer");
            if (cur().is(";")) return;
            if (cur().is(",") && at(1).is_ident() &&
                (at(2).is("=") || at(2).is(",") || at(2).is(";") || at(2).is("["))) {
                return;
            }
            if (cur().is("(") || cur().is("{") || cur().is("[")) {
                skip_balanced();
            } else if (cur().is(")") || cur().is("}") || cur().is("]")) {
                fail("unbalanced delimiter in initializer");
            } else {
                advance();
            }
        }
    }

    void params(MethodDecl& m) {
        expect("(");
        while (!cur().is(")")) {
            while (true) {
                if (cur().is("@")) {
                    skip_annotation();
                } else if (cur().is("final")) {
                    advance();
                } else {
                    break;
                }
            }
            ParamDecl p;
            p.type = type();
            if (cur().is("this")) {  // receiver parameter
                advance();
                if (!accept(",")) break;
                continue;
            }
            if (cur().is_ident() && at(1).is(".") && at(2).is("this")) {
                advance();
                advance();
                advance();
                if (!accept(",")) break;
                continue;
            }
            p.name = expect_ident();
            while (cur().is("[") && at(1).is("]")) {
                advance();
                advance();
                p.type += "[]";
            }
            m.params.push_back(std::move(p));
            if (!accept(",")) break;
        }
        expect(")");
    }
};

class StmtParser : TokenCursor {
public:
    using TokenCursor::TokenCursor;

    std::vector<Stmt> run() {
        std::vector<Stmt> out;
        while (!done()) out.push_back(statement());
        return out;
    }

private:
    Span span_from(std::size_t first) const {
        return Span{lx_.tokens[first].begin, lx_.tokens[i_ - 1].end};
    }

    Slot braced_slot() {
        if (!cur().is("{")) fail("expected '{'");
        Slot s;
        s.braced = true;
        s.inner.begin = cur().end;
        advance();
        while (!cur().is("}")) {
            if (done()) fail("unterminated block");
            s.children.push_back(statement());
        }
        s.inner.end = cur().begin;
        advance();
        return s;
    }

    Slot slot() {
        if (cur().is("{")) return braced_slot();
        Slot s;
        s.children.push_back(statement());
        s.inner = s.children.back().span;
        return s;
    }

    void parens() {
        if (!cur().is("(")) fail("expected '('");
        skip_balanced();
    }

    bool local_type_ahead() const {
        std::size_t k = 0;
        while (at(k).is("final") || at(k).is("abstract") || at(k).is("static") || at(k).is("strictfp")) ++k;
        if (at(k).is("class") || at(k).is("interface") || at(k).is("enum")) return true;
        return at(k).is("record") && at(k + 1).is_ident() && (at(k + 2).is("(") || at(k + 2).is("<"));
    }

    Stmt statement() {
        std::size_t first = i_;
        Stmt st;
        st.line = cur().line;
        if (cur().is("{")) {
            st.kind = StmtKind::Block;
            st.slots.push_back(braced_slot());
        } else if (cur().is(";")) {
            st.kind = StmtKind::Empty;
            advance();
        } else if (cur().is("if")) {
            st.kind = StmtKind::Compound;
            advance();
            parens();
            st.slots.push_back(slot());
            if (accept("else")) st.slots.push_back(slot());
        } else if (cur().is("for") || cur().is("while")) {
            st.kind = StmtKind::Compound;
            advance();
            parens();
            st.slots.push_back(slot());
        } else if (cur().is("do")) {
            st.kind = StmtKind::Compound;
            advance();
            st.slots.push_back(slot());
            expect("while");
            parens();
            expect(";");
        } else if (cur().is("synchronized") && at(1).is("(")) {
            st.kind = StmtKind::Compound;
            advance();
            parens();
            st.slots.push_back(braced_slot());
        } else if (cur().is("try")) {
            st.kind = StmtKind::Try;
            advance();
            if (cur().is("(")) {
                std::size_t r = i_;
                parens();
                st.resources = span_from(r);
            }
            st.slots.push_back(braced_slot());
            while (cur().is("catch")) {
                std::size_t c = i_;
                advance();
                parens();
                CatchClause cc;
                cc.header = span_from(c);
                cc.body = braced_slot();
                st.catches.push_back(std::move(cc));
            }
            if (accept("finally")) st.finally_block = braced_slot();
            if (st.catches.empty() && !st.finally_block && !st.resources) fail("try without catch or finally");
        } else if (cur().is("switch") && at(1).is("(")) {
            st.kind = StmtKind::Opaque;
            advance();
            parens();
            if (!cur().is("{")) fail("expected switch body");
            skip_balanced();
        } else if (local_type_ahead()) {
            st.kind = StmtKind::Opaque;
            while (!cur().is("{")) {
                if (done()) fail("unterminated local type");
                if (cur().is("(")) {
                    skip_balanced();
                } else {
                    advance();
                }
            }
            skip_balanced();
        } else if (cur().is_ident() && at(1).is(":") && !is_java_keyword(cur().text)) {
            st.kind = StmtKind::Compound;
            advance();
            advance();
            st.slots.push_back(slot());
        } else if (cur().is("}") || cur().is(")") || cur().is("]")) {
            fail("unexpected closing delimiter");
        } else {
            simple(st);
        }
        st.span = span_from(first);
        return st;
    }

    void simple(Stmt& st) {
        std::size_t first = i_;
        while (!cur().is(";")) {
            if (done()) fail("expected ';'");
            if (cur().is("(") || cur().is("{") || cur().is("[")) {
                skip_balanced();
            } else if (cur().is(")") || cur().is("}") || cur().is("]")) {
                fail("unbalanced delimiter");
            } else {
                advance();
            }
        }
        std::size_t semi = i_;
        advance();
        detect_call(st, first, semi);
    }

    // `q1.q2.name(args);` with nothing else in the statement.
    void detect_call(Stmt& st, std::size_t first, std::size_t semi) const {
        const auto& toks = lx_.tokens;
        std::size_t k = first;
        if (!toks[k].is_ident() || (is_java_keyword(toks[k].text) && !toks[k].is("this") && !toks[k].is("super"))) {
            return;
        }
        std::vector<std::string_view> parts{toks[k].text};
        ++k;
        while (toks[k].is(".") && toks[k + 1].is_ident()) {
            parts.push_back(toks[k + 1].text);
            k += 2;
        }
        if (!toks[k].is("(")) return;
        int depth = 0;
        std::size_t close = k;
        for (; close < semi; ++close) {
            if (toks[close].is("(")) ++depth;
            if (toks[close].is(")") && --depth == 0) break;
        }
        if (close + 1 != semi) return;
        st.call_name = std::string(parts.back());
        for (std::size_t p = 0; p + 1 < parts.size(); ++p) {
            if (p) st.call_qualifier += '.';
            st.call_qualifier += parts[p];
        }
    }
};

}  // namespace

CompilationUnit parse_compilation_unit(std::string_view source) {
    return DeclParser(source, lex(source)).run();
}

std::vector<Stmt> parse_block_statements(std::string_view body) {
    return StmtParser(body, lex(body)).run();
}

}  // namespace oraclegen::java
