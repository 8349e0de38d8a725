#include "oraclegen/prefix.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>

#include "oraclegen/error.hpp"
#include "oraclegen/java/parser.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::prefix {

namespace fs = std::filesystem;
using java::Stmt;
using java::StmtKind;

namespace {

constexpr std::array<std::string_view, 10> kOracleCalls = {
    "assertEquals", "assertTrue",    "assertFalse",       "assertNull", "assertNotNull",
    "assertSame",   "assertNotSame", "assertArrayEquals", "assertThat", "fail",
};

bool is_oracle(const Stmt& s) { return s.kind == StmtKind::Simple && is_oracle_call(s.call_name); }

bool has_placeholder_line(std::string_view text) { return count_placeholders(text) > 0; }

// try { ...; fail(...); } catch (...) { ... }
bool is_expected_exception_idiom(const Stmt& s) {
    if (s.kind != StmtKind::Try || s.catches.empty() || s.slots.empty()) return false;
    const auto& kids = s.slots.front().children;
    return std::any_of(kids.begin(), kids.end(),
                       [](const Stmt& k) { return k.kind == StmtKind::Simple && k.call_name == "fail"; });
}

std::string_view rtrim_spaces(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

class Rewriter {
public:
    explicit Rewriter(std::string_view body) : body_(body), placed_(has_placeholder_line(body)) {}

    std::string run(const std::vector<Stmt>& stmts) {
        std::string out = region(stmts, 0, body_.size(), /*top=*/true);
        return out;
    }

    int stripped() const { return stripped_; }
    bool exception() const { return exception_; }

private:
    std::string indent_of(std::size_t offset) const { return util::indentation_at(body_, offset); }

    // Position after trailing spaces and an optional `//` comment on the same
    // line; stops before the newline.
    std::size_t skip_trailing(std::size_t pos, std::size_t limit) const {
        std::size_t p = pos;
        while (p < limit && (body_[p] == ' ' || body_[p] == '\t' || body_[p] == '\r')) ++p;
        if (p + 1 < limit && body_[p] == '/' && body_[p + 1] == '/') {
            while (p < limit && body_[p] != '\n') ++p;
            return p;
        }
        if (p >= limit || body_[p] == '\n') return p;
        return pos;
    }

    void emit_placeholder(std::string& out, std::string_view gap, std::size_t stmt_begin) {
        if (gap.find('\n') != std::string_view::npos) {
            out += gap;
        } else {
            out += rtrim_spaces(gap);
            if (!out.empty()) {
                out += '\n';
                out += indent_of(stmt_begin);
            }
        }
        out += kPlaceholder;
        placed_ = true;
    }

    // After a placeholder, make sure whatever follows starts on a new line.
    std::size_t close_placeholder_line(std::string& out, std::size_t pos, std::size_t limit,
                                       std::size_t stmt_begin) const {
        std::size_t p = pos;
        while (p < limit && (body_[p] == ' ' || body_[p] == '\t')) ++p;
        if (p < limit && body_[p] != '\n' && body_[p] != '\r') {
            out += '\n';
            out += indent_of(stmt_begin);
            return p;
        }
        return pos;
    }

    std::string region(const std::vector<Stmt>& stmts, std::size_t begin, std::size_t end, bool top) {
        std::string out;
        std::size_t pos = begin;
        for (const auto& s : stmts) {
            std::string_view gap = body_.substr(pos, s.span.begin - pos);
            if (is_oracle(s)) {
                ++stripped_;
                if (!placed_) {
                    emit_placeholder(out, gap, s.span.begin);
                    pos = skip_trailing(s.span.end, end);
                    pos = close_placeholder_line(out, pos, end, s.span.begin);
                } else {
                    auto nl = gap.rfind('\n');
                    out += nl == std::string_view::npos ? rtrim_spaces(gap) : gap.substr(0, nl);
                    pos = skip_trailing(s.span.end, end);
                }
                continue;
            }
            out += gap;
            if (is_expected_exception_idiom(s)) {
                exception_ = true;
                out += flatten_try(s);
            } else if (!s.slots.empty() || s.kind == StmtKind::Try) {
                out += compound(s);
            } else {
                out += body_.substr(s.span.begin, s.span.end - s.span.begin);
            }
            pos = s.span.end;
        }
        if (top && !placed_) {
            if (stmts.empty()) {
                std::string_view all = body_.substr(begin, end - begin);
                auto nl = all.rfind('\n');
                std::string closing = nl == std::string_view::npos ? "" : std::string(all.substr(nl + 1));
                if (util::trim(closing).size()) closing.clear();
                out += rtrim_spaces(util::trim(all).empty() ? std::string_view{} : all.substr(0, nl == std::string_view::npos ? all.size() : nl));
                out += '\n';
                out += closing + "    ";
                out += kPlaceholder;
                out += '\n';
                out += closing;
                placed_ = true;
                return out;
            }
            std::size_t after = skip_trailing(pos, end);
            out += body_.substr(pos, after - pos);
            pos = after;
            out += '\n';
            out += indent_of(stmts.back().span.begin);
            out += kPlaceholder;
            placed_ = true;
        }
        out += body_.substr(pos, end - pos);
        return out;
    }

    std::string single(const Stmt& s) {
        if (is_oracle(s)) {
            ++stripped_;
            if (placed_) return "{ }";
            placed_ = true;
            std::string ind = indent_of(s.span.begin);
            return "{\n" + ind + "    " + std::string(kPlaceholder) + "\n" + ind + "}";
        }
        if (!s.slots.empty() || s.kind == StmtKind::Try) return compound(s);
        return std::string(body_.substr(s.span.begin, s.span.end - s.span.begin));
    }

    std::string compound(const Stmt& s) {
        std::vector<const java::Slot*> slots;
        for (const auto& sl : s.slots) slots.push_back(&sl);
        for (const auto& c : s.catches) slots.push_back(&c.body);
        if (s.finally_block) slots.push_back(&*s.finally_block);
        std::sort(slots.begin(), slots.end(),
                  [](const java::Slot* a, const java::Slot* b) { return a->inner.begin < b->inner.begin; });

        std::string out;
        std::size_t cursor = s.span.begin;
        for (const auto* sl : slots) {
            if (sl->braced) {
                out += body_.substr(cursor, sl->inner.begin - cursor);
                out += region(sl->children, sl->inner.begin, sl->inner.end, false);
                cursor = sl->inner.end;
            } else {
                const Stmt& c = sl->children.front();
                out += body_.substr(cursor, c.span.begin - cursor);
                out += single(c);
                cursor = c.span.end;
            }
        }
        out += body_.substr(cursor, s.span.end - cursor);
        return out;
    }

    // Replaces the try statement with the statements of its try block,
    // re-indented to the try statement's level. Catch/finally are dropped.
    std::string flatten_try(const Stmt& s) {
        const java::Slot& block = s.slots.front();
        std::string inner = region(block.children, block.inner.begin, block.inner.end, false);
        std::string outer_indent = indent_of(s.span.begin);
        std::size_t delta = 0;
        if (!block.children.empty()) {
            std::string inner_indent = indent_of(block.children.front().span.begin);
            if (inner_indent.size() > outer_indent.size()) delta = inner_indent.size() - outer_indent.size();
        }

        std::vector<std::string> lines = util::split_lines(inner);
        while (!lines.empty() && util::trim(lines.front()).empty()) lines.erase(lines.begin());
        while (!lines.empty() && util::trim(lines.back()).empty()) lines.pop_back();
        std::string out;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string_view line = lines[i];
            if (i == 0) {
                line = util::trim(line);
            } else {
                std::size_t lead = 0;
                while (lead < line.size() && lead < delta && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
                line.remove_prefix(lead);
                out += '\n';
            }
            out += rtrim_spaces(line);
        }
        return out;
    }

    std::string_view body_;
    bool placed_;
    int stripped_ = 0;
    bool exception_ = false;
};

std::optional<std::size_t> first_oracle_offset(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
        if (is_oracle(s)) return s.span.begin;
        std::vector<const java::Slot*> slots;
        for (const auto& sl : s.slots) slots.push_back(&sl);
        for (const auto& c : s.catches) slots.push_back(&c.body);
        if (s.finally_block) slots.push_back(&*s.finally_block);
        for (const auto* sl : slots) {
            if (auto off = first_oracle_offset(sl->children)) return off;
        }
    }
    return std::nullopt;
}

std::vector<Stmt> parse_body(std::string_view body) {
    try {
        return java::parse_block_statements(body);
    } catch (const std::exception& e) {
        throw PreprocessError(std::string("test body does not parse: ") + e.what());
    }
}

std::string strip_suffixes(const std::string& suite) {
    for (std::string_view suffix : {"_ESTest", "Tests", "Test", "TestCase", "IT"}) {
        if (suite.size() > suffix.size() && suite.compare(suite.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return suite.substr(0, suite.size() - suffix.size());
        }
    }
    if (suite.rfind("Test", 0) == 0 && suite.size() > 4) return suite.substr(4);
    return suite;
}

struct CallSite {
    std::size_t offset;
    std::string name;
    std::string root;  // receiver root identifier, empty when unknown
    std::size_t args;
    bool constructor;
};

std::vector<CallSite> call_sites(std::string_view body, std::size_t cutoff) {
    java::LexResult lx = java::lex(body);
    const auto& t = lx.tokens;
    std::vector<CallSite> out;
    auto count_args = [&](std::size_t open) {
        std::size_t depth = 0, commas = 0, k = open;
        bool any = false;
        for (; k < t.size() && t[k].kind != java::TokenKind::End; ++k) {
            if (t[k].is("(") || t[k].is("[") || t[k].is("{")) {
                ++depth;
            } else if (t[k].is(")") || t[k].is("]") || t[k].is("}")) {
                if (--depth == 0) break;
            } else if (depth == 1) {
                if (t[k].is(",")) ++commas;
            }
            if (depth >= 1 && k > open) any = true;
        }
        return any ? commas + 1 : std::size_t{0};
    };
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
        if (!t[k].is_ident() || !t[k + 1].is("(") || t[k].begin >= cutoff) continue;
        if (t[k - 1].is("new")) {
            out.push_back(CallSite{t[k].begin, std::string(t[k].text), std::string(t[k].text), count_args(k + 1), true});
            continue;
        }
        if (!t[k - 1].is(".") || k < 2) continue;
        // Walk back to the root of the receiver chain.
        std::size_t j = k - 2;
        std::string root;
        while (true) {
            if (t[j].is(")")) {
                int depth = 0;
                while (true) {
                    if (t[j].is(")")) ++depth;
                    if (t[j].is("(") && --depth == 0) break;
                    if (j == 0) break;
                    --j;
                }
                if (j == 0) break;
                --j;
                if (!t[j].is_ident()) break;
                if (j > 0 && t[j - 1].is("new")) {
                    root = std::string(t[j].text);
                    break;
                }
                if (j >= 2 && t[j - 1].is(".")) {
                    j -= 2;
                    continue;
                }
                break;
            }
            if (t[j].is_ident()) {
                if (j >= 2 && t[j - 1].is(".")) {
                    j -= 2;
                    continue;
                }
                root = std::string(t[j].text);
            }
            break;
        }
        out.push_back(CallSite{t[k].begin, std::string(t[k].text), root, count_args(k + 1), false});
    }
    return out;
}

std::set<std::string> variables_of_type(std::string_view body, const std::string& type) {
    java::LexResult lx = java::lex(body);
    const auto& t = lx.tokens;
    std::set<std::string> vars;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        bool typed = t[k].text == type && t[k].is_ident();
        bool inferred = t[k].is("var") && k + 3 < t.size() && t[k + 2].is("=") && t[k + 3].is("new") &&
                        k + 4 < t.size() && t[k + 4].text == type;
        if (!typed && !inferred) continue;
        std::size_t j = k + 1;
        if (typed && t[j].is("<")) {
            int depth = 0;
            do {
                if (t[j].is("<")) ++depth;
                if (t[j].is(">")) --depth;
                ++j;
            } while (depth > 0 && j < t.size());
        }
        if (j + 1 < t.size() && t[j].is_ident() && (t[j + 1].is("=") || t[j + 1].is(";") || t[j + 1].is(","))) {
            vars.insert(std::string(t[j].text));
        }
    }
    return vars;
}

const kb::ClassMeta* class_under_test(const TestCase& test, const kb::KnowledgeBase& kb) {
    if (const auto* c = kb.find_class(strip_suffixes(test.suite_class))) return c;
    // Otherwise the KB class mentioned most often in the body.
    java::LexResult lx = java::lex(test.body);
    std::map<std::string, int> mentions;
    for (const auto& tok : lx.tokens) {
        if (tok.is_ident() && kb.find_class(tok.text)) ++mentions[std::string(tok.text)];
    }
    const kb::ClassMeta* best = nullptr;
    int best_count = 0;
    for (const auto& [name, count] : mentions) {
        if (count > best_count) {
            best = kb.find_class(name);
            best_count = count;
        }
    }
    return best;
}

}  // namespace

std::string_view to_string(OracleKind kind) noexcept {
    switch (kind) {
        case OracleKind::Assertion: return "assertion";
        case OracleKind::Exception: return "exception";
        case OracleKind::None: return "none";
    }
    return "none";
}

OracleKind oracle_kind_from_string(std::string_view s) {
    if (s == "assertion") return OracleKind::Assertion;
    if (s == "exception") return OracleKind::Exception;
    if (s == "none") return OracleKind::None;
    throw ConfigError("unknown oracle kind: " + std::string(s));
}

std::string TestPrefix::method_text() const { return method_header + " {" + prefix_body + "}"; }

bool is_oracle_call(std::string_view simple_name) noexcept {
    return std::find(kOracleCalls.begin(), kOracleCalls.end(), simple_name) != kOracleCalls.end();
}

std::size_t count_placeholders(std::string_view text) {
    std::size_t n = 0;
    for (const auto& line : util::split_lines(text)) {
        if (util::trim(line) == kPlaceholder) ++n;
    }
    return n;
}

bool contains_oracle(std::string_view body) { return first_oracle_offset(parse_body(body)).has_value(); }

std::vector<TestCase> load_test_suite(std::string_view source, const std::string& suite_path) {
    java::CompilationUnit cu;
    try {
        cu = java::parse_compilation_unit(source);
    } catch (const std::exception& e) {
        throw PreprocessError(suite_path + ": " + e.what());
    }
    std::vector<TestCase> out;
    for (const auto& type : cu.types) {
        for (const auto& m : type.methods) {
            bool is_test = std::find(m.annotations.begin(), m.annotations.end(), "Test") != m.annotations.end();
            if (!is_test || !m.body) continue;
            TestCase tc;
            tc.suite_path = suite_path;
            tc.suite_package = cu.package;
            tc.suite_class = type.name;
            tc.test_name = m.name;
            tc.header = std::string(source.substr(m.header.begin, m.header.end - m.header.begin));
            tc.body = std::string(source.substr(m.body->begin, m.body->end - m.body->begin));
            tc.imports = cu.imports;
            out.push_back(std::move(tc));
        }
    }
    return out;
}

std::vector<TestCase> load_tests(const fs::path& tests_dir, std::vector<std::string>& warnings) {
    std::error_code ec;
    if (!fs::is_directory(tests_dir, ec)) throw ConfigError("tests directory not found: " + tests_dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(tests_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".java") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<TestCase> out;
    for (const auto& f : files) {
        try {
            auto suite = load_test_suite(util::read_file(f), f.lexically_relative(tests_dir).generic_string());
            for (auto& t : suite) out.push_back(std::move(t));
        } catch (const PreprocessError& e) {
            warnings.push_back(e.what());
        }
    }
    return out;
}

FocalRef identify_focal(const TestCase& test, const kb::KnowledgeBase& kb) {
    const kb::ClassMeta* cut = class_under_test(test, kb);
    if (!cut) throw FocalNotFound(test.id() + ": no class under test found in the knowledge base");

    auto stmts = parse_body(test.body);
    std::size_t cutoff = first_oracle_offset(stmts).value_or(test.body.size());
    std::set<std::string> vars = variables_of_type(test.body, cut->class_name);

    const kb::MethodMeta* best = nullptr;
    for (const auto& site : call_sites(test.body, cutoff)) {
        if (site.constructor) {
            if (site.name != cut->class_name) continue;
        } else {
            bool receiver_ok = vars.empty() ? true : (vars.count(site.root) > 0 || site.root == cut->class_name);
            if (!receiver_ok) continue;
            if (site.name == cut->class_name) continue;
        }
        const kb::MethodMeta* match = nullptr;
        for (const auto& m : cut->methods) {
            if (m.method_name != site.name) continue;
            if (m.parameters.size() == site.args) {
                match = &m;
                break;
            }
            if (!match) match = &m;
        }
        if (match) best = match;  // later call sites win
    }
    if (!best) throw FocalNotFound(test.id() + ": no method of " + cut->class_name + " is invoked before the oracle");
    return FocalRef{cut->class_name, best->method_name, best->signature};
}

TestPrefix strip_assertions(const TestCase& test) {
    auto stmts = parse_body(test.body);
    Rewriter rw(test.body);
    TestPrefix p;
    p.prefix_body = rw.run(stmts);
    p.test_id = test.id();
    p.test_name = test.test_name;
    p.suite_class = test.suite_class;
    p.suite_path = test.suite_path;
    p.method_header = test.header;
    p.stripped_count = rw.stripped();
    p.oracle_kind = rw.exception()       ? OracleKind::Exception
                    : rw.stripped() > 0  ? OracleKind::Assertion
                                         : OracleKind::None;
    return p;
}

TestPrefix prepare_prefix(const TestCase& test, const kb::KnowledgeBase& kb) {
    TestPrefix p = strip_assertions(test);
    p.focal = identify_focal(test, kb);
    return p;
}

nlohmann::ordered_json to_json(const TestPrefix& p) {
    return nlohmann::ordered_json{
        {"test_id", p.test_id},
        {"test_name", p.test_name},
        {"suite_class", p.suite_class},
        {"suite_path", p.suite_path},
        {"focal", {{"class_name", p.focal.class_name}, {"method_name", p.focal.method_name}, {"signature", p.focal.signature}}},
        {"oracle_kind", std::string(to_string(p.oracle_kind))},
        {"stripped_count", p.stripped_count},
        {"method_header", p.method_header},
        {"prefix_body", p.prefix_body},
    };
}

TestPrefix prefix_from_json(const nlohmann::ordered_json& j) {
    try {
        TestPrefix p;
        p.test_id = j.at("test_id").get<std::string>();
        p.test_name = j.at("test_name").get<std::string>();
        p.suite_class = j.at("suite_class").get<std::string>();
        p.suite_path = j.at("suite_path").get<std::string>();
        const auto& f = j.at("focal");
        p.focal = FocalRef{f.at("class_name").get<std::string>(), f.at("method_name").get<std::string>(),
                           f.at("signature").get<std::string>()};
        p.oracle_kind = oracle_kind_from_string(j.at("oracle_kind").get<std::string>());
        p.stripped_count = j.at("stripped_count").get<int>();
        p.method_header = j.at("method_header").get<std::string>();
        p.prefix_body = j.at("prefix_body").get<std::string>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("prefix manifest: ") + e.what());
    }
}

}  // namespace oraclegen::prefix
