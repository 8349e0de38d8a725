#include <gtest/gtest.h>

#include "oraclegen/java/lexer.hpp"
#include "oraclegen/java/parser.hpp"

using namespace oraclegen::java;

TEST(Lexer, SplitsTokensAndComments) {
    auto r = lex("int x = 1; // note\n/** doc */ String s = \"a;b\";");
    ASSERT_EQ(r.comments.size(), 2u);
    EXPECT_EQ(r.comments[0].kind, CommentKind::Line);
    EXPECT_EQ(r.comments[1].kind, CommentKind::Doc);
    std::vector<std::string> texts;
    for (const auto& t : r.tokens) texts.emplace_back(t.text);
    std::vector<std::string> expected{"int", "x", "=", "1", ";", "String", "s", "=", "\"a;b\"", ";", ""};
    EXPECT_EQ(texts, expected);
    EXPECT_EQ(r.tokens.back().kind, TokenKind::End);
}

TEST(Lexer, GenericClosersAreSingleChars) {
    auto r = lex("Map<String, List<Integer>> m;");
    int closers = 0;
    for (const auto& t : r.tokens) closers += t.is(">");
    EXPECT_EQ(closers, 2);
}

TEST(Lexer, TextBlocksAndCharLiterals) {
    auto r = lex("String t = \"\"\"\n  hi \"x\"\n  \"\"\"; char c = '\\'';");
    ASSERT_GE(r.tokens.size(), 9u);
    EXPECT_EQ(r.tokens[3].kind, TokenKind::String);
    EXPECT_EQ(r.tokens[8].kind, TokenKind::Char);
}

TEST(Lexer, UnterminatedStringThrows) { EXPECT_THROW(lex("String s = \"abc;"), LexError); }

TEST(Lexer, UnterminatedCommentThrows) { EXPECT_THROW(lex("int x; /* open"), LexError); }

TEST(Lexer, StripCommentMarkers) {
    EXPECT_EQ(strip_comment_markers("/**\n * Adds two numbers.\n * @return sum\n */"), "Adds two numbers.\n@return sum");
    EXPECT_EQ(strip_comment_markers("// trailing note"), "trailing note");
}

TEST(Parser, CompilationUnitStructure) {
    const char* src = R"(package a.b;
import java.util.List;
import static org.junit.Assert.*;

@SuppressWarnings("x")
public abstract class Foo<T extends Comparable<T>> extends Bar<T> implements Baz, Qux<List<T>> {
    private static final int LIMIT = 3, OTHER = 4;
    protected List<T> items;

    /** Makes one. */
    public Foo(int n) { this.items = null; }

    /**
     * Sums.
     */
    public static <U> int sum(int a, U... rest) throws java.io.IOException {
        return a;
    }

    abstract void hook();

    class Inner { void ignored() {} }
}

interface Baz { default void ping() {} }
enum Color { RED, GREEN; int code() { return 1; } }
)";
    auto cu = parse_compilation_unit(src);
    EXPECT_EQ(cu.package, "a.b");
    EXPECT_EQ(cu.imports, (std::vector<std::string>{"java.util.List", "org.junit.Assert.*"}));
    ASSERT_EQ(cu.types.size(), 3u);
    const auto& foo = cu.types[0];
    EXPECT_EQ(foo.name, "Foo");
    ASSERT_TRUE(foo.super_class.has_value());
    EXPECT_EQ(*foo.super_class, "Bar");
    EXPECT_EQ(foo.interfaces, (std::vector<std::string>{"Baz", "Qux"}));
    ASSERT_EQ(foo.fields.size(), 3u);
    EXPECT_EQ(foo.fields[0].name, "LIMIT");
    EXPECT_EQ(foo.fields[1].name, "OTHER");
    EXPECT_EQ(foo.fields[2].type, "List<T>");
    EXPECT_EQ(foo.fields[2].visibility, "protected");
    ASSERT_EQ(foo.methods.size(), 3u);
    EXPECT_TRUE(foo.methods[0].is_constructor);
    EXPECT_EQ(foo.methods[0].comment, "Makes one.");
    EXPECT_EQ(foo.methods[1].name, "sum");
    EXPECT_EQ(foo.methods[1].return_type, "int");
    EXPECT_EQ(foo.methods[1].comment, "Sums.");
    ASSERT_EQ(foo.methods[1].params.size(), 2u);
    EXPECT_EQ(foo.methods[1].params[1].type, "U...");
    EXPECT_EQ(foo.methods[2].visibility, "package");
    EXPECT_FALSE(foo.methods[2].body.has_value());
    EXPECT_EQ(cu.types[1].kind, TypeKind::Interface);
    EXPECT_EQ(cu.types[2].kind, TypeKind::Enum);
    EXPECT_EQ(cu.types[2].methods.size(), 1u);
}

TEST(Parser, MalformedSourceThrows) {
    EXPECT_THROW(parse_compilation_unit("public class X { void f() { }"), SyntaxError);
    EXPECT_THROW(parse_compilation_unit("class { }"), SyntaxError);
}

TEST(Parser, BlockStatements) {
    std::string body = R"(
        int x = f(1, 2);
        Assert.assertEquals(3, x);
        if (x > 0) assertTrue(x > 0); else { x++; }
        for (int i = 0; i < 3; i++) { g(i); }
        try { h(); fail("boom"); } catch (RuntimeException e) { }
        switch (x) { case 1: break; default: }
        ;
    )";
    auto stmts = parse_block_statements(body);
    ASSERT_EQ(stmts.size(), 7u);
    EXPECT_EQ(stmts[0].kind, StmtKind::Simple);
    EXPECT_EQ(stmts[1].call_name, "assertEquals");
    EXPECT_EQ(stmts[1].call_qualifier, "Assert");
    EXPECT_EQ(stmts[2].kind, StmtKind::Compound);
    ASSERT_EQ(stmts[2].slots.size(), 2u);
    EXPECT_FALSE(stmts[2].slots[0].braced);
    EXPECT_TRUE(stmts[2].slots[1].braced);
    EXPECT_EQ(stmts[3].kind, StmtKind::Compound);
    EXPECT_EQ(stmts[4].kind, StmtKind::Try);
    EXPECT_EQ(stmts[4].catches.size(), 1u);
    EXPECT_EQ(stmts[5].kind, StmtKind::Opaque);
    EXPECT_EQ(stmts[6].kind, StmtKind::Empty);
    EXPECT_EQ(body.substr(stmts[1].span.begin, stmts[1].span.end - stmts[1].span.begin), "Assert.assertEquals(3, x);");
}

TEST(Parser, UnbalancedBodyThrows) {
    EXPECT_ANY_THROW(parse_block_statements("f(1;"));
    EXPECT_ANY_THROW(parse_block_statements("if (x) { y();"));
}
