#include <gtest/gtest.h>

#include <map>

#include "oraclegen/error.hpp"
#include "oraclegen/java/parser.hpp"
#include "oraclegen/kb.hpp"
#include "oraclegen/prefix.hpp"
#include "test_support.hpp"

using namespace oraclegen;
using prefix::OracleKind;
using testsupport::data;
using testsupport::slurp;

namespace {

prefix::TestCase make_test(std::string body, std::string suite = "StackTest", std::string name = "testX") {
    prefix::TestCase t;
    t.suite_class = std::move(suite);
    t.suite_path = t.suite_class + ".java";
    t.test_name = std::move(name);
    t.header = "@Test\n    public void " + t.test_name + "()";
    t.body = std::move(body);
    return t;
}

kb::KnowledgeBase stack_kb(bool with_ctor) {
    std::string src = "public class Stack {\n";
    if (with_ctor) src += "  public Stack() {}\n";
    src += "  public void push(int v) {}\n  public int pop() { return 0; }\n  public int size() { return 0; }\n"
           "  public int pop(int n) { return 0; }\n}\n";
    kb::KnowledgeBase kb;
    kb.classes = kb::parse_source(src, "Stack.java");
    return kb;
}

const prefix::TestCase& find(const std::vector<prefix::TestCase>& tests, const std::string& id) {
    for (const auto& t : tests)
        if (t.id() == id) return t;
    throw std::runtime_error("no test " + id);
}

std::vector<prefix::TestCase> corpus_tests() {
    std::vector<std::string> warnings;
    auto tests = prefix::load_tests(data("corpus/tests"), warnings);
    EXPECT_TRUE(warnings.empty());
    return tests;
}

}  // namespace

TEST(Strip, SingleAssertionReplacedByPlaceholder) {
    auto p = prefix::strip_assertions(make_test("\n        Stack c = new Stack();\n        assertEquals(3, c.size());\n    "));
    EXPECT_EQ(p.prefix_body, "\n        Stack c = new Stack();\n        // <ASSERTION_PLACEHOLDER>\n    ");
    EXPECT_EQ(p.stripped_count, 1);
    EXPECT_EQ(p.oracle_kind, OracleKind::Assertion);
}

TEST(Strip, NoAssertionAppendsPlaceholderLast) {
    auto p = prefix::strip_assertions(make_test("\n        Stack c = new Stack();\n        c.push(1);\n    "));
    EXPECT_EQ(p.prefix_body, "\n        Stack c = new Stack();\n        c.push(1);\n        // <ASSERTION_PLACEHOLDER>\n    ");
    EXPECT_EQ(p.stripped_count, 0);
    EXPECT_EQ(p.oracle_kind, OracleKind::None);
}

TEST(Strip, EmptyBodyGetsPlaceholder) {
    auto p = prefix::strip_assertions(make_test("\n    "));
    EXPECT_EQ(prefix::count_placeholders(p.prefix_body), 1u);
    EXPECT_EQ(p.oracle_kind, OracleKind::None);
}

TEST(Strip, ManyAssertionsLeaveOnePlaceholderAtFirst) {
    auto p = prefix::strip_assertions(make_test(
        "\n        int a = f();\n        assertEquals(1, a);\n        int b = g();\n        assertTrue(b > 0); // note\n"
        "        Assert.assertNotNull(h());\n    "));
    EXPECT_EQ(p.prefix_body,
              "\n        int a = f();\n        // <ASSERTION_PLACEHOLDER>\n        int b = g();\n    ");
    EXPECT_EQ(p.stripped_count, 3);
}

TEST(Strip, ExpectedExceptionScaffoldFlattened) {
    auto tests = corpus_tests();
    auto p = prefix::strip_assertions(find(tests, "CalculatorTest.testDivideByZero"));
    // Authored by hand from CalculatorTest.testDivideByZero.
    const std::string expected =
        "@Test\n"
        "    public void testDivideByZero() {\n"
        "        Calculator c = new Calculator();\n"
        "        c.divide(1, 0);\n"
        "        // <ASSERTION_PLACEHOLDER>\n"
        "    }";
    EXPECT_EQ(p.method_text(), expected);
    EXPECT_EQ(p.oracle_kind, OracleKind::Exception);
    EXPECT_EQ(p.stripped_count, 1);
}

TEST(Strip, ExamplePrefixMatchesGolden) {
    std::vector<std::string> w;
    auto tests = prefix::load_tests(data("example/tests"), w);
    ASSERT_EQ(tests.size(), 1u);
    auto p = prefix::strip_assertions(tests[0]);
    EXPECT_EQ(p.method_text() + "\n", slurp(data("example/golden/prefix_method.txt")));
}

TEST(Strip, OracleInsideLoopAndUnbracedBranches) {
    auto tests = corpus_tests();
    auto loop = prefix::strip_assertions(find(tests, "TextUtilsTest.testCountVowels"));
    EXPECT_EQ(prefix::count_placeholders(loop.prefix_body), 1u);
    EXPECT_NE(loop.prefix_body.find("for (int i = 0; i < 2; i++) {"), std::string::npos);
    auto branches = prefix::strip_assertions(find(tests, "CalculatorTest.testMultiply"));
    EXPECT_EQ(prefix::count_placeholders(branches.prefix_body), 1u);
    EXPECT_EQ(branches.stripped_count, 2);
    EXPECT_FALSE(prefix::contains_oracle(branches.prefix_body));
    // Both branches still hold a statement, so the if/else stays well formed.
    EXPECT_NO_THROW(java::parse_block_statements(branches.prefix_body));
}

TEST(Strip, UnparsableBodyIsPreprocessError) {
    EXPECT_THROW(prefix::strip_assertions(make_test("\n  int x = (1;\n")), PreprocessError);
}

TEST(Strip, IdempotentOnCorpus) {
    for (const auto& t : corpus_tests()) {
        auto once = prefix::strip_assertions(t);
        auto again_input = t;
        again_input.body = once.prefix_body;
        auto twice = prefix::strip_assertions(again_input);
        EXPECT_EQ(twice.prefix_body, once.prefix_body) << t.id();
        EXPECT_EQ(prefix::count_placeholders(once.method_text()), 1u) << t.id();
        EXPECT_FALSE(prefix::contains_oracle(once.prefix_body)) << t.id();
    }
}

TEST(Suite, LoadsOnlyTestMethods) {
    auto tests = corpus_tests();
    EXPECT_EQ(tests.size(), 11u);
    const auto& peek = find(tests, "IntStackTest.testPeek");
    EXPECT_EQ(peek.suite_package, "com.acme.desk");
    EXPECT_EQ(peek.suite_path, "com/acme/desk/IntStackTest.java");
    EXPECT_NE(peek.header.find("@Test(timeout = 1000)"), std::string::npos);
}

TEST(Suite, MalformedSuiteIsPreprocessError) {
    EXPECT_THROW(prefix::load_test_suite("public class T { @Test public void a() { ", "T.java"), PreprocessError);
}

TEST(Focal, LastCallBeforeOracle) {
    auto kb = stack_kb(true);
    auto t = make_test("\n        Stack stack = new Stack();\n        stack.push(1);\n        stack.pop();\n"
                       "        assertEquals(0, stack.size());\n    ");
    auto f = prefix::identify_focal(t, kb);
    EXPECT_EQ(f.class_name, "Stack");
    EXPECT_EQ(f.method_name, "pop");
    EXPECT_EQ(f.signature, "public int pop()");
}

TEST(Focal, OverloadChosenByArgumentCount) {
    auto kb = stack_kb(true);
    auto f = prefix::identify_focal(make_test("\n Stack s = new Stack();\n s.pop(2);\n assertTrue(true);\n"), kb);
    EXPECT_EQ(f.signature, "public int pop(int n)");
}

TEST(Focal, ConstructorOnly) {
    auto t = make_test("\n        Stack s = new Stack();\n        assertNotNull(s);\n    ");
    auto f = prefix::identify_focal(t, stack_kb(true));
    EXPECT_EQ(f.method_name, "Stack");
    EXPECT_THROW(prefix::identify_focal(t, stack_kb(false)), FocalNotFound);
}

TEST(Focal, LibraryCallOnlyNotFound) {
    auto t = make_test("\n        java.util.List<Integer> l = new java.util.ArrayList<>();\n        l.add(1);\n"
                       "        assertEquals(1, l.size());\n    ");
    EXPECT_THROW(prefix::identify_focal(t, stack_kb(true)), FocalNotFound);
}

TEST(Focal, CallsAfterOracleIgnored) {
    auto t = make_test("\n Stack s = new Stack();\n s.push(3);\n assertEquals(0, 0);\n s.pop();\n");
    EXPECT_EQ(prefix::identify_focal(t, stack_kb(true)).method_name, "push");
}

TEST(Focal, CorpusFocals) {
    kb::KnowledgeBase kb = kb::parse_project(data("corpus/project")).kb;
    const std::map<std::string, std::string> expected{
        {"BankAccountTest.testDeposit", "deposit"},    {"CalculatorTest.testAdd", "add"},
        {"CalculatorTest.testMultiply", "multiply"},   {"CalculatorTest.testDivideByZero", "divide"},
        {"CounterTest.testIncrement", "increment"},    {"IntStackTest.testPushPop", "pop"},
        {"IntStackTest.testPeek", "peek"},             {"RangeTest.testContains", "contains"},
        {"TemperatureTest.testToFahrenheit", "toFahrenheit"}, {"TextUtilsTest.testReverse", "reverse"},
        {"TextUtilsTest.testCountVowels", "countVowels"},
    };
    auto tests = corpus_tests();
    ASSERT_EQ(tests.size(), expected.size());
    for (const auto& t : tests) EXPECT_EQ(prefix::identify_focal(t, kb).method_name, expected.at(t.id())) << t.id();
}

TEST(PrefixJson, RoundTrip) {
    kb::KnowledgeBase kb = kb::parse_project(data("corpus/project")).kb;
    for (const auto& t : corpus_tests()) {
        auto p = prefix::prepare_prefix(t, kb);
        auto back = prefix::prefix_from_json(prefix::to_json(p));
        EXPECT_EQ(prefix::to_json(back), prefix::to_json(p));
        EXPECT_EQ(back.focal, p.focal);
    }
}

TEST(PlaceholderCount, CountsWholeLinesOnly) {
    EXPECT_EQ(prefix::count_placeholders("a\n  // <ASSERTION_PLACEHOLDER>\nb\n// <ASSERTION_PLACEHOLDER>"), 2u);
    EXPECT_EQ(prefix::count_placeholders("x = 1; // <ASSERTION_PLACEHOLDER>"), 0u);
}
