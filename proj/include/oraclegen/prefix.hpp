#pragma once

// Test preprocessing: split JUnit suites into test cases, find the focal
// method of each test and strip its oracle statements down to a prefix with a
// single placeholder line.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oraclegen/kb.hpp"

namespace oraclegen::prefix {

/// The placeholder occupies a full line of its own in every prefix.
inline constexpr std::string_view kPlaceholder = "// <ASSERTION_PLACEHOLDER>";

enum class OracleKind { Assertion, Exception, None };

std::string_view to_string(OracleKind kind) noexcept;
OracleKind oracle_kind_from_string(std::string_view s);

struct TestCase {
    std::string suite_path;     // file the test came from
    std::string suite_package;  // package of the suite
    std::string suite_class;    // simple name of the suite class
    std::string test_name;      // method name
    std::string header;         // annotations + signature, as written
    std::string body;           // text between the method braces
    std::vector<std::string> imports;

    /// "<SuiteClass>.<method>", unique within a run.
    std::string id() const { return suite_class + "." + test_name; }
};

struct FocalRef {
    std::string class_name;
    std::string method_name;
    std::string signature;  // disambiguates overloads
    bool operator==(const FocalRef&) const = default;
};

struct TestPrefix {
    std::string test_id;
    std::string test_name;
    std::string suite_class;
    std::string suite_path;
    std::string method_header;
    std::string prefix_body;
    std::string placeholder_token{kPlaceholder};
    FocalRef focal;
    int stripped_count = 0;
    OracleKind oracle_kind = OracleKind::None;

    /// Header plus braced prefix body: the complete test method text.
    std::string method_text() const;
};

/// Recognized oracle calls, matched on the simple method name regardless of
/// any qualifier (`Assert.assertEquals`, `org.junit.Assert.fail`, ...).
bool is_oracle_call(std::string_view simple_name) noexcept;

/// Every @Test method of a JUnit suite source. Throws PreprocessError when the
/// source does not parse.
std::vector<TestCase> load_test_suite(std::string_view source, const std::string& suite_path);

/// Suites are read from every *.java file below `tests_dir`, in path order.
/// Unparsable suites become warnings.
std::vector<TestCase> load_tests(const std::filesystem::path& tests_dir, std::vector<std::string>& warnings);

/// Throws FocalNotFound when no method of the class under test is invoked
/// before the first oracle statement.
FocalRef identify_focal(const TestCase& test, const kb::KnowledgeBase& kb);

/// Removes every oracle statement and leaves exactly one placeholder line.
/// The returned prefix has no focal set. Throws PreprocessError on a body that
/// does not parse.
TestPrefix strip_assertions(const TestCase& test);

/// strip_assertions + identify_focal.
TestPrefix prepare_prefix(const TestCase& test, const kb::KnowledgeBase& kb);

/// Number of occurrences of the placeholder line in `text`.
std::size_t count_placeholders(std::string_view text);

/// True when `body` contains a recognized oracle call statement at any depth.
bool contains_oracle(std::string_view body);

nlohmann::ordered_json to_json(const TestPrefix& p);
TestPrefix prefix_from_json(const nlohmann::ordered_json& j);

}  // namespace oraclegen::prefix
