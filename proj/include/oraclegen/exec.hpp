#pragma once

// Completing tests with generated assertions and running them against the
// original or a mutant subject.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "oraclegen/llm.hpp"
#include "oraclegen/prefix.hpp"

namespace oraclegen::exec {

enum class Status { CompileError, RuntimeError, Pass, Fail };

std::string_view to_string(Status s) noexcept;
Status status_from_string(std::string_view s);

struct ExecOutcome {
    Status status = Status::RuntimeError;
    std::string log;
    double duration = 0.0;  // seconds
};

nlohmann::json to_json(const ExecOutcome& o);
ExecOutcome outcome_from_json(const nlohmann::json& j);

/// A whole suite source in which one test method carries the generated assertion.
struct CompletedTest {
    std::string test_id;
    std::string test_name;
    std::string suite_class;
    std::string suite_package;
    std::string suite_path;  // relative to the tests directory
    std::string assertion;
    std::string source;

    std::string suite_fqn() const { return suite_package.empty() ? suite_class : suite_package + "." + suite_class; }
};

struct Subject {
    enum class Kind { Original, Mutant };
    Kind kind = Kind::Original;
    std::string class_name;
    std::string source_file;               // project-relative file of the class
    std::filesystem::path mutant_file;     // replacement source, Mutant only

    static Subject original(std::string class_name, std::string source_file = {}) {
        return Subject{Kind::Original, std::move(class_name), std::move(source_file), {}};
    }
    static Subject mutant(std::string class_name, std::string source_file, std::filesystem::path file) {
        return Subject{Kind::Mutant, std::move(class_name), std::move(source_file), std::move(file)};
    }
};

class Toolchain {
public:
    virtual ~Toolchain() = default;
    /// Throws EnvironmentError when the compiler or runner cannot be launched.
    virtual ExecOutcome compile_and_run(const CompletedTest& test, const Subject& subject) = 0;
};

struct ProcessToolchainConfig {
    std::filesystem::path project_root;              // subject sources
    std::vector<std::string> compiler{"javac"};      // argv prefix
    std::vector<std::string> runner;                 // argv prefix; gets <TestClass> <classpath>
    std::vector<std::string> classpath;              // extra entries (JUnit, runner glue)
    std::chrono::milliseconds timeout{30000};        // per process
    std::filesystem::path work_root;                 // temp workspaces; system temp when empty
    bool keep_workspaces = false;
};

/// Compiles the project sources (mutant swapped in) plus the completed suite
/// in an isolated workspace, then runs the suite and reads the runner line
/// `<method> PASS|FAIL|ERROR [message]` of the target test.
class ProcessToolchain : public Toolchain {
public:
    explicit ProcessToolchain(ProcessToolchainConfig cfg);
    ExecOutcome compile_and_run(const CompletedTest& test, const Subject& subject) override;

private:
    ProcessToolchainConfig cfg_;
    std::vector<std::string> sources_;  // project-relative .java files
};

/// Outcomes from a JSON playbook:
///   {"default": "Pass", "rules": [{"test": "...", "contains": "...",
///    "subject": "original|mutant|any", "status": "Fail"}]}
/// The first matching rule wins.
class ScriptedToolchain : public Toolchain {
public:
    explicit ScriptedToolchain(nlohmann::json playbook);
    static std::unique_ptr<ScriptedToolchain> from_file(const std::filesystem::path& file);
    ExecOutcome compile_and_run(const CompletedTest& test, const Subject& subject) override;
    std::size_t calls() const noexcept { return calls_.load(); }

private:
    struct Rule {
        std::string test;
        std::string contains;
        std::optional<Subject::Kind> subject;
        Status status;
    };
    Status default_ = Status::Pass;
    std::vector<Rule> rules_;
    std::atomic<std::size_t> calls_{0};
};

/// The prefix body with its placeholder line replaced by the assertion at the
/// placeholder's indentation. Throws AssembleError when the assertion is not
/// a single statement or the result does not parse.
std::string assemble_test(const prefix::TestPrefix& prefix, std::string_view assertion);

/// Replaces the body of @Test method `test_name` in a suite source.
std::string splice_into_suite(std::string_view suite_source, std::string_view test_name, std::string_view new_body);

/// assemble_test + splice_into_suite.
CompletedTest complete_test(const prefix::TestPrefix& prefix, std::string_view suite_source, std::string_view assertion);

struct Attempt {
    int index = 0;
    int llm_calls = 0;
    std::string assertion;
    std::optional<Status> status;
    std::string error;
};

struct AssertionCandidate {
    std::string test_id;
    int replication = 0;
    std::string assertion;
    std::string completed_source;
    ExecOutcome validation;
    std::vector<Attempt> attempts;
};

struct GenerationFailure {
    std::string test_id;
    int replication = 0;
    std::string reason;
    std::vector<Attempt> attempts;
};

using LoopResult = std::variant<AssertionCandidate, GenerationFailure>;

struct LoopInput {
    const prefix::TestPrefix& prefix;
    std::string_view suite_source;
    std::string prompt;
    int replication = 0;
    Subject original;
};

/// Up to `budget` generate -> assemble -> compile/run attempts against the
/// original subject. The first attempt reaching Pass or Fail is the candidate.
/// ConfigError and EnvironmentError propagate.
LoopResult generation_loop(const LoopInput& in, llm::Backend& backend, Toolchain& toolchain, int budget = 3,
                           int retries = 3);

nlohmann::json to_json(const Attempt& a);
Attempt attempt_from_json(const nlohmann::json& j);

}  // namespace oraclegen::exec
