#pragma once

// Command implementations behind the CLI: configuration, on-disk layout of
// the output directory and the resumable run records.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oraclegen/exec.hpp"
#include "oraclegen/llm.hpp"
#include "oraclegen/rag.hpp"

namespace oraclegen::pipeline {

struct ToolchainConfig {
    std::string kind = "process";  // process | scripted
    std::vector<std::string> compiler{"javac"};
    std::vector<std::string> runner;
    std::vector<std::string> classpath;
    double timeout = 30.0;
    std::filesystem::path playbook;  // scripted
    std::filesystem::path work_dir;
    bool keep_workspaces = false;
};

struct RunConfig {
    std::filesystem::path project_root;
    std::filesystem::path tests_dir;
    std::map<std::string, std::filesystem::path> mutants;  // class or Suite.test -> mutant source
    std::filesystem::path mutants_dir;                      // <dir>/<Class>.java
    std::string variant = "sp";
    llm::BackendConfig backend;
    ToolchainConfig toolchain;
    int replications = 10;
    std::map<std::string, int> variant_replications;
    int retries = 3;
    int budget = 3;
    std::vector<double> thresholds{60, 80, 100};
    unsigned workers = 0;  // 0 = hardware concurrency
    std::filesystem::path output_dir = "out";
    std::filesystem::path templates_dir;
    std::string project_name;
    std::vector<std::filesystem::path> exclude;
    rag::RagParams rag;
    bool keep_prompts = false;

    int replications_for(const std::string& variant) const;
    /// Throws ConfigError on invalid values.
    void validate() const;
};

/// Reads a JSON config; relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& file);
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Test seams: when set, these replace the configured backend/toolchain.
struct Services {
    std::shared_ptr<llm::Backend> backend;
    std::shared_ptr<exec::Toolchain> toolchain;
};

struct Io {
    std::ostream& out;
    std::ostream& err;
};

namespace paths {
std::filesystem::path kb(const RunConfig& c);
std::filesystem::path prefixes_dir(const RunConfig& c);
std::filesystem::path manifest(const RunConfig& c);
std::filesystem::path rag_store(const RunConfig& c);
std::filesystem::path run_record(const RunConfig& c, const std::string& variant);
std::filesystem::path candidates_dir(const RunConfig& c, const std::string& variant);
std::filesystem::path prompts_dir(const RunConfig& c, const std::string& variant);
std::filesystem::path report_dir(const RunConfig& c);
}  // namespace paths

// Each returns the process exit code; errors propagate as exceptions and are
// mapped by exit_code_for().
int cmd_parse(const RunConfig& cfg, Io io);
int cmd_preprocess(const RunConfig& cfg, Io io);
int cmd_generate(const RunConfig& cfg, Io io, const Services& services = {});
/// Evaluates the given variants, or every variant with a run record when empty.
int cmd_evaluate(const RunConfig& cfg, Io io, const Services& services = {}, std::vector<std::string> variants = {});
int cmd_report(const RunConfig& cfg, Io io);

/// 0 success, 2 input/configuration error, 3 backend configuration error,
/// 1 anything else.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace oraclegen::pipeline
