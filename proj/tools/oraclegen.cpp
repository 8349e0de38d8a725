#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "oraclegen/error.hpp"
#include "oraclegen/pipeline.hpp"
#include "oraclegen/prompts.hpp"

namespace fs = std::filesystem;
using namespace oraclegen;

namespace {

std::vector<double> parse_thresholds(const std::string& list) {
    std::vector<double> out;
    std::size_t b = 0;
    while (b <= list.size()) {
        std::size_t e = list.find(',', b);
        if (e == std::string::npos) e = list.size();
        std::string item = list.substr(b, e - b);
        if (!item.empty() && item.back() == '%') item.pop_back();
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError("invalid threshold '" + item + "'");
            }
        }
        b = e + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Test oracle generation: parse, preprocess, generate, evaluate, report"};
    app.require_subcommand(1);

    std::string config_path;
    std::string project_root, tests_dir, output_dir;
    std::optional<unsigned> workers;
    app.add_option("-c,--config", config_path, "JSON configuration file (default: ./oraclegen.json if present)");
    app.add_option("--project-root", project_root, "Subject project source root");
    app.add_option("--tests-dir", tests_dir, "Directory of JUnit test suites");
    app.add_option("-o,--output-dir", output_dir, "Output directory");
    app.add_option("-j,--workers", workers, "Worker threads (0 = hardware concurrency)");

    auto* parse = app.add_subcommand("parse", "Build the knowledge base (kb.json)");
    auto* preprocess = app.add_subcommand("preprocess", "Strip oracles and write test prefixes");

    auto* generate = app.add_subcommand("generate", "Generate assertions for every prefix and replication");
    std::string variant;
    std::optional<int> replications, retries, budget;
    bool keep_prompts = false;
    generate->add_option("--variant", variant, "sp | ep | rag | rag-sp");
    generate->add_option("--replications", replications, "Replications per test");
    generate->add_option("--retries", retries, "Backend/extraction retries per attempt");
    generate->add_option("--budget", budget, "Generate-compile-run attempts per replication");
    generate->add_flag("--keep-prompts", keep_prompts, "Write rendered prompts under <output>/prompts");

    auto* evaluate = app.add_subcommand("evaluate", "Run candidates against original and mutant, write reports");
    std::string thresholds;
    std::vector<std::string> eval_variants;
    evaluate->add_option("--threshold", thresholds, "Comma-separated thresholds in percent, e.g. 60,80,100");
    evaluate->add_option("--variant", eval_variants, "Variants to evaluate (default: all with run records)");

    auto* report = app.add_subcommand("report", "Print the summary table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    pipeline::Io io{std::cout, std::cerr};
    try {
        pipeline::RunConfig cfg;
        if (!config_path.empty()) {
            cfg = pipeline::load_config(config_path);
        } else if (fs::is_regular_file("oraclegen.json")) {
            cfg = pipeline::load_config("oraclegen.json");
        } else {
            cfg = pipeline::config_from_json(nlohmann::json::object(), fs::current_path());
        }
        if (!project_root.empty()) cfg.project_root = fs::absolute(project_root);
        if (!tests_dir.empty()) cfg.tests_dir = fs::absolute(tests_dir);
        if (!output_dir.empty()) cfg.output_dir = fs::absolute(output_dir);
        if (workers) cfg.workers = *workers;
        if (!variant.empty()) cfg.variant = variant;
        if (replications) {
            cfg.replications = *replications;
            cfg.variant_replications.erase(std::string(prompts::to_string(prompts::parse_variant(cfg.variant))));
        }
        if (retries) cfg.retries = *retries;
        if (budget) cfg.budget = *budget;
        if (keep_prompts) cfg.keep_prompts = true;
        if (!thresholds.empty()) cfg.thresholds = parse_thresholds(thresholds);
        cfg.validate();

        if (*parse) return pipeline::cmd_parse(cfg, io);
        if (*preprocess) return pipeline::cmd_preprocess(cfg, io);
        if (*generate) return pipeline::cmd_generate(cfg, io);
        if (*evaluate) return pipeline::cmd_evaluate(cfg, io, {}, eval_variants);
        if (*report) return pipeline::cmd_report(cfg, io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pipeline::exit_code_for(e);
    }
    return 0;
}
