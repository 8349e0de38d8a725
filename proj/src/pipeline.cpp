#include "oraclegen/pipeline.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>
#include <set>

#include "oraclegen/error.hpp"
#include "oraclegen/eval.hpp"
#include "oraclegen/java/parser.hpp"
#include "oraclegen/kb.hpp"
#include "oraclegen/prefix.hpp"
#include "oraclegen/prompts.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

int RunConfig::replications_for(const std::string& v) const {
    auto it = variant_replications.find(std::string(prompts::to_string(prompts::parse_variant(v))));
    return it == variant_replications.end() ? replications : it->second;
}

void RunConfig::validate() const {
    prompts::parse_variant(variant);
    if (replications < 1) throw ConfigError("replications must be >= 1");
    for (const auto& [v, n] : variant_replications) {
        if (n < 1) throw ConfigError("variant_replications." + v + " must be >= 1");
    }
    if (retries < 1) throw ConfigError("retries must be >= 1");
    if (budget < 1) throw ConfigError("budget must be >= 1");
    if (thresholds.empty()) throw ConfigError("at least one threshold is required");
    for (double t : thresholds) {
        if (!(t > 0.0 && t <= 100.0)) throw ConfigError("thresholds must lie in (0, 100]");
    }
    if (rag.chunk_size == 0 || rag.overlap >= rag.chunk_size) throw ConfigError("rag.overlap must be < rag.chunk_size");
    if (rag.k == 0) throw ConfigError("rag.k must be >= 1");
    for (const auto& [key, file] : mutants) {
        std::error_code ec;
        if (!fs::is_regular_file(file, ec)) throw ConfigError("mutant for " + key + " not found: " + file.string());
    }
    if (toolchain.kind != "process" && toolchain.kind != "scripted") {
        throw ConfigError("toolchain.kind must be process or scripted");
    }
    if (!(toolchain.timeout > 0.0)) throw ConfigError("toolchain.timeout must be > 0");
}

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
    if (p.empty() || p.is_absolute()) return p;
    return (base / p).lexically_normal();
}

std::vector<std::string> argv_list(const json& v) {
    if (v.is_string()) {
        std::vector<std::string> out;
        std::string s = v.get<std::string>();
        std::size_t i = 0;
        while (i < s.size()) {
            while (i < s.size() && s[i] == ' ') ++i;
            std::size_t b = i;
            while (i < s.size() && s[i] != ' ') ++i;
            if (i > b) out.push_back(s.substr(b, i - b));
        }
        return out;
    }
    return v.get<std::vector<std::string>>();
}

std::string resolve_program(const fs::path& base, const std::string& prog) {
    if (prog.find('/') == std::string::npos) return prog;  // PATH lookup
    return resolve(base, prog).string();
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

RunConfig config_from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    check_keys(j,
               {"project_root", "tests_dir", "mutants", "mutants_dir", "variant", "backend", "toolchain",
                "replications", "variant_replications", "retries", "budget", "thresholds", "workers", "output_dir",
                "templates_dir", "project_name", "exclude", "rag", "keep_prompts"},
               "configuration");
    RunConfig c;
    c.output_dir = resolve(base, "out");
    try {
        if (j.contains("project_root")) c.project_root = resolve(base, j["project_root"].get<std::string>());
        if (j.contains("tests_dir")) c.tests_dir = resolve(base, j["tests_dir"].get<std::string>());
        if (j.contains("mutants")) {
            for (const auto& [k, v] : j["mutants"].items()) c.mutants[k] = resolve(base, v.get<std::string>());
        }
        if (j.contains("mutants_dir")) c.mutants_dir = resolve(base, j["mutants_dir"].get<std::string>());
        if (j.contains("variant")) c.variant = j["variant"].get<std::string>();
        if (j.contains("backend")) {
            c.backend = llm::BackendConfig::from_json(j["backend"]);
            if (c.backend.kind == llm::BackendKind::Mock) c.backend.endpoint = resolve(base, c.backend.endpoint).string();
        }
        if (j.contains("toolchain")) {
            const json& t = j["toolchain"];
            check_keys(t, {"kind", "compiler", "runner", "classpath", "timeout", "playbook", "work_dir", "keep_workspaces"},
                       "toolchain");
            auto& tc = c.toolchain;
            tc.kind = t.value("kind", tc.kind);
            if (t.contains("compiler")) tc.compiler = argv_list(t["compiler"]);
            if (t.contains("runner")) tc.runner = argv_list(t["runner"]);
            if (!tc.compiler.empty()) tc.compiler[0] = resolve_program(base, tc.compiler[0]);
            if (!tc.runner.empty()) tc.runner[0] = resolve_program(base, tc.runner[0]);
            if (t.contains("classpath")) {
                std::vector<std::string> entries;
                if (t["classpath"].is_string()) {
                    std::string s = t["classpath"].get<std::string>();
                    std::size_t b = 0;
                    while (b <= s.size()) {
                        std::size_t e = s.find(':', b);
                        if (e == std::string::npos) e = s.size();
                        if (e > b) entries.push_back(s.substr(b, e - b));
                        b = e + 1;
                    }
                } else {
                    entries = t["classpath"].get<std::vector<std::string>>();
                }
                for (auto& e : entries) tc.classpath.push_back(resolve(base, e).string());
            }
            tc.timeout = t.value("timeout", tc.timeout);
            if (t.contains("playbook")) tc.playbook = resolve(base, t["playbook"].get<std::string>());
            if (t.contains("work_dir")) tc.work_dir = resolve(base, t["work_dir"].get<std::string>());
            tc.keep_workspaces = t.value("keep_workspaces", false);
        }
        c.replications = j.value("replications", c.replications);
        if (j.contains("variant_replications")) {
            for (const auto& [k, v] : j["variant_replications"].items()) {
                c.variant_replications[std::string(prompts::to_string(prompts::parse_variant(k)))] = v.get<int>();
            }
        }
        c.retries = j.value("retries", c.retries);
        c.budget = j.value("budget", c.budget);
        if (j.contains("thresholds")) c.thresholds = j["thresholds"].get<std::vector<double>>();
        c.workers = j.value("workers", c.workers);
        if (j.contains("output_dir")) c.output_dir = resolve(base, j["output_dir"].get<std::string>());
        if (j.contains("templates_dir")) c.templates_dir = resolve(base, j["templates_dir"].get<std::string>());
        c.project_name = j.value("project_name", "");
        if (j.contains("exclude")) {
            for (const auto& e : j["exclude"]) c.exclude.push_back(resolve(base, e.get<std::string>()));
        }
        if (j.contains("rag")) {
            const json& r = j["rag"];
            check_keys(r, {"chunk_size", "overlap", "k", "dimension", "provider", "endpoint", "model", "api_key_env"}, "rag");
            c.rag.chunk_size = r.value("chunk_size", c.rag.chunk_size);
            c.rag.overlap = r.value("overlap", c.rag.overlap);
            c.rag.k = r.value("k", c.rag.k);
            c.rag.dimension = r.value("dimension", c.rag.dimension);
            c.rag.provider = r.value("provider", c.rag.provider);
            c.rag.endpoint = r.value("endpoint", "");
            c.rag.model = r.value("model", "");
            c.rag.api_key_env = r.value("api_key_env", c.rag.api_key_env);
        }
        c.keep_prompts = j.value("keep_prompts", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration: ") + e.what());
    }
    return c;
}

RunConfig load_config(const fs::path& file) {
    std::string text = util::read_file(file);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return config_from_json(j, fs::absolute(file).parent_path());
}

namespace paths {
fs::path kb(const RunConfig& c) { return c.output_dir / "kb.json"; }
fs::path prefixes_dir(const RunConfig& c) { return c.output_dir / "prefixes"; }
fs::path manifest(const RunConfig& c) { return prefixes_dir(c) / "manifest.json"; }
fs::path rag_store(const RunConfig& c) { return c.output_dir / "rag_store.jsonl"; }
fs::path run_record(const RunConfig& c, const std::string& v) { return c.output_dir / "runs" / (v + ".json"); }
fs::path candidates_dir(const RunConfig& c, const std::string& v) { return c.output_dir / "candidates" / v; }
fs::path prompts_dir(const RunConfig& c, const std::string& v) { return c.output_dir / "prompts" / v; }
fs::path report_dir(const RunConfig& c) { return c.output_dir / "report"; }
}  // namespace paths

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const BackendConfigError*>(&e)) return 3;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const EnvironmentError*>(&e)) return 2;
    return 1;
}

// ---------------------------------------------------------------------------

namespace {

void warn(Io io, const std::string& msg) { io.err << "warning: " << msg << "\n"; }

std::mutex& io_mutex() {
    static std::mutex m;
    return m;
}

kb::KnowledgeBase build_kb(const RunConfig& cfg, Io io) {
    if (cfg.project_root.empty()) throw ConfigError("project_root is not configured");
    kb::ParseOptions opts;
    opts.project_name = cfg.project_name;
    opts.workers = cfg.workers;
    opts.excluded = cfg.exclude;
    opts.excluded.push_back(cfg.output_dir);
    if (!cfg.tests_dir.empty()) opts.excluded.push_back(cfg.tests_dir);
    auto result = kb::parse_project(cfg.project_root, opts);
    for (const auto& w : result.warnings) warn(io, w);
    kb::save_kb(result.kb, paths::kb(cfg));
    return std::move(result.kb);
}

kb::KnowledgeBase ensure_kb(const RunConfig& cfg, Io io) {
    std::error_code ec;
    if (fs::is_regular_file(paths::kb(cfg), ec)) return kb::load_kb(paths::kb(cfg));
    return build_kb(cfg, io);
}

std::vector<prefix::TestPrefix> load_manifest(const RunConfig& cfg) {
    json j;
    try {
        j = json::parse(util::read_file(paths::manifest(cfg)));
    } catch (const json::exception& e) {
        throw ConfigError("prefix manifest: " + std::string(e.what()));
    }
    std::vector<prefix::TestPrefix> out;
    for (const auto& p : j.at("prefixes")) out.push_back(prefix::prefix_from_json(p));
    return out;
}

std::string entry_key(const std::string& test_id, int rep) { return test_id + "#" + std::to_string(rep); }

std::string safe_name(std::string s) {
    for (char& c : s) {
        if (c == '/' || c == '\\' || c == ':') c = '_';
    }
    return s;
}

std::shared_ptr<exec::Toolchain> make_toolchain(const RunConfig& cfg) {
    if (cfg.toolchain.kind == "scripted") {
        if (cfg.toolchain.playbook.empty()) throw ConfigError("toolchain.playbook is required for the scripted toolchain");
        return exec::ScriptedToolchain::from_file(cfg.toolchain.playbook);
    }
    exec::ProcessToolchainConfig pc;
    pc.project_root = cfg.project_root;
    pc.compiler = cfg.toolchain.compiler;
    pc.runner = cfg.toolchain.runner;
    pc.classpath = cfg.toolchain.classpath;
    pc.timeout = std::chrono::milliseconds(static_cast<long long>(cfg.toolchain.timeout * 1000));
    pc.work_root = cfg.toolchain.work_dir;
    pc.keep_workspaces = cfg.toolchain.keep_workspaces;
    return std::make_shared<exec::ProcessToolchain>(pc);
}

class SuiteSources {
public:
    explicit SuiteSources(fs::path dir) : dir_(std::move(dir)) {}
    const std::string& get(const std::string& rel) {
        std::lock_guard lock(mu_);
        auto it = cache_.find(rel);
        if (it == cache_.end()) it = cache_.emplace(rel, util::read_file(dir_ / rel)).first;
        return it->second;
    }

private:
    fs::path dir_;
    std::mutex mu_;
    std::map<std::string, std::string> cache_;
};

class RunRecord {
public:
    // `replications` replaces the stored count; nullopt keeps it.
    RunRecord(fs::path file, const std::string& variant, std::optional<int> replications) : file_(std::move(file)) {
        std::error_code ec;
        if (fs::is_regular_file(file_, ec)) {
            try {
                data_ = json::parse(util::read_file(file_));
            } catch (const json::exception& e) {
                throw ConfigError("run record " + file_.string() + ": " + e.what());
            }
        } else {
            data_ = json{{"variant", variant}, {"replications", replications.value_or(0)}, {"entries", json::object()}};
        }
        if (data_.value("variant", variant) != variant) throw ConfigError("run record belongs to another variant");
        if (replications) data_["replications"] = *replications;
    }
    int replications() const { return data_.value("replications", 0); }
    bool has(const std::string& key) const { return data_["entries"].contains(key); }
    const json* find(const std::string& key) const {
        const json& e = data_["entries"];
        auto it = e.find(key);
        return it == e.end() ? nullptr : &*it;
    }
    void put(const std::string& key, json entry) {
        std::lock_guard lock(mu_);
        data_["entries"][key] = std::move(entry);
        util::write_file_atomic(file_, data_.dump(2) + "\n");
    }
    std::size_t size() const { return data_["entries"].size(); }

private:
    fs::path file_;
    json data_;
    std::mutex mu_;
};

std::optional<fs::path> mutant_for(const RunConfig& cfg, const prefix::TestPrefix& p) {
    if (auto it = cfg.mutants.find(p.test_id); it != cfg.mutants.end()) return it->second;
    if (auto it = cfg.mutants.find(p.focal.class_name); it != cfg.mutants.end()) return it->second;
    if (!cfg.mutants_dir.empty()) {
        fs::path f = cfg.mutants_dir / (p.focal.class_name + ".java");
        std::error_code ec;
        if (fs::is_regular_file(f, ec)) return f;
    }
    return std::nullopt;
}

std::string source_file_of(const kb::KnowledgeBase& kb, const std::string& class_name) {
    const auto* c = kb.find_class(class_name);
    return c ? c->file_path : std::string();
}

const std::vector<std::string>& variant_order() {
    static const std::vector<std::string> order{"sp", "ep", "rag", "rag-sp"};
    return order;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_parse(const RunConfig& cfg, Io io) {
    auto kb = build_kb(cfg, io);
    std::size_t methods = 0;
    for (const auto& c : kb.classes) methods += c.methods.size();
    io.out << "parsed " << kb.classes.size() << " classes, " << methods << " methods -> " << paths::kb(cfg).string()
           << "\n";
    return 0;
}

int cmd_preprocess(const RunConfig& cfg, Io io) {
    if (cfg.tests_dir.empty()) throw ConfigError("tests_dir is not configured");
    auto kb = ensure_kb(cfg, io);
    std::vector<std::string> warnings;
    auto tests = prefix::load_tests(cfg.tests_dir, warnings);

    std::vector<std::optional<prefix::TestPrefix>> prepared(tests.size());
    std::vector<std::string> skipped(tests.size());
    util::parallel_for(tests.size(), cfg.workers, [&](std::size_t i) {
        try {
            prepared[i] = prefix::prepare_prefix(tests[i], kb);
        } catch (const FocalNotFound& e) {
            skipped[i] = std::string("skipped: ") + e.what();
        } catch (const PreprocessError& e) {
            skipped[i] = "skipped " + tests[i].id() + ": " + e.what();
        }
    });

    std::error_code ec;
    fs::remove_all(paths::prefixes_dir(cfg), ec);
    ordered_json manifest{{"tests_dir", cfg.tests_dir.string()}, {"prefixes", ordered_json::array()}};
    std::map<prefix::OracleKind, int> kinds;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (!skipped[i].empty()) warnings.push_back(skipped[i]);
        if (!prepared[i]) continue;
        const auto& p = *prepared[i];
        if (!seen.insert(p.test_id).second) {
            warnings.push_back("duplicate test id " + p.test_id + " ignored");
            continue;
        }
        util::write_file_atomic(paths::prefixes_dir(cfg) / safe_name(p.suite_class) / (p.test_name + ".txt"),
                                p.method_text() + "\n");
        manifest["prefixes"].push_back(prefix::to_json(p));
        ++kinds[p.oracle_kind];
    }
    util::write_file_atomic(paths::manifest(cfg), manifest.dump(2) + "\n");
    for (const auto& w : warnings) warn(io, w);
    io.out << "prepared " << manifest["prefixes"].size() << " prefixes (" << kinds[prefix::OracleKind::Assertion]
           << " assertion, " << kinds[prefix::OracleKind::Exception] << " exception, "
           << kinds[prefix::OracleKind::None] << " without oracle) from " << tests.size() << " tests\n";
    return 0;
}

int cmd_generate(const RunConfig& cfg, Io io, const Services& services) {
    cfg.validate();
    const auto variant = prompts::parse_variant(cfg.variant);
    const std::string vname(prompts::to_string(variant));
    const int reps = cfg.replications_for(vname);

    // Backend problems are fatal before any generation starts.
    std::shared_ptr<llm::Backend> inner = services.backend ? services.backend : llm::make_backend(cfg.backend);
    llm::Gateway gateway(inner, cfg.backend.max_in_flight, cfg.backend.requests_per_second);
    std::shared_ptr<exec::Toolchain> toolchain = services.toolchain ? services.toolchain : make_toolchain(cfg);

    auto kb = ensure_kb(cfg, io);
    std::error_code ec;
    if (!fs::is_regular_file(paths::manifest(cfg), ec)) cmd_preprocess(cfg, io);
    auto prefixes = load_manifest(cfg);
    if (cfg.tests_dir.empty()) throw ConfigError("tests_dir is not configured");

    prompts::TemplateSet templates =
        cfg.templates_dir.empty() ? prompts::TemplateSet::builtin() : prompts::TemplateSet::load(cfg.templates_dir);

    std::unique_ptr<rag::EmbeddingProvider> embedder;
    rag::VectorStore store;
    if (prompts::uses_retrieval(variant)) {
        embedder = rag::make_embedder(cfg.rag);
        store = rag::VectorStore::build(kb, *embedder, cfg.rag);
        store.save(paths::rag_store(cfg));
    }

    RunRecord record(paths::run_record(cfg, vname), vname, reps);
    SuiteSources suites(cfg.tests_dir);

    struct Task {
        const prefix::TestPrefix* prefix;
        int rep;
    };
    std::vector<Task> tasks;
    std::size_t already = 0;
    for (const auto& p : prefixes) {
        for (int r = 0; r < reps; ++r) {
            if (record.has(entry_key(p.test_id, r))) ++already;
            else tasks.push_back(Task{&p, r});
        }
    }

    std::atomic<std::size_t> candidates{0}, failures{0};
    std::mutex rag_mu;
    util::parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
        const auto& p = *tasks[i].prefix;
        const int rep = tasks[i].rep;
        json entry{{"test_id", p.test_id}, {"replication", rep}, {"oracle_kind", std::string(prefix::to_string(p.oracle_kind))}};

        std::string prompt;
        try {
            auto ctx = prompts::build_context(variant, p, kb);
            prompt = prompts::render(variant, ctx, templates);
            if (embedder) {
                std::vector<rag::Scored> hits;
                {
                    std::lock_guard lock(rag_mu);
                    hits = store.retrieve(prompt, *embedder, cfg.rag.k);
                }
                prompt = rag::with_provided_files(hits, prompt);
            }
        } catch (const TemplateError& e) {
            entry["outcome"] = "failure";
            entry["reason"] = std::string("template: ") + e.what();
        } catch (const FocalNotFound& e) {
            entry["outcome"] = "failure";
            entry["reason"] = e.what();
        }
        if (entry.contains("outcome")) {
            ++failures;
            record.put(entry_key(p.test_id, rep), std::move(entry));
            return;
        }
        if (cfg.keep_prompts) {
            util::write_file_atomic(paths::prompts_dir(cfg, vname) / (safe_name(p.test_id) + ".txt"), prompt);
        }

        exec::LoopInput in{p, suites.get(p.suite_path), prompt, rep,
                           exec::Subject::original(p.focal.class_name, source_file_of(kb, p.focal.class_name))};
        auto result = exec::generation_loop(in, gateway, *toolchain, cfg.budget, cfg.retries);
        json attempts = json::array();
        if (auto* cand = std::get_if<exec::AssertionCandidate>(&result)) {
            for (const auto& a : cand->attempts) attempts.push_back(exec::to_json(a));
            fs::path file = paths::candidates_dir(cfg, vname) / (safe_name(p.test_id) + "_" + std::to_string(rep) + ".txt");
            util::write_file_atomic(file, cand->completed_source);
            entry["outcome"] = "candidate";
            entry["assertion"] = cand->assertion;
            entry["validation"] = exec::to_json(cand->validation);
            entry["candidate_file"] = file.lexically_relative(cfg.output_dir).generic_string();
            ++candidates;
        } else {
            const auto& fail = std::get<exec::GenerationFailure>(result);
            for (const auto& a : fail.attempts) attempts.push_back(exec::to_json(a));
            entry["outcome"] = "failure";
            entry["reason"] = fail.reason;
            ++failures;
        }
        entry["attempts"] = std::move(attempts);
        record.put(entry_key(p.test_id, rep), std::move(entry));
    });

    std::lock_guard lock(io_mutex());
    io.out << vname << ": " << tasks.size() << " new entries (" << candidates.load() << " candidates, "
           << failures.load() << " failures), " << already << " already recorded, " << gateway.calls()
           << " backend calls -> " << paths::run_record(cfg, vname).string() << "\n";
    return 0;
}

namespace {

struct EvalJob {
    const prefix::TestPrefix* prefix;
    int rep;
};

struct EvalResult {
    eval::Verdict verdict = eval::Verdict::Failure;
    std::optional<exec::ExecOutcome> on_original, on_mutant;
    std::string reason;
};

std::vector<eval::VariantSummary> load_reports(const RunConfig& cfg) {
    std::vector<eval::VariantSummary> out;
    for (const auto& v : variant_order()) {
        fs::path file = paths::report_dir(cfg) / (v + ".json");
        std::error_code ec;
        if (!fs::is_regular_file(file, ec)) continue;
        try {
            json j = json::parse(util::read_file(file));
            eval::VariantSummary s;
            s.variant = v;
            for (const auto& r : j.at("summary").at("assertion")) s.assertion.push_back(eval::report_from_json(r));
            for (const auto& r : j.at("summary").at("exception")) s.exception.push_back(eval::report_from_json(r));
            out.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ConfigError(file.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

int cmd_evaluate(const RunConfig& cfg, Io io, const Services& services, std::vector<std::string> variant_names) {
    cfg.validate();
    if (variant_names.empty()) {
        for (const auto& v : variant_order()) {
            std::error_code ec;
            if (fs::is_regular_file(paths::run_record(cfg, v), ec)) variant_names.push_back(v);
        }
    }
    if (variant_names.empty()) {
        warn(io, "no run records under " + (cfg.output_dir / "runs").string());
        variant_names.push_back(std::string(prompts::to_string(prompts::parse_variant(cfg.variant))));
    }
    std::shared_ptr<exec::Toolchain> toolchain = services.toolchain ? services.toolchain : make_toolchain(cfg);
    auto kb = ensure_kb(cfg, io);
    std::error_code ec;
    if (!fs::is_regular_file(paths::manifest(cfg), ec)) cmd_preprocess(cfg, io);
    auto prefixes = load_manifest(cfg);

    for (const auto& raw_name : variant_names) {
        const std::string vname(prompts::to_string(prompts::parse_variant(raw_name)));
        std::vector<std::string> warnings;
        RunRecord record(paths::run_record(cfg, vname), vname, std::nullopt);
        const int reps = record.replications() > 0 ? record.replications() : cfg.replications_for(vname);
        if (record.size() == 0) warnings.push_back("no candidates recorded for variant " + vname);

        std::vector<EvalJob> jobs;
        for (const auto& p : prefixes) {
            for (int r = 0; r < reps; ++r) jobs.push_back(EvalJob{&p, r});
        }
        std::vector<EvalResult> results(jobs.size());
        util::parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
            const auto& p = *jobs[i].prefix;
            auto& res = results[i];
            const json* entry = record.find(entry_key(p.test_id, jobs[i].rep));
            if (!entry) {
                res.reason = "missing replication";
                return;
            }
            if (entry->value("outcome", "") != "candidate") {
                res.reason = "no candidate: " + entry->value("reason", std::string("generation failed"));
                return;
            }
            auto mutant = mutant_for(cfg, p);
            if (!mutant) {
                res.reason = "no mutant for class " + p.focal.class_name;
                return;
            }
            exec::CompletedTest test;
            test.test_id = p.test_id;
            test.test_name = p.test_name;
            test.suite_class = p.suite_class;
            test.suite_path = p.suite_path;
            test.assertion = entry->value("assertion", "");
            try {
                test.source = util::read_file(cfg.output_dir / entry->value("candidate_file", ""));
            } catch (const ConfigError& e) {
                res.reason = std::string("candidate source unavailable: ") + e.what();
                return;
            }
            try {
                test.suite_package = java::parse_compilation_unit(test.source).package;
            } catch (const std::exception&) {
            }
            std::string file = source_file_of(kb, p.focal.class_name);
            res.on_original = toolchain->compile_and_run(test, exec::Subject::original(p.focal.class_name, file));
            res.on_mutant = toolchain->compile_and_run(test, exec::Subject::mutant(p.focal.class_name, file, *mutant));
            res.verdict = eval::classify(res.on_original->status, res.on_mutant->status);
            if (res.verdict == eval::Verdict::Failure) {
                res.reason = "original " + std::string(exec::to_string(res.on_original->status)) + ", mutant " +
                             std::string(exec::to_string(res.on_mutant->status));
            }
        });

        std::vector<eval::TestRecord> tests;
        ordered_json test_json = ordered_json::array();
        std::size_t k = 0;
        for (const auto& p : prefixes) {
            eval::TestRecord tr{p.test_id, p.oracle_kind, {}};
            ordered_json recs = ordered_json::array();
            for (int r = 0; r < reps; ++r, ++k) {
                const auto& res = results[k];
                tr.replications.push_back(res.verdict);
                ordered_json rj{{"replication", r}, {"class", std::string(eval::to_string(res.verdict))}};
                rj["on_original"] = res.on_original ? ordered_json(exec::to_json(*res.on_original)) : ordered_json(nullptr);
                rj["on_mutant"] = res.on_mutant ? ordered_json(exec::to_json(*res.on_mutant)) : ordered_json(nullptr);
                if (!res.reason.empty()) rj["reason"] = res.reason;
                recs.push_back(std::move(rj));
            }
            ordered_json verdicts;
            for (double t : cfg.thresholds) {
                verdicts[eval::format_percent(t)] = std::string(eval::to_string(eval::aggregate(tr.replications, t, reps)));
            }
            test_json.push_back(ordered_json{{"test_id", p.test_id},
                                             {"oracle_kind", std::string(prefix::to_string(p.oracle_kind))},
                                             {"focal", p.focal.class_name + "." + p.focal.method_name},
                                             {"verdicts", verdicts},
                                             {"records", std::move(recs)}});
            tests.push_back(std::move(tr));
        }

        auto summary = eval::summarize_variant(vname, tests, cfg.thresholds, static_cast<std::size_t>(reps), &warnings);
        ordered_json sj{{"assertion", ordered_json::array()}, {"exception", ordered_json::array()}};
        for (const auto& r : summary.assertion) sj["assertion"].push_back(eval::to_json(r));
        for (const auto& r : summary.exception) sj["exception"].push_back(eval::to_json(r));
        ordered_json report{{"variant", vname},         {"replications", reps}, {"thresholds", cfg.thresholds},
                            {"summary", sj},            {"tests", test_json},   {"warnings", warnings}};
        util::write_file_atomic(paths::report_dir(cfg) / (vname + ".json"), report.dump(2) + "\n");
        for (const auto& w : warnings) warn(io, w);
        io.out << vname << ": evaluated " << prefixes.size() << " tests x " << reps << " replications\n";
    }

    auto all = load_reports(cfg);
    util::write_file_atomic(paths::report_dir(cfg) / "summary.md", eval::render_markdown(all));
    io.out << "report -> " << (paths::report_dir(cfg) / "summary.md").string() << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg, Io io) {
    auto all = load_reports(cfg);
    if (all.empty()) throw ConfigError("no reports under " + paths::report_dir(cfg).string() + "; run evaluate first");
    std::string md = eval::render_markdown(all);
    util::write_file_atomic(paths::report_dir(cfg) / "summary.md", md);
    io.out << md;
    return 0;
}

}  // namespace oraclegen::pipeline
