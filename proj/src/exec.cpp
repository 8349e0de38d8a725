#include "oraclegen/exec.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <unistd.h>

#include "oraclegen/error.hpp"
#include "oraclegen/java/parser.hpp"
#include "oraclegen/process.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::exec {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::CompileError: return "CompileError";
        case Status::RuntimeError: return "RuntimeError";
        case Status::Pass: return "Pass";
        case Status::Fail: return "Fail";
    }
    return "RuntimeError";
}

Status status_from_string(std::string_view s) {
    if (s == "CompileError") return Status::CompileError;
    if (s == "RuntimeError") return Status::RuntimeError;
    if (s == "Pass") return Status::Pass;
    if (s == "Fail") return Status::Fail;
    throw ConfigError("unknown execution status '" + std::string(s) + "'");
}

json to_json(const ExecOutcome& o) {
    return json{{"status", std::string(to_string(o.status))}, {"log", o.log}, {"duration", o.duration}};
}

ExecOutcome outcome_from_json(const json& j) {
    ExecOutcome o;
    o.status = status_from_string(j.at("status").get<std::string>());
    o.log = j.value("log", "");
    o.duration = j.value("duration", 0.0);
    return o;
}

// ---------------------------------------------------------------------------

namespace {

std::string join_classpath(const std::vector<std::string>& entries) {
    std::string out;
    for (const auto& e : entries) {
        if (e.empty()) continue;
        if (!out.empty()) out += ':';
        out += e;
    }
    return out;
}

std::string tail(const std::string& s, std::size_t max = 4000) {
    return s.size() <= max ? s : s.substr(s.size() - max);
}

class Workspace {
public:
    Workspace(const fs::path& root, bool keep) : keep_(keep) {
        fs::path base = root.empty() ? fs::temp_directory_path() : root;
        fs::create_directories(base);
        std::string tmpl = (base / "og-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw EnvironmentError("cannot create workspace under " + base.string());
        path_ = tmpl;
    }
    ~Workspace() {
        if (keep_) return;
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    bool keep_;
};

}  // namespace

ProcessToolchain::ProcessToolchain(ProcessToolchainConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.compiler.empty()) throw ConfigError("toolchain.compiler is empty");
    if (cfg_.runner.empty()) throw ConfigError("toolchain.runner is empty");
    if (!cfg_.project_root.empty()) {
        std::error_code ec;
        if (!fs::is_directory(cfg_.project_root, ec)) {
            throw ConfigError("project root is not a directory: " + cfg_.project_root.string());
        }
        for (const auto& e : fs::recursive_directory_iterator(cfg_.project_root)) {
            if (e.is_regular_file() && e.path().extension() == ".java") {
                sources_.push_back(e.path().lexically_relative(cfg_.project_root).generic_string());
            }
        }
        std::sort(sources_.begin(), sources_.end());
    }
}

ExecOutcome ProcessToolchain::compile_and_run(const CompletedTest& test, const Subject& subject) {
    Workspace ws(cfg_.work_root, cfg_.keep_workspaces);
    const fs::path src = ws.path() / "src";
    const fs::path classes = ws.path() / "classes";
    fs::create_directories(classes);

    std::string swapped = subject.source_file;
    if (subject.kind == Subject::Kind::Mutant && swapped.empty()) {
        for (const auto& s : sources_) {
            if (fs::path(s).stem() == subject.class_name) {
                swapped = s;
                break;
            }
        }
        if (swapped.empty()) swapped = subject.class_name + ".java";
    }

    std::vector<std::string> files;
    for (const auto& rel : sources_) {
        if (subject.kind == Subject::Kind::Mutant && rel == swapped) continue;
        util::write_file_atomic(src / rel, util::read_file(cfg_.project_root / rel));
        files.push_back((src / rel).string());
    }
    if (subject.kind == Subject::Kind::Mutant) {
        util::write_file_atomic(src / swapped, util::read_file(subject.mutant_file));
        files.push_back((src / swapped).string());
    }
    fs::path test_file = ws.path() / "test" / (test.suite_path.empty() ? test.suite_class + ".java" : test.suite_path);
    util::write_file_atomic(test_file, test.source);
    files.push_back(test_file.string());

    ExecOutcome out;
    std::vector<std::string> argv = cfg_.compiler;
    argv.insert(argv.end(), {"-d", classes.string()});
    std::string cp = join_classpath(cfg_.classpath);
    if (!cp.empty()) argv.insert(argv.end(), {"-cp", cp});
    argv.insert(argv.end(), files.begin(), files.end());

    auto compiled = process::run(argv, "", cfg_.timeout, ws.path());
    if (compiled.spawn_errno) throw EnvironmentError("cannot launch compiler '" + cfg_.compiler.front() + "'");
    out.duration = compiled.duration.count();
    if (compiled.timed_out) {
        out.status = Status::RuntimeError;
        out.log = "compiler timed out\n" + tail(compiled.err);
        return out;
    }
    if (compiled.exit_code != 0) {
        out.status = Status::CompileError;
        out.log = tail(compiled.out + compiled.err);
        return out;
    }

    std::vector<std::string> run_argv = cfg_.runner;
    std::vector<std::string> run_cp{classes.string()};
    run_cp.insert(run_cp.end(), cfg_.classpath.begin(), cfg_.classpath.end());
    run_argv.push_back(test.suite_fqn());
    run_argv.push_back(join_classpath(run_cp));
    auto ran = process::run(run_argv, "", cfg_.timeout, ws.path());
    if (ran.spawn_errno) throw EnvironmentError("cannot launch runner '" + cfg_.runner.front() + "'");
    out.duration += ran.duration.count();
    out.log = tail(ran.out + ran.err);
    if (ran.timed_out) {
        out.status = Status::RuntimeError;
        out.log = "test run timed out\n" + out.log;
        return out;
    }

    std::istringstream lines(ran.out);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string name, verdict;
        fields >> name >> verdict;
        if (name != test.test_name) continue;
        if (verdict == "PASS") out.status = Status::Pass;
        else if (verdict == "FAIL") out.status = Status::Fail;
        else out.status = Status::RuntimeError;
        return out;
    }
    out.status = Status::RuntimeError;
    out.log = "runner reported no result for " + test.test_name + "\n" + out.log;
    return out;
}

// ---------------------------------------------------------------------------

ScriptedToolchain::ScriptedToolchain(json playbook) {
    try {
        if (playbook.contains("default")) default_ = status_from_string(playbook.at("default").get<std::string>());
        for (const auto& r : playbook.value("rules", json::array())) {
            Rule rule;
            rule.test = r.value("test", "");
            rule.contains = r.value("contains", "");
            std::string subj = r.value("subject", "any");
            if (subj == "original") rule.subject = Subject::Kind::Original;
            else if (subj == "mutant") rule.subject = Subject::Kind::Mutant;
            else if (subj != "any") throw ConfigError("scripted toolchain: unknown subject '" + subj + "'");
            rule.status = status_from_string(r.at("status").get<std::string>());
            rules_.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scripted toolchain playbook: ") + e.what());
    }
}

std::unique_ptr<ScriptedToolchain> ScriptedToolchain::from_file(const fs::path& file) {
    try {
        return std::make_unique<ScriptedToolchain>(json::parse(util::read_file(file)));
    } catch (const json::exception& e) {
        throw ConfigError("scripted toolchain playbook " + file.string() + ": " + e.what());
    }
}

ExecOutcome ScriptedToolchain::compile_and_run(const CompletedTest& test, const Subject& subject) {
    calls_.fetch_add(1);
    for (const auto& r : rules_) {
        if (!r.test.empty() && r.test != test.test_id && r.test != test.test_name) continue;
        if (!r.contains.empty() && test.assertion.find(r.contains) == std::string::npos) continue;
        if (r.subject && *r.subject != subject.kind) continue;
        return ExecOutcome{r.status, "scripted", 0.0};
    }
    return ExecOutcome{default_, "scripted default", 0.0};
}

// ---------------------------------------------------------------------------

std::string assemble_test(const prefix::TestPrefix& prefix, std::string_view assertion) {
    std::string stmt(util::trim(assertion));
    if (stmt.empty()) throw AssembleError("empty assertion");
    try {
        auto parsed = java::parse_block_statements(stmt);
        if (parsed.size() != 1 || parsed.front().kind != java::StmtKind::Simple) {
            throw AssembleError("assertion is not a single statement: " + stmt);
        }
    } catch (const AssembleError&) {
        throw;
    } catch (const std::exception& e) {
        throw AssembleError("assertion does not parse: " + std::string(e.what()));
    }

    const std::string& body = prefix.prefix_body;
    if (prefix::count_placeholders(body) != 1) throw AssembleError(prefix.test_id + ": prefix must hold exactly one placeholder");
    std::size_t pos = body.find(prefix::kPlaceholder);
    std::size_t line_begin = body.rfind('\n', pos);
    line_begin = line_begin == std::string::npos ? 0 : line_begin + 1;
    while (util::trim(std::string_view(body).substr(line_begin, pos - line_begin)).size() != 0) {
        pos = body.find(prefix::kPlaceholder, pos + 1);
        line_begin = body.rfind('\n', pos) + 1;
    }
    std::string out = body.substr(0, pos) + stmt + body.substr(pos + prefix::kPlaceholder.size());
    try {
        java::parse_block_statements(out);
    } catch (const std::exception& e) {
        throw AssembleError(prefix.test_id + ": completed test does not parse: " + e.what());
    }
    return out;
}

std::string splice_into_suite(std::string_view suite_source, std::string_view test_name, std::string_view new_body) {
    java::CompilationUnit cu;
    try {
        cu = java::parse_compilation_unit(suite_source);
    } catch (const std::exception& e) {
        throw AssembleError(std::string("suite does not parse: ") + e.what());
    }
    for (const auto& type : cu.types) {
        for (const auto& m : type.methods) {
            if (m.name != test_name || !m.body) continue;
            if (std::find(m.annotations.begin(), m.annotations.end(), "Test") == m.annotations.end()) continue;
            std::string out(suite_source.substr(0, m.body->begin));
            out += new_body;
            out += suite_source.substr(m.body->end);
            return out;
        }
    }
    throw AssembleError("test method " + std::string(test_name) + " not found in suite");
}

CompletedTest complete_test(const prefix::TestPrefix& prefix, std::string_view suite_source, std::string_view assertion) {
    CompletedTest t;
    t.test_id = prefix.test_id;
    t.test_name = prefix.test_name;
    t.suite_class = prefix.suite_class;
    t.suite_path = prefix.suite_path;
    t.assertion = std::string(util::trim(assertion));
    t.source = splice_into_suite(suite_source, prefix.test_name, assemble_test(prefix, assertion));
    try {
        t.suite_package = java::parse_compilation_unit(suite_source).package;
    } catch (const std::exception&) {
    }
    return t;
}

// ---------------------------------------------------------------------------

LoopResult generation_loop(const LoopInput& in, llm::Backend& backend, Toolchain& toolchain, int budget, int retries) {
    if (budget < 1) throw ConfigError("budget must be >= 1");
    std::vector<Attempt> attempts;
    llm::GenerationRequest req{in.prompt, in.prefix.test_id, in.prefix.test_name, in.replication};
    for (int i = 1; i <= budget; ++i) {
        Attempt a;
        a.index = i;
        try {
            auto gen = llm::generate_with_retries(backend, req, retries);
            a.llm_calls = gen.calls;
            a.assertion = gen.assertion;
            CompletedTest test = complete_test(in.prefix, in.suite_source, gen.assertion);
            ExecOutcome outcome = toolchain.compile_and_run(test, in.original);
            a.status = outcome.status;
            if (outcome.status == Status::Pass || outcome.status == Status::Fail) {
                attempts.push_back(a);
                return AssertionCandidate{in.prefix.test_id, in.replication, gen.assertion, test.source, outcome,
                                          std::move(attempts)};
            }
            a.error = std::string(to_string(outcome.status)) + ": " + tail(outcome.log, 500);
        } catch (const AttemptFailed& e) {
            a.llm_calls = retries;
            a.error = e.what();
        } catch (const AssembleError& e) {
            a.error = std::string("assemble: ") + e.what();
        }
        attempts.push_back(std::move(a));
    }
    return GenerationFailure{in.prefix.test_id, in.replication,
                             "budget of " + std::to_string(budget) + " attempts exhausted", std::move(attempts)};
}

json to_json(const Attempt& a) {
    json j{{"index", a.index}, {"llm_calls", a.llm_calls}, {"assertion", a.assertion}};
    j["status"] = a.status ? json(std::string(to_string(*a.status))) : json(nullptr);
    j["error"] = a.error;
    return j;
}

Attempt attempt_from_json(const json& j) {
    Attempt a;
    a.index = j.value("index", 0);
    a.llm_calls = j.value("llm_calls", 0);
    a.assertion = j.value("assertion", "");
    if (j.contains("status") && !j.at("status").is_null()) a.status = status_from_string(j.at("status").get<std::string>());
    a.error = j.value("error", "");
    return a;
}

}  // namespace oraclegen::exec
