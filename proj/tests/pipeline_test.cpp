#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "oraclegen/error.hpp"
#include "oraclegen/pipeline.hpp"
#include "test_support.hpp"

using namespace oraclegen;
using namespace oraclegen::pipeline;
using nlohmann::json;
namespace fs = std::filesystem;
using testsupport::data;
using testsupport::slurp;

namespace {

int run_cli(const std::string& args, std::string* err = nullptr) {
    testsupport::TempDir tmp;
    std::string cmd = std::string(OG_CLI) + " " + args + " >" + (tmp / "out").string() + " 2>" + (tmp / "err").string();
    int rc = std::system(cmd.c_str());
    if (err) *err = slurp(tmp / "err");
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Two-test workspace: the corpus project plus IntStackTest only.
struct Workspace {
    testsupport::TempDir dir;
    std::ostringstream out, err;
    Io io{out, err};

    Workspace() {
        fs::copy(data("corpus/project"), dir / "project", fs::copy_options::recursive);
        fs::create_directories(dir / "tests/com/acme/desk");
        fs::copy_file(data("corpus/tests/com/acme/desk/IntStackTest.java"), dir / "tests/com/acme/desk/IntStackTest.java");
        fs::create_directories(dir / "mutants");
        fs::copy_file(data("corpus/mutants/IntStack.java"), dir / "mutants/IntStack.java");
        testsupport::write(dir / "mock.json", json{{"testPushPop", "assertEquals(2, top);"},
                                                    {"testPeek", "assertEquals(5, s.peek());"}}.dump());
    }

    json base_config() const {
        return json{{"project_root", "project"},
                    {"tests_dir", "tests"},
                    {"mutants_dir", "mutants"},
                    {"backend", {{"kind", "mock"}, {"endpoint", "mock.json"}}},
                    {"toolchain", {{"kind", "scripted"}, {"playbook", "scripted.json"}}},
                    {"replications", 3},
                    {"workers", 2},
                    {"output_dir", "out"}};
    }

    RunConfig config(json overrides = json::object(), json scripted = json{{"default", "Pass"}}) const {
        json j = base_config();
        j.merge_patch(overrides);
        testsupport::write(dir / "scripted.json", scripted.dump());
        return config_from_json(j, dir.path());
    }

    json run_record(const RunConfig& c, const std::string& variant = "sp") const {
        return json::parse(slurp(paths::run_record(c, variant)));
    }
};

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, DefaultsAndRelativePaths) {
    Workspace ws;
    auto c = ws.config();
    EXPECT_EQ(c.project_root, ws.dir / "project");
    EXPECT_EQ(c.output_dir, ws.dir / "out");
    EXPECT_EQ(c.retries, 3);
    EXPECT_EQ(c.budget, 3);
    EXPECT_EQ(c.thresholds, (std::vector<double>{60, 80, 100}));
    EXPECT_EQ(c.replications, 3);
}

TEST(Config, UnknownKeyRejected) {
    Workspace ws;
    EXPECT_THROW(ws.config(json{{"replicatoins", 3}}), ConfigError);
}

TEST(Config, InvalidValuesRejected) {
    Workspace ws;
    EXPECT_THROW(ws.config(json{{"replications", 0}}).validate(), ConfigError);
    EXPECT_THROW(ws.config(json{{"thresholds", {0}}}).validate(), ConfigError);
    EXPECT_THROW(ws.config(json{{"thresholds", {101}}}).validate(), ConfigError);
    EXPECT_THROW(ws.config(json{{"variant", "xp"}}).validate(), ConfigError);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config(data("nope.json")), ConfigError); }

// ---------------------------------------------------------------- parse / preprocess

TEST(Commands, ParseWritesKb) {
    Workspace ws;
    auto c = ws.config(json{{"project_name", "desk"}});
    EXPECT_EQ(cmd_parse(c, ws.io), 0);
    EXPECT_EQ(slurp(paths::kb(c)), slurp(data("corpus/golden_kb.json")));
}

TEST(Commands, PreprocessWritesPrefixesAndManifest) {
    Workspace ws;
    auto c = ws.config();
    cmd_parse(c, ws.io);
    EXPECT_EQ(cmd_preprocess(c, ws.io), 0);
    auto manifest = json::parse(slurp(paths::manifest(c)));
    EXPECT_EQ(manifest["prefixes"].size(), 2u);
    auto text = slurp(paths::prefixes_dir(c) / "IntStackTest/testPushPop.txt");
    EXPECT_NE(text.find("// <ASSERTION_PLACEHOLDER>"), std::string::npos);
    EXPECT_EQ(text.find("assertEquals"), std::string::npos);
}

// ---------------------------------------------------------------- generate

TEST(Generate, TwoTestsThreeRepsSixEntries) {
    Workspace ws;
    auto c = ws.config();
    auto mock = std::make_shared<llm::MockBackend>(json::parse(slurp(ws.dir / "mock.json")));
    EXPECT_EQ(cmd_generate(c, ws.io, Services{mock, nullptr}), 0);
    auto rec = ws.run_record(c);
    EXPECT_EQ(rec["variant"], "sp");
    EXPECT_EQ(rec["replications"], 3);
    ASSERT_EQ(rec["entries"].size(), 6u);
    for (const auto& [key, e] : rec["entries"].items()) {
        EXPECT_EQ(e["outcome"], "candidate") << key;
        EXPECT_TRUE(fs::exists(c.output_dir / e["candidate_file"].get<std::string>())) << key;
    }
    EXPECT_EQ(rec["entries"]["IntStackTest.testPushPop#2"]["assertion"], "assertEquals(2, top);");
    EXPECT_EQ(mock->calls(), 6u);
}

TEST(Generate, RerunIsResumedWithoutBackendCalls) {
    Workspace ws;
    auto c = ws.config();
    json playbook = json::parse(slurp(ws.dir / "mock.json"));
    cmd_generate(c, ws.io, Services{std::make_shared<llm::MockBackend>(playbook), nullptr});
    auto before = slurp(paths::run_record(c, "sp"));

    auto second = std::make_shared<llm::MockBackend>(playbook);
    EXPECT_EQ(cmd_generate(c, ws.io, Services{second, nullptr}), 0);
    EXPECT_EQ(second->calls(), 0u);
    EXPECT_EQ(slurp(paths::run_record(c, "sp")), before);
}

TEST(Generate, InterruptedRunCompletesOnlyMissingEntries) {
    Workspace ws;
    auto c = ws.config();
    json playbook = json::parse(slurp(ws.dir / "mock.json"));
    cmd_generate(c, ws.io, Services{std::make_shared<llm::MockBackend>(playbook), nullptr});
    auto rec = ws.run_record(c);
    rec["entries"].erase("IntStackTest.testPeek#1");
    rec["entries"].erase("IntStackTest.testPushPop#0");
    testsupport::write(paths::run_record(c, "sp"), rec.dump(2));

    auto second = std::make_shared<llm::MockBackend>(playbook);
    cmd_generate(c, ws.io, Services{second, nullptr});
    EXPECT_EQ(second->calls(), 2u);
    EXPECT_EQ(second->calls_for("IntStackTest.testPeek", 1), 1u);
    EXPECT_EQ(ws.run_record(c)["entries"].size(), 6u);
}

TEST(Generate, BudgetExhaustedEverywhereIsFailureExitZero) {
    Workspace ws;
    auto c = ws.config(json::object(), json{{"default", "CompileError"}});
    auto mock = std::make_shared<llm::MockBackend>(json::parse(slurp(ws.dir / "mock.json")));
    EXPECT_EQ(cmd_generate(c, ws.io, Services{mock, nullptr}), 0);
    auto rec = ws.run_record(c);
    ASSERT_EQ(rec["entries"].size(), 6u);
    for (const auto& [key, e] : rec["entries"].items()) {
        EXPECT_EQ(e["outcome"], "failure") << key;
        EXPECT_EQ(e["attempts"].size(), 3u) << key;
    }
    EXPECT_EQ(mock->calls(), 18u);
}

TEST(Generate, AuthFailureIsFatalConfigError) {
    Workspace ws;
    auto c = ws.config();
    auto mock = std::make_shared<llm::MockBackend>(json{{"testPushPop", json{{"error", "auth"}}}, {"testPeek", json{{"error", "auth"}}}});
    try {
        cmd_generate(c, ws.io, Services{mock, nullptr});
        FAIL() << "expected BackendConfigError";
    } catch (const BackendConfigError& e) {
        EXPECT_EQ(exit_code_for(e), 3);
    }
}

TEST(Generate, KeepPromptsAndRagVariant) {
    Workspace ws;
    auto c = ws.config(json{{"variant", "rag-sp"}, {"keep_prompts", true}, {"replications", 1}});
    auto mock = std::make_shared<llm::MockBackend>(json::parse(slurp(ws.dir / "mock.json")));
    EXPECT_EQ(cmd_generate(c, ws.io, Services{mock, nullptr}), 0);
    EXPECT_TRUE(fs::exists(paths::rag_store(c)));
    auto prompt = slurp(paths::prompts_dir(c, "rag-sp") / "IntStackTest.testPeek.txt");
    EXPECT_EQ(prompt.rfind("Provided files:", 0), 0u);
    EXPECT_NE(prompt.find("vector store files"), std::string::npos);
}

// ---------------------------------------------------------------- evaluate

TEST(Evaluate, SingleThresholdReport) {
    Workspace ws;
    json scripted{{"default", "Pass"}, {"rules", json::array({json{{"test", "testPushPop"}, {"subject", "mutant"}, {"status", "Fail"}}})}};
    auto c = ws.config(json{{"thresholds", {50}}}, scripted);
    cmd_generate(c, ws.io);
    EXPECT_EQ(cmd_evaluate(c, ws.io), 0);
    auto report = json::parse(slurp(paths::report_dir(c) / "sp.json"));
    ASSERT_EQ(report["summary"]["assertion"].size(), 1u);
    const auto& r = report["summary"]["assertion"][0];
    EXPECT_EQ(r["threshold"], 50.0);
    EXPECT_EQ(r["tests"], 2);
    auto md = slurp(paths::report_dir(c) / "summary.md");
    EXPECT_NE(md.find("| 50% | sp | 2 | 50.0 | 0.0 | 50.0 | 0.0 | 0.0 |"), std::string::npos) << md;
    EXPECT_EQ(md.find("| 60%"), std::string::npos);
}

TEST(Evaluate, MissingMutantIsFailureWithReason) {
    Workspace ws;
    fs::remove(ws.dir / "mutants/IntStack.java");
    auto c = ws.config();
    cmd_generate(c, ws.io);
    EXPECT_EQ(cmd_evaluate(c, ws.io), 0);
    auto report = json::parse(slurp(paths::report_dir(c) / "sp.json"));
    for (const auto& t : report["tests"]) {
        for (const auto& [th, v] : t["verdicts"].items()) EXPECT_EQ(v, "Failure") << th;
        for (const auto& r : t["records"]) EXPECT_NE(r["reason"].get<std::string>().find("no mutant"), std::string::npos);
    }
}

TEST(Evaluate, NoRunRecordsWarns) {
    Workspace ws;
    auto c = ws.config();
    EXPECT_EQ(cmd_evaluate(c, ws.io), 0);
    EXPECT_NE(ws.err.str().find("warning"), std::string::npos) << ws.err.str();
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
    EXPECT_EQ(exit_code_for(EnvironmentError("x")), 2);
    EXPECT_EQ(exit_code_for(BackendConfigError("x")), 3);
    EXPECT_EQ(exit_code_for(BackendError("x")), 1);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

// ---------------------------------------------------------------- CLI process

TEST(Cli, ParseFixtureMatchesGolden) {
    testsupport::TempDir tmp;
    testsupport::write(tmp / "cfg.json", json{{"project_root", data("example/project").string()},
                                              {"project_name", "ExampleProject"}, {"output_dir", "out"}}.dump());
    EXPECT_EQ(run_cli("-c " + q(tmp / "cfg.json") + " parse"), 0);
    EXPECT_EQ(slurp(tmp / "out/kb.json"), slurp(data("example/golden/kb.json")));
}

TEST(Cli, ParseEmptyDirWarnsExitZero) {
    testsupport::TempDir tmp;
    fs::create_directories(tmp / "empty");
    std::string err;
    EXPECT_EQ(run_cli("--project-root " + q(tmp / "empty") + " -o " + q(tmp / "out") + " parse", &err), 0);
    EXPECT_NE(err.find("warning"), std::string::npos) << err;
    EXPECT_EQ(json::parse(slurp(tmp / "out/kb.json"))["classes"].size(), 0u);
}

TEST(Cli, ParseMissingDirExitTwo) {
    testsupport::TempDir tmp;
    EXPECT_EQ(run_cli("--project-root " + q(tmp / "missing") + " -o " + q(tmp / "out") + " parse"), 2);
}

TEST(Cli, UsageErrorExitTwo) {
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli(""), 2);
}

TEST(Cli, MissingApiKeyExitThreeBeforeGeneration) {
    Workspace ws;
    json j = ws.base_config();
    j["backend"] = {{"kind", "http_chat"}, {"endpoint", "http://127.0.0.1:9/v1/chat/completions"},
                    {"model", "m"}, {"api_key_env", "OG_TEST_UNSET_KEY"}};
    testsupport::write(ws.dir / "cfg.json", j.dump());
    testsupport::write(ws.dir / "scripted.json", R"({"default": "Pass"})");
    ::unsetenv("OG_TEST_UNSET_KEY");
    std::string err;
    EXPECT_EQ(run_cli("-c " + q(ws.dir / "cfg.json") + " generate", &err), 3);
    EXPECT_NE(err.find("OG_TEST_UNSET_KEY"), std::string::npos) << err;
    EXPECT_FALSE(fs::exists(ws.dir / "out/runs/sp.json"));
}

TEST(Cli, BadConfigExitTwo) {
    testsupport::TempDir tmp;
    testsupport::write(tmp / "cfg.json", "{ not json");
    EXPECT_EQ(run_cli("-c " + q(tmp / "cfg.json") + " parse"), 2);
}

TEST(Cli, FullScriptedRunThenReport) {
    Workspace ws;
    json j = ws.base_config();
    testsupport::write(ws.dir / "cfg.json", j.dump());
    testsupport::write(ws.dir / "scripted.json", R"({"default": "Pass"})");
    auto cfg = "-c " + q(ws.dir / "cfg.json");
    EXPECT_EQ(run_cli(cfg + " parse"), 0);
    EXPECT_EQ(run_cli(cfg + " preprocess"), 0);
    EXPECT_EQ(run_cli(cfg + " generate --replications 2"), 0);
    EXPECT_EQ(json::parse(slurp(ws.dir / "out/runs/sp.json"))["entries"].size(), 4u);
    EXPECT_EQ(run_cli(cfg + " evaluate --threshold 60,100"), 0);
    auto md = slurp(ws.dir / "out/report/summary.md");
    EXPECT_NE(md.find("| 100% | sp | 2 | 0.0 | 0.0 | 100.0 | 0.0 | 0.0 |"), std::string::npos) << md;
    EXPECT_EQ(run_cli(cfg + " report"), 0);
}
