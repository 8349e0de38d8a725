#pragma once

// Model backends behind one interface, plus assertion extraction and the
// bounded retry wrapper used by the generation loop.

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace oraclegen::llm {

enum class BackendKind { HttpChat, LocalCommand, Mock };

BackendKind parse_backend_kind(std::string_view s);
std::string_view to_string(BackendKind k) noexcept;

struct BackendConfig {
    BackendKind kind = BackendKind::Mock;
    std::string endpoint;  // URL (http_chat), shell command (local_command) or playbook path (mock)
    std::string model;
    double temperature = 0.2;
    int max_tokens = 256;
    double timeout = 60.0;  // seconds
    std::string api_key_env = "AUGMENTEST_API_KEY";
    unsigned max_in_flight = 4;
    double requests_per_second = 0.0;  // 0 = unlimited

    /// Throws ConfigError.
    void validate() const;
    static BackendConfig from_json(const nlohmann::json& j);
};

struct GenerationRequest {
    std::string prompt;
    std::string test_id;    // Suite.test
    std::string test_name;  // test
    int replication = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    /// Raw completion text. BackendError on transport/process failures,
    /// ConfigError on authentication failures.
    virtual std::string generate(const GenerationRequest& req) = 0;
};

/// Scripted replies keyed by test and replication. Playbook:
///   { "<Suite.test or test>": [ <rep0>, <rep1>, ... ] | <entry> }
/// where an entry is a reply string, an {"error": "backend"|"auth"} object,
/// or an array of those consumed one per call (the last one repeats).
class MockBackend : public Backend {
public:
    explicit MockBackend(nlohmann::json playbook);
    static std::unique_ptr<MockBackend> from_file(const std::string& path);

    std::string generate(const GenerationRequest& req) override;

    std::size_t calls() const noexcept { return calls_.load(); }
    std::size_t calls_for(const std::string& test_id, int replication) const;

private:
    const nlohmann::json* entry_for(const GenerationRequest& req) const;

    nlohmann::json playbook_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex mu_;
    std::map<std::pair<std::string, int>, std::size_t> per_key_;
};

/// Runs `/bin/sh -c <command>` with the prompt on stdin; stdout is the reply.
class LocalCommandBackend : public Backend {
public:
    LocalCommandBackend(std::string command, std::chrono::milliseconds timeout);
    std::string generate(const GenerationRequest& req) override;

private:
    std::string command_;
    std::chrono::milliseconds timeout_;
};

/// OpenAI-compatible chat completions endpoint.
class HttpChatBackend : public Backend {
public:
    /// Throws ConfigError when the URL is malformed or the API key variable is unset.
    explicit HttpChatBackend(const BackendConfig& cfg);
    std::string generate(const GenerationRequest& req) override;

    static nlohmann::json request_body(const BackendConfig& cfg, const std::string& prompt);

private:
    BackendConfig cfg_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
    std::string api_key_;
};

/// Bounds concurrent in-flight calls and spaces requests per the rate limit.
class Gateway : public Backend {
public:
    Gateway(std::shared_ptr<Backend> inner, unsigned max_in_flight, double requests_per_second = 0.0);
    std::string generate(const GenerationRequest& req) override;
    std::size_t calls() const noexcept { return calls_.load(); }
    Backend& inner() noexcept { return *inner_; }

private:
    std::shared_ptr<Backend> inner_;
    std::counting_semaphore<1024> slots_;
    std::chrono::nanoseconds interval_{0};
    std::mutex rate_mu_;
    std::chrono::steady_clock::time_point next_{};
    std::atomic<std::size_t> calls_{0};
};

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);

/// First assertion statement (or single call statement) in a model reply.
/// Throws ExtractionError.
std::string extract_assertion(std::string_view raw);

struct RetryResult {
    std::string assertion;
    int calls = 0;
    std::vector<std::string> errors;  // failures before the success
};

/// At most max_retries backend calls. BackendError/ExtractionError consume a
/// retry, ConfigError propagates, exhaustion throws AttemptFailed.
RetryResult generate_with_retries(Backend& backend, const GenerationRequest& req, int max_retries = 3);

}  // namespace oraclegen::llm
