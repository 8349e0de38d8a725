#include "oraclegen/llm.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <thread>

#include "oraclegen/error.hpp"
#include "oraclegen/process.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::llm {

using nlohmann::json;

BackendKind parse_backend_kind(std::string_view s) {
    if (s == "http_chat" || s == "http") return BackendKind::HttpChat;
    if (s == "local_command" || s == "command") return BackendKind::LocalCommand;
    if (s == "mock") return BackendKind::Mock;
    throw BackendConfigError("unknown backend kind '" + std::string(s) + "'");
}

std::string_view to_string(BackendKind k) noexcept {
    switch (k) {
        case BackendKind::HttpChat: return "http_chat";
        case BackendKind::LocalCommand: return "local_command";
        case BackendKind::Mock: return "mock";
    }
    return "mock";
}

void BackendConfig::validate() const {
    if (!(temperature >= 0.0)) throw BackendConfigError("backend.temperature must be >= 0");
    if (!(timeout > 0.0)) throw BackendConfigError("backend.timeout must be > 0");
    if (max_tokens <= 0) throw BackendConfigError("backend.max_tokens must be > 0");
    if (max_in_flight == 0) throw BackendConfigError("backend.max_in_flight must be >= 1");
    if (requests_per_second < 0.0) throw BackendConfigError("backend.requests_per_second must be >= 0");
    if (endpoint.empty()) {
        switch (kind) {
            case BackendKind::HttpChat: throw BackendConfigError("backend.endpoint (URL) is required for http_chat");
            case BackendKind::LocalCommand: throw BackendConfigError("backend.endpoint (command) is required for local_command");
            case BackendKind::Mock: throw BackendConfigError("backend.endpoint (playbook path) is required for mock");
        }
    }
}

BackendConfig BackendConfig::from_json(const json& j) {
    BackendConfig c;
    try {
        if (j.contains("kind")) c.kind = parse_backend_kind(j.at("kind").get<std::string>());
        for (const char* key : {"endpoint", "endpoint_or_path", "path", "command", "url"}) {
            if (j.contains(key)) c.endpoint = j.at(key).get<std::string>();
        }
        if (j.contains("model")) c.model = j.at("model").get<std::string>();
        if (j.contains("model_id")) c.model = j.at("model_id").get<std::string>();
        if (j.contains("temperature")) c.temperature = j.at("temperature").get<double>();
        if (j.contains("max_tokens")) c.max_tokens = j.at("max_tokens").get<int>();
        if (j.contains("timeout")) c.timeout = j.at("timeout").get<double>();
        if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
        if (j.contains("max_in_flight")) c.max_in_flight = j.at("max_in_flight").get<unsigned>();
        if (j.contains("requests_per_second")) c.requests_per_second = j.at("requests_per_second").get<double>();
    } catch (const json::exception& e) {
        throw BackendConfigError(std::string("backend config: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------

MockBackend::MockBackend(json playbook) : playbook_(std::move(playbook)) {
    if (!playbook_.is_object()) throw BackendConfigError("mock playbook must be a JSON object");
}

std::unique_ptr<MockBackend> MockBackend::from_file(const std::string& path) {
    try {
        return std::make_unique<MockBackend>(json::parse(util::read_file(path)));
    } catch (const json::exception& e) {
        throw BackendConfigError("mock playbook " + path + ": " + e.what());
    } catch (const BackendConfigError&) {
        throw;
    } catch (const ConfigError& e) {
        throw BackendConfigError(std::string("mock playbook: ") + e.what());
    }
}

std::size_t MockBackend::calls_for(const std::string& test_id, int replication) const {
    std::lock_guard lock(mu_);
    auto it = per_key_.find({test_id, replication});
    return it == per_key_.end() ? 0 : it->second;
}

const json* MockBackend::entry_for(const GenerationRequest& req) const {
    const json* per_test = nullptr;
    if (playbook_.contains(req.test_id)) per_test = &playbook_.at(req.test_id);
    else if (playbook_.contains(req.test_name)) per_test = &playbook_.at(req.test_name);
    if (!per_test) return nullptr;
    if (!per_test->is_array()) return per_test;
    if (req.replication < 0 || static_cast<std::size_t>(req.replication) >= per_test->size()) return nullptr;
    return &(*per_test)[static_cast<std::size_t>(req.replication)];
}

std::string MockBackend::generate(const GenerationRequest& req) {
    calls_.fetch_add(1);
    std::size_t n;
    {
        std::lock_guard lock(mu_);
        n = per_key_[{req.test_id, req.replication}]++;
    }
    const json* entry = entry_for(req);
    if (!entry) throw BackendError("mock: no scripted reply for " + req.test_id + " replication " + std::to_string(req.replication));
    if (entry->is_array()) {
        if (entry->empty()) throw BackendError("mock: empty reply sequence for " + req.test_id);
        entry = &(*entry)[std::min(n, entry->size() - 1)];
    }
    if (entry->is_string()) return entry->get<std::string>();
    if (entry->is_object() && entry->contains("error")) {
        std::string kind = entry->at("error").get<std::string>();
        if (kind == "auth") throw BackendConfigError("mock: authentication rejected");
        throw BackendError("mock: scripted " + kind + " failure");
    }
    throw BackendConfigError("mock: malformed playbook entry for " + req.test_id);
}

// ---------------------------------------------------------------------------

LocalCommandBackend::LocalCommandBackend(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

std::string LocalCommandBackend::generate(const GenerationRequest& req) {
    process::Result r;
    try {
        r = process::run({"/bin/sh", "-c", command_}, req.prompt, timeout_);
    } catch (const EnvironmentError& e) {
        throw BackendError(std::string("local command: ") + e.what());
    }
    if (r.timed_out) throw BackendError("local command timed out");
    if (r.spawn_errno) throw BackendError("local command could not start");
    if (r.exit_code != 0) {
        throw BackendError("local command exited with status " + std::to_string(r.exit_code) + ": " +
                           std::string(util::trim(r.err)));
    }
    return r.out;
}

// ---------------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Backend> inner, unsigned max_in_flight, double requests_per_second)
    : inner_(std::move(inner)), slots_(static_cast<std::ptrdiff_t>(std::clamp(max_in_flight, 1u, 1024u))) {
    if (requests_per_second > 0.0) {
        interval_ = std::chrono::nanoseconds(static_cast<long long>(std::llround(1e9 / requests_per_second)));
    }
}

std::string Gateway::generate(const GenerationRequest& req) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};
    if (interval_.count() > 0) {
        std::chrono::steady_clock::time_point slot;
        {
            std::lock_guard lock(rate_mu_);
            auto now = std::chrono::steady_clock::now();
            slot = std::max(now, next_);
            next_ = slot + interval_;
        }
        std::this_thread::sleep_until(slot);
    }
    calls_.fetch_add(1);
    return inner_->generate(req);
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case BackendKind::Mock: return MockBackend::from_file(cfg.endpoint);
        case BackendKind::LocalCommand:
            return std::make_shared<LocalCommandBackend>(
                cfg.endpoint, std::chrono::milliseconds(static_cast<long long>(cfg.timeout * 1000)));
        case BackendKind::HttpChat: return std::make_shared<HttpChatBackend>(cfg);
    }
    throw BackendConfigError("unsupported backend");
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 10> kAssertNames = {
    "assertEquals", "assertTrue",    "assertFalse",       "assertNull", "assertNotNull",
    "assertSame",   "assertNotSame", "assertArrayEquals", "assertThat", "fail",
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::string strip_fences(std::string_view raw) {
    std::string out;
    for (const auto& line : util::split_lines(raw)) {
        if (util::trim(line).starts_with("```")) continue;
        out += line;
        out += '\n';
    }
    return out;
}

// From `start` (an identifier), scan a call expression to the first
// top-level ';' after its argument list. Returns npos when unbalanced.
std::size_t scan_statement_end(std::string_view s, std::size_t start) {
    int depth = 0;
    bool seen_paren = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' || c == '\'') {
            char q = c;
            for (++i; i < s.size() && s[i] != q; ++i) {
                if (s[i] == '\\') ++i;
                else if (s[i] == '\n') return std::string_view::npos;
            }
            if (i >= s.size()) return std::string_view::npos;
        } else if (c == '(' || c == '[' || c == '{') {
            ++depth;
            seen_paren = true;
        } else if (c == ')' || c == ']' || c == '}') {
            if (--depth < 0) return std::string_view::npos;
        } else if (c == ';' && depth == 0) {
            return seen_paren ? i : std::string_view::npos;
        }
    }
    return std::string_view::npos;
}

bool valid_statement(std::string_view stmt) {
    return !stmt.empty() && stmt.back() == ';' && stmt.find('`') == std::string_view::npos;
}

// `name(` at a word boundary, possibly qualified: returns the start of the
// qualifier chain.
std::size_t qualified_start(std::string_view s, std::size_t name_pos) {
    std::size_t start = name_pos;
    while (start >= 2 && s[start - 1] == '.' && ident_char(s[start - 2])) {
        std::size_t k = start - 1;
        while (k > 0 && ident_char(s[k - 1])) --k;
        start = k;
    }
    return start;
}

bool is_single_call_statement(std::string_view line) {
    // ident(.ident)* ( ... ) ;  with the call parens closing right before ';'
    std::size_t i = 0;
    auto ident = [&] {
        std::size_t b = i;
        if (i < line.size() && (std::isalpha(static_cast<unsigned char>(line[i])) || line[i] == '_' || line[i] == '$')) {
            while (i < line.size() && ident_char(line[i])) ++i;
        }
        return i > b;
    };
    if (!ident()) return false;
    while (i < line.size() && line[i] == '.') {
        ++i;
        if (!ident()) return false;
    }
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size() || line[i] != '(') return false;
    std::size_t end = scan_statement_end(line, i);
    if (end != line.size() - 1) return false;
    std::string_view before = util::trim(line.substr(0, end));
    return !before.empty() && before.back() == ')';
}

}  // namespace

std::string extract_assertion(std::string_view raw) {
    std::string text = strip_fences(raw);
    std::string_view s = text;

    // Earliest recognized oracle call.
    std::size_t best = std::string_view::npos;
    std::size_t best_end = std::string_view::npos;
    std::size_t from = 0;
    while (from < s.size()) {
        std::size_t hit = std::string_view::npos, hit_len = 0;
        for (auto name : kAssertNames) {
            for (std::size_t p = s.find(name, from); p != std::string_view::npos; p = s.find(name, p + 1)) {
                bool left = p == 0 || !ident_char(s[p - 1]);
                std::size_t q = p + name.size();
                bool right = q < s.size() && !ident_char(s[q]);
                while (q < s.size() && (s[q] == ' ' || s[q] == '\t')) ++q;
                if (left && right && q < s.size() && s[q] == '(') {
                    if (p < hit) {
                        hit = p;
                        hit_len = name.size();
                    }
                    break;
                }
            }
        }
        if (hit == std::string_view::npos) break;
        std::size_t start = qualified_start(s, hit);
        std::size_t end = scan_statement_end(s, start);
        if (end != std::string_view::npos) {
            std::string_view stmt = s.substr(start, end - start + 1);
            if (valid_statement(stmt)) {
                best = start;
                best_end = end;
                break;
            }
        }
        from = hit + hit_len;
    }
    if (best != std::string_view::npos) {
        std::string stmt(s.substr(best, best_end - best + 1));
        // Multi-line statements are joined onto one line.
        if (stmt.find('\n') != std::string::npos) {
            std::string joined;
            for (const auto& line : util::split_lines(stmt)) {
                auto t = util::trim(line);
                if (t.empty()) continue;
                if (!joined.empty() && joined.back() != '(' && t.front() != ')') joined += ' ';
                joined += t;
            }
            stmt = joined;
        }
        return stmt;
    }

    // A lone method-call statement on its own line.
    for (const auto& line : util::split_lines(s)) {
        auto t = util::trim(line);
        if (t.find('`') == std::string_view::npos && is_single_call_statement(t)) return std::string(t);
    }
    throw ExtractionError("no assertion statement in model reply: " +
                          std::string(util::trim(raw.substr(0, std::min<std::size_t>(raw.size(), 120)))));
}

RetryResult generate_with_retries(Backend& backend, const GenerationRequest& req, int max_retries) {
    if (max_retries < 1) throw ConfigError("retries must be >= 1");
    RetryResult res;
    for (int i = 0; i < max_retries; ++i) {
        ++res.calls;
        try {
            res.assertion = extract_assertion(backend.generate(req));
            return res;
        } catch (const BackendError& e) {
            res.errors.push_back(std::string("backend: ") + e.what());
        } catch (const ExtractionError& e) {
            res.errors.push_back(std::string("extraction: ") + e.what());
        }
    }
    throw AttemptFailed(res.errors);
}

}  // namespace oraclegen::llm
