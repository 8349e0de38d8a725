#include <cstdlib>

#include <httplib.h>

#include "oraclegen/error.hpp"
#include "oraclegen/llm.hpp"

namespace oraclegen::llm {

using nlohmann::json;

HttpChatBackend::HttpChatBackend(const BackendConfig& cfg) : cfg_(cfg) {
    const std::string& url = cfg.endpoint;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw BackendConfigError("backend.endpoint is not a URL: " + url);
    std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw BackendConfigError("unsupported URL scheme: " + scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https") throw BackendConfigError("https endpoints need a build with OpenSSL");
#endif
    auto path_begin = url.find('/', scheme_end + 3);
    base_ = url.substr(0, path_begin);
    path_ = path_begin == std::string::npos ? "/v1/chat/completions" : url.substr(path_begin);

    if (!cfg.api_key_env.empty()) {
        const char* key = std::getenv(cfg.api_key_env.c_str());
        if (!key || !*key) throw BackendConfigError("environment variable " + cfg.api_key_env + " is not set");
        api_key_ = key;
    }
}

json HttpChatBackend::request_body(const BackendConfig& cfg, const std::string& prompt) {
    return json{
        {"model", cfg.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", cfg.temperature},
        {"max_tokens", cfg.max_tokens},
        {"n", 1},
    };
}

std::string HttpChatBackend::generate(const GenerationRequest& req) {
    httplib::Client client(base_);
    auto secs = static_cast<time_t>(cfg_.timeout);
    auto usecs = static_cast<time_t>((cfg_.timeout - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(path_, headers, request_body(cfg_, req.prompt).dump(), "application/json");
    if (!res) throw BackendError("http_chat: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403) {
        throw BackendConfigError("http_chat: authentication rejected (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status != 200) throw BackendError("http_chat: HTTP " + std::to_string(res->status));
    try {
        json body = json::parse(res->body);
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("http_chat: malformed response: ") + e.what());
    }
}

}  // namespace oraclegen::llm
