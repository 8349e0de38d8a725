#include "oraclegen/rag.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oraclegen/error.hpp"
#include "oraclegen/util.hpp"

namespace oraclegen::rag {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t b = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > b) out.emplace_back(text.substr(b, i - b));
    }
    return out;
}

std::vector<Chunk> chunk_document(const std::string& doc_id, std::string_view text, std::size_t chunk_size,
                                  std::size_t overlap) {
    if (chunk_size == 0 || overlap >= chunk_size) {
        throw ConfigError("chunking needs 0 <= overlap < chunk_size (got " + std::to_string(overlap) + " / " +
                          std::to_string(chunk_size) + ")");
    }
    auto tokens = tokenize(text);
    std::vector<Chunk> out;
    const std::size_t stride = chunk_size - overlap;
    for (std::size_t start = 0; start < tokens.size(); start += stride) {
        std::size_t end = std::min(start + chunk_size, tokens.size());
        Chunk c{doc_id, out.size(), start, end, {}};
        for (std::size_t i = start; i < end; ++i) {
            if (i > start) c.text += ' ';
            c.text += tokens[i];
        }
        out.push_back(std::move(c));
        if (end == tokens.size()) break;
    }
    return out;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dim_(dimension) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be >= 1");
}

Embedding HashingEmbedder::embed(std::string_view text) {
    Embedding v(dim_, 0.0);
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (unsigned char c : word) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
        word.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else flush();
    }
    flush();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

HttpEmbedder::HttpEmbedder(std::string url, std::string model, std::size_t dimension, const std::string& api_key_env,
                           double timeout_seconds)
    : model_(std::move(model)), dim_(dimension), timeout_(timeout_seconds) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("rag.endpoint is not a URL: " + url);
    auto path_begin = url.find('/', scheme_end + 3);
    base_ = url.substr(0, path_begin);
    path_ = path_begin == std::string::npos ? "/v1/embeddings" : url.substr(path_begin);
    if (!api_key_env.empty()) {
        const char* key = std::getenv(api_key_env.c_str());
        if (!key || !*key) throw BackendConfigError("environment variable " + api_key_env + " is not set");
        api_key_ = key;
    }
}

Embedding HttpEmbedder::embed(std::string_view text) {
    httplib::Client client(base_);
    auto secs = static_cast<time_t>(timeout_);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    json body{{"model", model_}, {"input", std::string(text)}, {"dimensions", dim_}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw BackendError("embeddings: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403) throw BackendConfigError("embeddings: authentication rejected");
    if (res->status != 200) throw BackendError("embeddings: HTTP " + std::to_string(res->status));
    try {
        auto v = json::parse(res->body).at("data").at(0).at("embedding").get<Embedding>();
        if (v.size() != dim_) throw BackendError("embeddings: expected dimension " + std::to_string(dim_));
        return v;
    } catch (const json::exception& e) {
        throw BackendError(std::string("embeddings: malformed response: ") + e.what());
    }
}

std::unique_ptr<EmbeddingProvider> make_embedder(const RagParams& params) {
    if (params.provider == "hashing") return std::make_unique<HashingEmbedder>(params.dimension);
    if (params.provider == "http") {
        return std::make_unique<HttpEmbedder>(params.endpoint, params.model, params.dimension, params.api_key_env);
    }
    throw ConfigError("unknown embedding provider '" + params.provider + "'");
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) throw ConfigError("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

void VectorStore::add(Chunk chunk, Embedding embedding) {
    if (!vectors_.empty() && embedding.size() != vectors_.front().size()) {
        throw ConfigError("embedding dimension mismatch in vector store");
    }
    chunks_.push_back(std::move(chunk));
    vectors_.push_back(std::move(embedding));
}

VectorStore VectorStore::build(const kb::KnowledgeBase& kb, EmbeddingProvider& embedder, const RagParams& params) {
    VectorStore store;
    for (const auto& c : kb.classes) {
        std::string doc_id = c.package.empty() ? c.class_name : c.package + "." + c.class_name;
        for (auto& chunk : chunk_document(doc_id, kb::canonical(kb::to_json(c)), params.chunk_size, params.overlap)) {
            Embedding e = embedder.embed(chunk.text);
            store.add(std::move(chunk), std::move(e));
        }
    }
    return store;
}

std::vector<Scored> VectorStore::retrieve(const Embedding& query, std::size_t k) const {
    std::vector<Scored> all;
    all.reserve(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) all.push_back(Scored{chunks_[i], cosine(query, vectors_[i])});
    auto cmp = [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
        return a.chunk.index < b.chunk.index;
    };
    std::sort(all.begin(), all.end(), cmp);
    if (all.size() > k) all.resize(k);
    return all;
}

std::vector<Scored> VectorStore::retrieve(std::string_view query, EmbeddingProvider& embedder, std::size_t k) const {
    if (chunks_.empty()) return {};
    return retrieve(embedder.embed(query), k);
}

void VectorStore::save(const std::filesystem::path& file) const {
    std::string out;
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        const auto& c = chunks_[i];
        json line{{"doc_id", c.doc_id}, {"index", c.index}, {"start", c.start},
                  {"end", c.end},       {"text", c.text},   {"embedding", vectors_[i]}};
        out += line.dump();
        out += '\n';
    }
    util::write_file_atomic(file, out);
}

VectorStore VectorStore::load(const std::filesystem::path& file) {
    VectorStore store;
    std::istringstream in(util::read_file(file));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            Chunk c{j.at("doc_id").get<std::string>(), j.at("index").get<std::size_t>(), j.at("start").get<std::size_t>(),
                    j.at("end").get<std::size_t>(), j.at("text").get<std::string>()};
            store.add(std::move(c), j.at("embedding").get<Embedding>());
        } catch (const json::exception& e) {
            throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return store;
}

std::string with_provided_files(const std::vector<Scored>& retrieved, const std::string& prompt) {
    if (retrieved.empty()) return prompt;
    std::string out = "Provided files:\n";
    for (const auto& s : retrieved) {
        out += "--- " + s.chunk.doc_id + " (chunk " + std::to_string(s.chunk.index) + ") ---\n";
        out += s.chunk.text;
        out += '\n';
    }
    out += '\n';
    out += prompt;
    return out;
}

}  // namespace oraclegen::rag
