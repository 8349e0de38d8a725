#pragma once

// Local chunk/embed/retrieve store over the knowledge base JSON.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "oraclegen/kb.hpp"

namespace oraclegen::rag {

struct Chunk {
    std::string doc_id;
    std::size_t index = 0;
    std::size_t start = 0;  // token span [start, end)
    std::size_t end = 0;
    std::string text;       // tokens of the span joined by single spaces
    bool operator==(const Chunk&) const = default;
};

/// Whitespace-delimited words.
std::vector<std::string> tokenize(std::string_view text);

/// Chunks start at multiples of (chunk_size - overlap); the last one may be
/// short. Throws ConfigError unless 0 <= overlap < chunk_size.
std::vector<Chunk> chunk_document(const std::string& doc_id, std::string_view text, std::size_t chunk_size = 800,
                                  std::size_t overlap = 400);

using Embedding = std::vector<double>;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual Embedding embed(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
};

/// Feature hashing of lowercased alphanumeric words, L2-normalized. The empty
/// text maps to the zero vector.
class HashingEmbedder : public EmbeddingProvider {
public:
    explicit HashingEmbedder(std::size_t dimension = 256);
    Embedding embed(std::string_view text) override;
    std::size_t dimension() const override { return dim_; }

private:
    std::size_t dim_;
};

/// OpenAI-compatible /embeddings endpoint. Failures throw BackendError.
class HttpEmbedder : public EmbeddingProvider {
public:
    HttpEmbedder(std::string url, std::string model, std::size_t dimension, const std::string& api_key_env,
                 double timeout_seconds = 60.0);
    Embedding embed(std::string_view text) override;
    std::size_t dimension() const override { return dim_; }

private:
    std::string base_, path_, model_, api_key_;
    std::size_t dim_;
    double timeout_;
};

struct RagParams {
    std::size_t chunk_size = 800;
    std::size_t overlap = 400;
    std::size_t k = 20;
    std::size_t dimension = 256;
    std::string provider = "hashing";  // hashing | http
    std::string endpoint;
    std::string model;
    std::string api_key_env = "AUGMENTEST_API_KEY";
};

std::unique_ptr<EmbeddingProvider> make_embedder(const RagParams& params);

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
double cosine(const Embedding& a, const Embedding& b);

struct Scored {
    Chunk chunk;
    double score = 0.0;
};

class VectorStore {
public:
    void add(Chunk chunk, Embedding embedding);
    std::size_t size() const noexcept { return chunks_.size(); }
    const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
    const std::vector<Embedding>& embeddings() const noexcept { return vectors_; }

    /// One document per class: its canonical JSON, id "<package>.<ClassName>".
    static VectorStore build(const kb::KnowledgeBase& kb, EmbeddingProvider& embedder, const RagParams& params);

    /// At most k chunks by non-increasing score, ties by (doc_id, index).
    std::vector<Scored> retrieve(const Embedding& query, std::size_t k = 20) const;
    std::vector<Scored> retrieve(std::string_view query, EmbeddingProvider& embedder, std::size_t k = 20) const;

    /// One JSON object per line: doc_id, index, start, end, text, embedding.
    void save(const std::filesystem::path& file) const;
    static VectorStore load(const std::filesystem::path& file);

private:
    std::vector<Chunk> chunks_;
    std::vector<Embedding> vectors_;
};

/// "Provided files:" block with the retrieved chunks, followed by the prompt.
std::string with_provided_files(const std::vector<Scored>& retrieved, const std::string& prompt);

}  // namespace oraclegen::rag
