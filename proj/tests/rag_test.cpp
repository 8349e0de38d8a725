#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "oraclegen/error.hpp"
#include "oraclegen/kb.hpp"
#include "oraclegen/rag.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

using namespace oraclegen;
using namespace oraclegen::rag;
using testsupport::data;

namespace {

std::string synthetic_doc(std::size_t tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens; ++i) {
        if (i) out += (i % 17 == 0) ? "\n" : " ";
        out += "w" + std::to_string(i);
    }
    return out;
}

double dot(const Embedding& a, const Embedding& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Embedding& a) { return std::sqrt(dot(a, a)); }

// Brute-force ranking: every chunk scored by plain dot/(|a||b|), fully sorted.
std::vector<std::pair<double, std::size_t>> brute_force(const VectorStore& store, const Embedding& q) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& e = store.embeddings()[i];
        double n = norm(q) * norm(e);
        all.emplace_back(n == 0 ? 0.0 : dot(q, e) / n, i);
    }
    std::stable_sort(all.begin(), all.end(), [&](const auto& x, const auto& y) {
        if (std::abs(x.first - y.first) > 1e-12) return x.first > y.first;
        const auto& cx = store.chunks()[x.second];
        const auto& cy = store.chunks()[y.second];
        return std::tie(cx.doc_id, cx.index) < std::tie(cy.doc_id, cy.index);
    });
    return all;
}

VectorStore corpus_store(HashingEmbedder& emb, RagParams params = {}) {
    params.chunk_size = 60;
    params.overlap = 20;
    return VectorStore::build(kb::parse_project(data("corpus/project")).kb, emb, params);
}

}  // namespace

TEST(Chunking, StrideSpans) {
    auto chunks = chunk_document("d", synthetic_doc(2000), 800, 400);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& c : chunks) spans.emplace_back(c.start, c.end);
    EXPECT_EQ(spans, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 800}, {400, 1200}, {800, 1600}, {1200, 2000}}));
    EXPECT_EQ(chunks[1].index, 1u);
    EXPECT_EQ(tokenize(chunks[1].text).front(), "w400");
    EXPECT_EQ(tokenize(chunks[1].text).back(), "w1199");
}

TEST(Chunking, ShortDocSingleChunk) {
    auto chunks = chunk_document("d", synthetic_doc(500));
    ASSERT_EQ(chunks.size(), 1u);
    EXPECT_EQ(chunks[0].start, 0u);
    EXPECT_EQ(chunks[0].end, 500u);
}

TEST(Chunking, EmptyDoc) { EXPECT_TRUE(chunk_document("d", "  \n ").empty()); }

TEST(Chunking, UnevenTailAndZeroOverlap) {
    auto a = chunk_document("d", synthetic_doc(1000), 800, 400);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[1].start, 400u);
    EXPECT_EQ(a[1].end, 1000u);
    auto b = chunk_document("d", synthetic_doc(25), 10, 0);
    ASSERT_EQ(b.size(), 3u);
    EXPECT_EQ(b[2].start, 20u);
    EXPECT_EQ(b[2].end, 25u);
}

TEST(Chunking, CoversEveryToken) {
    for (std::size_t n : {1u, 7u, 399u, 400u, 801u, 1999u, 2001u}) {
        auto chunks = chunk_document("d", synthetic_doc(n), 800, 400);
        ASSERT_FALSE(chunks.empty());
        EXPECT_EQ(chunks.front().start, 0u);
        EXPECT_EQ(chunks.back().end, n);
        for (std::size_t i = 1; i < chunks.size(); ++i) EXPECT_EQ(chunks[i].start, chunks[i - 1].start + 400);
    }
}

TEST(Chunking, InvalidParameters) {
    EXPECT_THROW(chunk_document("d", "a b", 400, 400), ConfigError);
    EXPECT_THROW(chunk_document("d", "a b", 400, 500), ConfigError);
    EXPECT_THROW(chunk_document("d", "a b", 0, 0), ConfigError);
}

TEST(Hashing, DeterministicAndNormalized) {
    HashingEmbedder e;
    auto a = e.embed("public int pop() returns the top element");
    EXPECT_EQ(a, e.embed("public int pop() returns the top element"));
    EXPECT_EQ(a.size(), 256u);
    EXPECT_NEAR(norm(a), 1.0, 1e-12);
}

TEST(Hashing, EmptyIsZeroVector) {
    HashingEmbedder e;
    auto z = e.embed("");
    EXPECT_EQ(z, Embedding(256, 0.0));
    EXPECT_EQ(cosine(z, e.embed("x")), 0.0);
}

TEST(Hashing, DistinctCommentsBelowOne) {
    HashingEmbedder e;
    auto a = e.embed("Removes and returns the top element of the stack.");
    auto b = e.embed("True when value lies between low and high, including both bounds.");
    double independent = dot(a, b) / (norm(a) * norm(b));
    EXPECT_NEAR(cosine(a, b), independent, 1e-12);
    EXPECT_LT(cosine(a, b), 1.0);
}

TEST(Hashing, CaseAndPunctuationInsensitive) {
    HashingEmbedder e;
    EXPECT_NEAR(cosine(e.embed("Push, POP"), e.embed("push pop")), 1.0, 1e-12);
}

TEST(Store, EmptyStoreRetrievesNothing) {
    VectorStore s;
    HashingEmbedder e;
    EXPECT_TRUE(s.retrieve("anything", e, 20).empty());
}

TEST(Store, OneDocumentPerClass) {
    HashingEmbedder e;
    auto store = corpus_store(e);
    std::set<std::string> docs;
    for (const auto& c : store.chunks()) docs.insert(c.doc_id);
    EXPECT_EQ(docs.size(), 8u);
    EXPECT_TRUE(docs.count("com.acme.desk.IntStack"));
}

TEST(Store, RetrievalMatchesBruteForce) {
    HashingEmbedder e;
    auto store = corpus_store(e);
    ASSERT_GT(store.size(), 20u);
    for (const char* q : {"parameters of pop", "balance deposit amount", "vowels in a word", "fahrenheit"}) {
        auto query = e.embed(q);
        auto expected = brute_force(store, query);
        std::vector<double> brute(store.size());
        for (const auto& [score, idx] : expected) brute[idx] = score;
        auto got = store.retrieve(query, 20);
        ASSERT_EQ(got.size(), 20u);
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_NEAR(got[i].score, expected[i].first, 1e-9) << q << " rank " << i;
            // Same chunk as the brute-force ranking, up to floating-point ties.
            auto at = std::find(store.chunks().begin(), store.chunks().end(), got[i].chunk) - store.chunks().begin();
            double own = brute[static_cast<std::size_t>(at)];
            EXPECT_NEAR(own, expected[i].first, 1e-9) << q << " rank " << i;
            if (i) {
                EXPECT_GE(got[i - 1].score, got[i].score);
            }
        }
        for (std::size_t k = 0; k <= 20; ++k) {
            auto prefix = store.retrieve(query, k);
            ASSERT_EQ(prefix.size(), k);
            for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(prefix[i].chunk, got[i].chunk);
        }
    }
}

TEST(Store, KLargerThanStoreReturnsAllSorted) {
    HashingEmbedder e;
    auto store = corpus_store(e);
    auto got = store.retrieve("stack", e, store.size() + 50);
    EXPECT_EQ(got.size(), store.size());
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; }));
}

TEST(Store, SelfSimilarityRanksFirst) {
    HashingEmbedder e;
    auto store = corpus_store(e);
    const auto& target = store.chunks()[store.size() / 2];
    auto got = store.retrieve(target.text, e, 5);
    ASSERT_FALSE(got.empty());
    EXPECT_EQ(got[0].chunk, target);
    EXPECT_NEAR(got[0].score, 1.0, 1e-12);
}

TEST(Store, ExampleQueryFindsMethodEntry) {
    HashingEmbedder e;
    RagParams p;
    auto store = VectorStore::build(kb::parse_project(data("example/project")).kb, e, p);
    auto got = store.retrieve("parameters of exampleMethod", e, 1);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_NE(got[0].chunk.text.find("\"methodName\": \"exampleMethod\""), std::string::npos);
    EXPECT_EQ(got[0].chunk.doc_id, "com.example.ExampleClass");
}

TEST(Store, JsonlRoundTrip) {
    HashingEmbedder e;
    auto store = corpus_store(e);
    testsupport::TempDir tmp;
    store.save(tmp / "store.jsonl");
    auto back = VectorStore::load(tmp / "store.jsonl");
    ASSERT_EQ(back.size(), store.size());
    EXPECT_EQ(back.chunks(), store.chunks());
    for (std::size_t i = 0; i < store.size(); ++i)
        for (std::size_t d = 0; d < 256; ++d) EXPECT_DOUBLE_EQ(back.embeddings()[i][d], store.embeddings()[i][d]);
}

TEST(Store, LoadMissingIsConfigError) { EXPECT_THROW(VectorStore::load(data("missing.jsonl")), ConfigError); }

TEST(Store, ProvidedFilesBlock) {
    Scored s;
    s.chunk = Chunk{"com.x.A", 2, 0, 3, "a b c"};
    auto out = with_provided_files({s}, "PROMPT");
    EXPECT_EQ(out.rfind("Provided files:", 0), 0u);
    EXPECT_NE(out.find("a b c"), std::string::npos);
    EXPECT_NE(out.find("com.x.A"), std::string::npos);
    EXPECT_EQ(out.substr(out.size() - 6), "PROMPT");
}

TEST(Embedder, FactoryRejectsUnknownProvider) {
    RagParams p;
    p.provider = "quantum";
    EXPECT_THROW(make_embedder(p), ConfigError);
    p.provider = "hashing";
    EXPECT_EQ(make_embedder(p)->dimension(), 256u);
}

TEST(HttpEmbedding, ParsesVectorAndSendsModel) {
    testsupport::StubServer stub("/v1/embeddings", [](const httplib::Request&, httplib::Response& rs) {
        rs.set_content(R"({"data": [{"index": 0, "embedding": [0.5, -0.5, 0.0, 1.0]}]})", "application/json");
    });
    HttpEmbedder e(stub.url(), "embed-model", 4, "");
    EXPECT_EQ(e.embed("hello"), (Embedding{0.5, -0.5, 0.0, 1.0}));
    auto body = nlohmann::json::parse(stub.last_body);
    EXPECT_EQ(body["model"], "embed-model");
    EXPECT_EQ(body["input"], "hello");
}

TEST(HttpEmbedding, Failures) {
    testsupport::StubServer wrong_dim("/v1/embeddings", [](const httplib::Request&, httplib::Response& rs) {
        rs.set_content(R"({"data": [{"embedding": [1.0]}]})", "application/json");
    });
    EXPECT_THROW(HttpEmbedder(wrong_dim.url(), "m", 4, "").embed("x"), BackendError);
    testsupport::StubServer denied("/v1/embeddings", [](const httplib::Request&, httplib::Response& rs) { rs.status = 401; });
    EXPECT_THROW(HttpEmbedder(denied.url(), "m", 4, "").embed("x"), BackendConfigError);
    ::unsetenv("OG_TEST_EMBED_KEY");
    EXPECT_THROW(HttpEmbedder(denied.url(), "m", 4, "OG_TEST_EMBED_KEY"), BackendConfigError);
}
