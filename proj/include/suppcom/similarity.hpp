#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "suppcom/http.hpp"

namespace suppcom {

struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_id;

    std::size_t dim() const { return values.size(); }
    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::size_t dim() const = 0;
    // One vector per text, in input order.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

// Providers that expose per-token vectors; MeanPoolingProvider turns them
// into sentence vectors.
class TokenVectorProvider {
public:
    virtual ~TokenVectorProvider() = default;
    virtual std::string id() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::vector<std::vector<std::vector<double>>> token_vectors(
        std::span<const std::string> texts) = 0;
};

// Arithmetic mean over token vectors.
std::vector<double> mean_pool(std::span<const std::vector<double>> token_vectors, std::size_t dim);

class MeanPoolingProvider final : public EmbeddingProvider {
public:
    explicit MeanPoolingProvider(std::shared_ptr<TokenVectorProvider> inner);
    std::string id() const override;
    std::size_t dim() const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    std::shared_ptr<TokenVectorProvider> inner_;
};

// Deterministic offline embedding: every word token adds +-1 at `hashes`
// positions chosen by a seeded FNV-1a/splitmix hash; the sum is
// L2-normalised. Depends only on the token multiset.
class OfflineHashProvider final : public EmbeddingProvider {
public:
    static constexpr std::uint64_t kSeed = 0x5eed5eed2024ULL;

    explicit OfflineHashProvider(std::size_t dim = 512, std::size_t hashes = 4);
    std::string id() const override;
    std::size_t dim() const override { return dim_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
    EmbeddingVector embed_one(const std::string& text) const;

    // (position, sign) pairs a token contributes.
    std::vector<std::pair<std::size_t, int>> token_slots(const std::string& token) const;

private:
    std::size_t dim_;
    std::size_t hashes_;
};

struct HttpProviderConfig {
    std::string base_url;
    std::string token_env;  // optional shared token, sent as X-Auth-Token
    RetryPolicy retry;
    std::size_t max_batch = 256;
};

// Client for the scoring service: POST {base}/embed {"texts": [...]} ->
// {"vectors": [[...]], "dim": n, "model_id": "..."}.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(HttpProviderConfig config, std::shared_ptr<HttpTransport> transport);
    std::string id() const override;
    std::size_t dim() const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    HttpProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    mutable std::mutex mutex_;
    std::string model_id_;
    std::size_t dim_ = 0;
};

// GET {base}/health -> {"status", "model_ids", "dim"}. model_ids may be a
// list or an object of strings; both are flattened in order.
struct ServiceHealth {
    std::string status;
    std::vector<std::string> model_ids;
    std::size_t dim = 0;

    bool ok() const { return status == "ok"; }
};

// Throws Error on a non-200 reply or a payload missing the schema fields.
ServiceHealth check_service_health(const std::string& base_url, HttpTransport& transport,
                                   const HttpHeaders& headers = {});

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws ValidationError on a
// dimension mismatch or an all-zero vector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

inline constexpr double kDefaultSimilarityThreshold = 0.6;

// Strictly greater than the threshold.
inline bool exceeds_threshold(double similarity, double threshold = kDefaultSimilarityThreshold) {
    return similarity > threshold;
}

// Embedding front end with a (provider id, text hash) cache. The cache is
// optionally persisted as a content-addressed directory.
class SimilarityEngine {
public:
    explicit SimilarityEngine(std::shared_ptr<EmbeddingProvider> provider,
                              std::filesystem::path cache_dir = {});

    // Throws ValidationError on blank text.
    EmbeddingVector embed(const std::string& text);
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);
    double sentence_similarity(const std::string& s, const std::string& t);

    std::string provider_id() const { return provider_->id(); }
    std::size_t provider_calls() const { return provider_calls_; }

private:
    std::filesystem::path cache_file(const std::string& hash) const;
    bool lookup(const std::string& hash, EmbeddingVector& out);
    void store(const std::string& hash, const EmbeddingVector& v);

    std::shared_ptr<EmbeddingProvider> provider_;
    std::filesystem::path cache_dir_;
    std::mutex mutex_;
    std::map<std::string, EmbeddingVector> cache_;
    std::size_t provider_calls_ = 0;
};

}  // namespace suppcom
