#include "suppcom/similarity.hpp"

#include "suppcom/error.hpp"
#include "suppcom/hash.hpp"
#include "suppcom/jsonl.hpp"
#include "suppcom/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace suppcom {

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

std::vector<double> mean_pool(std::span<const std::vector<double>> token_vectors, std::size_t dim) {
    if (token_vectors.empty()) throw ValidationError("mean pooling over zero token vectors");
    std::vector<double> out(dim, 0.0);
    for (const auto& v : token_vectors) {
        if (v.size() != dim) throw ValidationError("token vector has the wrong dimension");
        for (std::size_t i = 0; i < dim; ++i) out[i] += v[i];
    }
    for (double& x : out) x /= static_cast<double>(token_vectors.size());
    return out;
}

MeanPoolingProvider::MeanPoolingProvider(std::shared_ptr<TokenVectorProvider> inner)
    : inner_(std::move(inner)) {}

std::string MeanPoolingProvider::id() const { return inner_->id() + "+mean"; }
std::size_t MeanPoolingProvider::dim() const { return inner_->dim(); }

std::vector<EmbeddingVector> MeanPoolingProvider::embed_batch(std::span<const std::string> texts) {
    auto per_text = inner_->token_vectors(texts);
    if (per_text.size() != texts.size()) throw Error("token provider returned a short batch");
    std::vector<EmbeddingVector> out;
    for (const auto& tokens : per_text) out.push_back({mean_pool(tokens, dim()), id()});
    return out;
}

OfflineHashProvider::OfflineHashProvider(std::size_t dim, std::size_t hashes)
    : dim_(dim), hashes_(hashes) {
    if (dim_ == 0 || hashes_ == 0) throw ValidationError("offline embedding needs dim > 0 and hashes > 0");
}

std::string OfflineHashProvider::id() const {
    return "offline-hash-d" + std::to_string(dim_) + "-k" + std::to_string(hashes_);
}

std::vector<std::pair<std::size_t, int>> OfflineHashProvider::token_slots(const std::string& token) const {
    std::vector<std::pair<std::size_t, int>> slots;
    const std::uint64_t base = fnv1a64(token);
    for (std::size_t j = 0; j < hashes_; ++j) {
        std::uint64_t h = mix64(base ^ (kSeed + 0x9e3779b97f4a7c15ULL * (j + 1)));
        slots.emplace_back(static_cast<std::size_t>(h % dim_), ((h >> 40) & 1U) ? -1 : 1);
    }
    return slots;
}

EmbeddingVector OfflineHashProvider::embed_one(const std::string& text) const {
    std::vector<std::string> tokens = tokenize_words(text);
    if (tokens.empty()) {
        std::string trimmed = text;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
        trimmed.erase(trimmed.find_last_not_of(" \t\r\n") + 1);
        tokens.push_back(trimmed);  // punctuation-only text still gets a vector
    }
    std::vector<double> v(dim_, 0.0);
    for (const auto& t : tokens) {
        for (auto [pos, sign] : token_slots(t)) v[pos] += sign;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm == 0.0) {
        // Every contribution cancelled; fall back to one stable coordinate.
        v[fnv1a64(text) % dim_] = 1.0;
        norm = 1.0;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return {std::move(v), id()};
}

std::vector<EmbeddingVector> OfflineHashProvider::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config,
                                             std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::string HttpEmbeddingProvider::id() const {
    std::lock_guard lock(mutex_);
    return model_id_.empty() ? "http:" + config_.base_url : "http:" + model_id_;
}

std::size_t HttpEmbeddingProvider::dim() const {
    std::lock_guard lock(mutex_);
    return dim_;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    HttpHeaders headers;
    if (!config_.token_env.empty()) {
        if (const char* tok = std::getenv(config_.token_env.c_str()); tok && *tok) headers["X-Auth-Token"] = tok;
    }
    const std::size_t batch = std::max<std::size_t>(1, config_.max_batch);
    for (std::size_t start = 0; start < texts.size(); start += batch) {
        auto chunk = texts.subspan(start, std::min(batch, texts.size() - start));
        nlohmann::json req{{"texts", std::vector<std::string>(chunk.begin(), chunk.end())}};
        HttpResponse res = with_retries(
            config_.retry,
            [&] { return transport_->post(config_.base_url + "/embed", req.dump(), "application/json", headers); },
            "embed");
        if (res.status != 200) throw Error("embedding service returned HTTP " + std::to_string(res.status));
        auto j = nlohmann::json::parse(res.body);
        auto vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
        std::size_t dim = j.at("dim").get<std::size_t>();
        if (vectors.size() != chunk.size()) throw Error("embedding service returned a short batch");
        {
            std::lock_guard lock(mutex_);
            model_id_ = j.value("model_id", model_id_);
            dim_ = dim;
        }
        for (auto& v : vectors) {
            if (v.size() != dim) throw Error("embedding service vector length differs from dim");
            out.push_back({std::move(v), id()});
        }
    }
    return out;
}

ServiceHealth check_service_health(const std::string& base_url, HttpTransport& transport,
                                   const HttpHeaders& headers) {
    HttpResponse res = transport.get(base_url + "/health", headers);
    if (res.status != 200) throw Error("scoring service health returned HTTP " + std::to_string(res.status));
    ServiceHealth health;
    try {
        auto j = nlohmann::json::parse(res.body);
        health.status = j.at("status").get<std::string>();
        const auto& ids = j.at("model_ids");
        if (ids.is_object()) {
            for (const auto& [k, v] : ids.items()) health.model_ids.push_back(v.get<std::string>());
        } else {
            health.model_ids = ids.get<std::vector<std::string>>();
        }
        health.dim = j.at("dim").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed scoring service health payload: ") + e.what());
    }
    return health;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ValidationError("cosine_similarity: zero vector");
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

SimilarityEngine::SimilarityEngine(std::shared_ptr<EmbeddingProvider> provider, std::filesystem::path cache_dir)
    : provider_(std::move(provider)), cache_dir_(std::move(cache_dir)) {
    if (!provider_) throw std::invalid_argument("SimilarityEngine requires a provider");
}

std::filesystem::path SimilarityEngine::cache_file(const std::string& hash) const {
    std::string pid = provider_->id();
    for (char& c : pid) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    }
    return cache_dir_ / pid / hash.substr(0, 2) / (hash + ".json");
}

bool SimilarityEngine::lookup(const std::string& hash, EmbeddingVector& out) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(hash);
        if (it != cache_.end()) {
            out = it->second;
            return true;
        }
    }
    if (cache_dir_.empty()) return false;
    auto path = cache_file(hash);
    if (!std::filesystem::exists(path)) return false;
    auto j = nlohmann::json::parse(read_file(path));
    out = {j.at("values").get<std::vector<double>>(), j.at("provider_id").get<std::string>()};
    std::lock_guard lock(mutex_);
    cache_.emplace(hash, out);
    return true;
}

void SimilarityEngine::store(const std::string& hash, const EmbeddingVector& v) {
    {
        std::lock_guard lock(mutex_);
        cache_.emplace(hash, v);
    }
    if (!cache_dir_.empty()) {
        nlohmann::json j{{"provider_id", v.provider_id}, {"values", v.values}};
        write_file_atomic(cache_file(hash), j.dump());
    }
}

std::vector<EmbeddingVector> SimilarityEngine::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::string> hashes(texts.size());
    std::vector<std::size_t> missing;
    std::vector<std::string> missing_texts;
    const std::string pid = provider_->id();
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (blank(texts[i])) throw ValidationError("cannot embed blank text");
        hashes[i] = sha256_hex(pid + '\0' + texts[i]);
        if (!lookup(hashes[i], out[i])) {
            missing.push_back(i);
            missing_texts.push_back(texts[i]);
        }
    }
    if (!missing.empty()) {
        auto fresh = provider_->embed_batch(missing_texts);
        {
            std::lock_guard lock(mutex_);
            ++provider_calls_;
        }
        if (fresh.size() != missing.size()) throw Error("embedding provider returned a short batch");
        for (std::size_t k = 0; k < missing.size(); ++k) {
            store(hashes[missing[k]], fresh[k]);
            out[missing[k]] = std::move(fresh[k]);
        }
    }
    return out;
}

EmbeddingVector SimilarityEngine::embed(const std::string& text) {
    return embed_batch(std::span<const std::string>(&text, 1)).front();
}

double SimilarityEngine::sentence_similarity(const std::string& s, const std::string& t) {
    return cosine_similarity(embed(s), embed(t));
}

}  // namespace suppcom
