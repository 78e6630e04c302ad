#include "keynmf/embed.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "keynmf/common.hpp"
#include "keynmf/matrix_io.hpp"

// httplib must come after Eigen/Sparse; its transitive system headers leak
// macros that break Eigen's sparse-product templates
#include <httplib.h>
#include <json.hpp>

namespace keynmf {

std::vector<EmbeddingVector> embed_batch(EmbeddingProvider& provider,
                                         const std::vector<std::string>& texts) {
    if (texts.empty()) throw Error("embed_batch: empty text list");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (texts[i].empty())
            throw Error("embed_batch: empty text at position " + std::to_string(i));
    }
    auto vectors = provider.embed(texts);
    if (vectors.size() != texts.size())
        throw Error("provider returned " + std::to_string(vectors.size()) + " vectors for " +
                    std::to_string(texts.size()) + " texts");
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (provider.dimension() > 0 && vectors[i].size() != provider.dimension())
            throw Error("provider returned wrong dimension for text at position " +
                        std::to_string(i));
        if (!vectors[i].allFinite())
            throw Error("provider returned a non-finite vector for text at position " +
                        std::to_string(i));
    }
    return vectors;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) throw Error("cosine_similarity: dimension mismatch");
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw Error("cosine_similarity undefined for a zero vector");
    return a.dot(b) / (na * nb);
}

// ---- TestEmbedder ----

TestEmbedder::TestEmbedder(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {
    if (dim < 1) throw Error("test embedder dimension must be >= 1");
}

std::string TestEmbedder::id() const {
    return "test-" + std::to_string(seed_) + "-" + std::to_string(dim_);
}

std::vector<EmbeddingVector> TestEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        SplitMix64 rng(fnv1a64(text, fnv1a64("keynmf-test-embedder") ^ seed_));
        EmbeddingVector v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = rng.next_normal();
        double n = v.norm();
        if (n == 0.0) v[0] = 1.0;  // astronomically unlikely, keep unit norm total
        else v /= n;
        out.push_back(std::move(v));
    }
    return out;
}

// ---- MapProvider ----

MapProvider::MapProvider(std::unordered_map<std::string, EmbeddingVector> vectors, int dim,
                         std::string id)
    : vectors_(std::move(vectors)), dim_(dim), id_(std::move(id)) {
    for (const auto& [key, v] : vectors_) {
        if (v.size() != dim_)
            throw Error("stored vector for '" + key + "' has wrong dimension");
    }
}

std::vector<EmbeddingVector> MapProvider::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        auto it = vectors_.find(text);
        if (it == vectors_.end())
            throw Error("precomputed store has no embedding for '" + text + "'");
        out.push_back(it->second);
    }
    return out;
}

std::unique_ptr<MapProvider> load_precomputed_store(const std::filesystem::path& matrix_path,
                                                    const std::filesystem::path& ids_path) {
    DenseMatrix m = read_matrix(matrix_path).to_dense();
    auto ids = read_ids(ids_path);
    if (static_cast<Eigen::Index>(ids.size()) != m.rows())
        throw Error("id file row count does not match matrix rows: " + ids_path.string());
    std::unordered_map<std::string, EmbeddingVector> vectors;
    vectors.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        vectors[ids[i]] = m.row(static_cast<Eigen::Index>(i)).transpose();
    return std::make_unique<MapProvider>(std::move(vectors), static_cast<int>(m.cols()),
                                         "precomputed-" + file_digest(matrix_path));
}

// ---- HttpEmbedder ----

struct HttpEmbedder::Impl {
    explicit Impl(const std::string& base_url) : client(base_url) {
        client.set_read_timeout(120, 0);
    }
    httplib::Client client;
};

HttpEmbedder::HttpEmbedder(std::string base_url, int batch_size, int max_retries)
    : impl_(std::make_unique<Impl>(base_url)),
      base_url_(std::move(base_url)),
      batch_size_(batch_size),
      max_retries_(max_retries) {
    if (batch_size_ < 1) throw Error("http embedder batch size must be >= 1");
}

HttpEmbedder::~HttpEmbedder() = default;

int HttpEmbedder::dimension() const {
    std::lock_guard lock(mutex_);
    return dim_;
}

std::string HttpEmbedder::id() const {
    return "http-" + std::to_string(fnv1a64(base_url_));
}

std::vector<EmbeddingVector> HttpEmbedder::post_batch(const std::vector<std::string>& texts) {
    nlohmann::json body;
    body["texts"] = texts;
    std::string payload = body.dump();

    httplib::Result res;
    int attempt = 0;
    for (; attempt <= max_retries_; ++attempt) {
        res = impl_->client.Post("/embed", payload, "application/json");
        if (res && res->status == 200) break;
    }
    if (!res || res->status != 200) {
        std::string status = res ? "HTTP " + std::to_string(res->status) : "no response";
        throw Error("embedding service at " + base_url_ + " failed (" + status + ") after " +
                    std::to_string(attempt) + " attempts");
    }

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("embedding service returned invalid JSON: ") + e.what());
    }
    if (!reply.contains("embeddings") || !reply["embeddings"].is_array())
        throw Error("embedding service response missing 'embeddings' array");
    const auto& arr = reply["embeddings"];
    if (arr.size() != texts.size())
        throw Error("embedding service returned " + std::to_string(arr.size()) +
                    " vectors for " + std::to_string(texts.size()) + " texts");

    std::vector<EmbeddingVector> out;
    out.reserve(arr.size());
    for (const auto& row : arr) {
        if (!row.is_array() || row.empty())
            throw Error("embedding service returned a malformed vector");
        EmbeddingVector v(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) v[static_cast<Eigen::Index>(i)] = row[i].get<double>();
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
        std::size_t end = std::min(texts.size(), start + batch_size_);
        std::vector<std::string> batch(texts.begin() + start, texts.begin() + end);
        auto vectors = post_batch(batch);
        for (auto& v : vectors) out.push_back(std::move(v));
    }
    {
        std::lock_guard lock(mutex_);
        if (dim_ < 0 && !out.empty()) dim_ = static_cast<int>(out.front().size());
    }
    return out;
}

// ---- CachedProvider ----

CachedProvider::CachedProvider(std::shared_ptr<EmbeddingProvider> inner,
                               std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(cache_dir_);
}

std::filesystem::path CachedProvider::entry_path(const std::string& text) const {
    std::uint64_t h = fnv1a64(text, fnv1a64(inner_->id()));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return cache_dir_ / (std::string(buf) + ".vec");
}

std::vector<EmbeddingVector> CachedProvider::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard lock(mutex_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto path = entry_path(texts[i]);
            std::ifstream in(path, std::ios::binary);
            if (!in) {
                missing.push_back(i);
                continue;
            }
            std::uint32_t dim = 0;
            in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
            EmbeddingVector v(dim);
            in.read(reinterpret_cast<char*>(v.data()),
                    static_cast<std::streamsize>(dim * sizeof(double)));
            if (!in) {
                missing.push_back(i);  // damaged entry, recompute
                continue;
            }
            out[i] = std::move(v);
        }
    }
    if (!missing.empty()) {
        std::vector<std::string> misses;
        misses.reserve(missing.size());
        for (auto i : missing) misses.push_back(texts[i]);
        auto vectors = inner_->embed(misses);
        if (vectors.size() != misses.size())
            throw Error("inner provider returned wrong vector count");
        std::lock_guard lock(mutex_);
        for (std::size_t j = 0; j < missing.size(); ++j) {
            out[missing[j]] = vectors[j];
            auto path = entry_path(texts[missing[j]]);
            std::ofstream file(path, std::ios::binary | std::ios::trunc);
            std::uint32_t dim = static_cast<std::uint32_t>(vectors[j].size());
            file.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
            file.write(reinterpret_cast<const char*>(vectors[j].data()),
                       static_cast<std::streamsize>(dim * sizeof(double)));
        }
    }
    return out;
}

}  // namespace keynmf
