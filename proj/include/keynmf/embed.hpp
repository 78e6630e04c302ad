#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace keynmf {

using EmbeddingVector = Eigen::VectorXd;

/// Uniform access to an embedding model. Implementations return exactly one
/// finite vector of a fixed dimension per input text, in input order, and are
/// safe for concurrent embed() calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int dimension() const = 0;
    /// Stable identifier, used as the embedding cache key prefix.
    virtual std::string id() const = 0;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

/// Validates inputs and the provider contract (count, order, dimension,
/// finiteness) around a raw provider call.
std::vector<EmbeddingVector> embed_batch(EmbeddingProvider& provider,
                                         const std::vector<std::string>& texts);

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Seeded offline embedder: vector for a text is a pure function of
/// (seed, text) -- keyed hash expanded to D standard normals, L2-normalized.
class TestEmbedder : public EmbeddingProvider {
public:
    TestEmbedder(std::uint64_t seed, int dim);
    int dimension() const override { return dim_; }
    std::string id() const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::uint64_t seed_;
    int dim_;
};

/// In-memory text -> vector map; also the backing for the precomputed store.
class MapProvider : public EmbeddingProvider {
public:
    MapProvider(std::unordered_map<std::string, EmbeddingVector> vectors, int dim,
                std::string id = "map");
    int dimension() const override { return dim_; }
    std::string id() const override { return id_; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::unordered_map<std::string, EmbeddingVector> vectors_;
    int dim_;
    std::string id_;
};

/// Loads a KNMF matrix plus companion id file (matrix_path + ".ids" by
/// default); row i is the embedding of text ids[i].
std::unique_ptr<MapProvider> load_precomputed_store(const std::filesystem::path& matrix_path,
                                                    const std::filesystem::path& ids_path);

/// Client for the POST {base_url}/embed protocol: request {"texts": [...]},
/// response {"embeddings": [[...], ...]} with matching length and order.
class HttpEmbedder : public EmbeddingProvider {
public:
    HttpEmbedder(std::string base_url, int batch_size = 64, int max_retries = 3);
    ~HttpEmbedder() override;
    int dimension() const override;
    std::string id() const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::vector<EmbeddingVector> post_batch(const std::vector<std::string>& texts);
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string base_url_;
    int batch_size_;
    int max_retries_;
    mutable std::mutex mutex_;
    mutable int dim_ = -1;  // learned from the first response
};

/// Content-addressed on-disk cache keyed by (provider id, text hash); safe to
/// delete wholesale at any time.
class CachedProvider : public EmbeddingProvider {
public:
    CachedProvider(std::shared_ptr<EmbeddingProvider> inner, std::filesystem::path cache_dir);
    int dimension() const override { return inner_->dimension(); }
    std::string id() const override { return inner_->id(); }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::filesystem::path entry_path(const std::string& text) const;
    std::shared_ptr<EmbeddingProvider> inner_;
    std::filesystem::path cache_dir_;
    std::mutex mutex_;
};

}  // namespace keynmf
