#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fakecti/vectorize.hpp"

namespace fakecti
{

using SynonymMap = std::unordered_map<std::string, std::string>;

/// Deterministic bag-of-words embedding: each token (after synonym
/// canonicalization) adds 1 at FNV-1a(token) mod dimension, then the vector is
/// L2-normalized. Requires dimension >= 2.
DenseVector stub_embed(std::string_view text, std::size_t dimension = 256, const SynonymMap* synonyms = nullptr);

/// Loads a JSON object {"term": "canonical", ...}. Keys and values are
/// lowercased to match tokenize().
SynonymMap load_synonym_map(const std::string& path);

/// Text-embedding backend. The same text must always map to the same vector.
class EmbeddingProvider
{
  public:
    virtual ~EmbeddingProvider() = default;

    /// Stable identity used as the cache key (e.g. "stub:256").
    virtual std::string identity() const = 0;
    virtual std::size_t dimension() const = 0;
    /// One vector per text, same order. Throws Error(ProviderFailure).
    virtual std::vector<DenseVector> embed_batch(const std::vector<std::string>& texts) = 0;
};

class StubEmbeddingProvider final : public EmbeddingProvider
{
  public:
    explicit StubEmbeddingProvider(std::size_t dimension = 256, SynonymMap synonyms = {});

    std::string identity() const override;
    std::size_t dimension() const override
    {
        return dimension_;
    }
    std::vector<DenseVector> embed_batch(const std::vector<std::string>& texts) override;

  private:
    std::size_t dimension_;
    SynonymMap synonyms_;
    std::uint64_t synonym_fingerprint_ = 0;
};

/// Remote embeddings endpoint: POST {"input": [...], "model": id} returning
/// {"data": [{"embedding": [...]}, ...]}. Bearer token from
/// FAKECTI_EMBED_API_KEY when present.
class RemoteEmbeddingProvider final : public EmbeddingProvider
{
  public:
    RemoteEmbeddingProvider(std::string endpoint, std::string model, std::size_t dimension,
                            std::optional<std::string> api_key, double timeout_seconds = 60.0,
                            std::size_t max_batch = 64);

    static std::unique_ptr<RemoteEmbeddingProvider> from_environment(std::string endpoint, std::string model,
                                                                     std::size_t dimension);

    std::string identity() const override;
    std::size_t dimension() const override
    {
        return dimension_;
    }
    std::vector<DenseVector> embed_batch(const std::vector<std::string>& texts) override;

  private:
    std::string endpoint_;
    std::string model_;
    std::size_t dimension_;
    std::optional<std::string> api_key_;
    double timeout_seconds_;
    std::size_t max_batch_;
};

/// Vectors keyed by (provider identity, FNV-1a hash of text). Concurrent reads,
/// exclusive writes. When bound to a file, new entries are appended to it as
/// JSON Lines {provider, text_hash, vector}.
class EmbeddingCache
{
  public:
    EmbeddingCache() = default;
    /// Loads existing entries from `path` (if present) and appends new ones to it.
    explicit EmbeddingCache(std::string path);

    std::optional<DenseVector> get(const std::string& provider, std::string_view text) const;
    void put(const std::string& provider, std::string_view text, const DenseVector& vector);
    std::size_t size() const;

  private:
    using Key = std::pair<std::string, std::uint64_t>;
    mutable std::shared_mutex mutex_;
    std::map<Key, DenseVector> entries_;
    std::string path_;
};

/// Embeds `texts` in order, asking the provider only for distinct texts not
/// already cached. Returned vectors are re-normalized. Throws
/// Error(DimensionMismatch) when the provider returns a wrong dimension or a
/// wrong number of vectors, and propagates Error(ProviderFailure).
std::vector<DenseVector> embed_with_provider(EmbeddingProvider& provider, const std::vector<std::string>& texts,
                                             EmbeddingCache& cache);

} // namespace fakecti
