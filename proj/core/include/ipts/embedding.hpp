#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ipts {

using Vector = std::vector<double>;

inline constexpr std::size_t kDefaultEmbeddingDimension = 384;

struct EmbeddingVector {
    std::string key;
    Vector values;
};

/// Key -> dense vector map with a single declared dimension. The dimension
/// is fixed by the first insert; an empty store has none and every query
/// on it fails.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dimension);

    std::optional<std::size_t> dimension() const { return dimension_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool contains(std::string_view key) const;

    /// Rejects wrong dimensions, non-finite components and repeated keys.
    void insert(std::string key, Vector values);

    std::span<const double> at(std::string_view key) const;

    /// Adds every entry of `other` that is not already present.
    void merge(const EmbeddingStore& other);

    /// Keys in sorted order.
    std::vector<std::string> keys() const;

private:
    std::optional<std::size_t> dimension_;
    std::map<std::string, Vector, std::less<>> entries_;
};

/// JSONL of {"key": string, "vector": [real]}.
EmbeddingStore load_store(const std::filesystem::path& path);
EmbeddingStore read_store(std::istream& in);
/// Sorted by key; numbers in shortest round-trip form.
void write_store(std::ostream& out, const EmbeddingStore& store);

/// dot(a,b)/(|a||b|). Throws on dimension mismatch or a zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

/// Componentwise mean. Throws on an empty list or mixed dimensions.
Vector centroid(std::span<const std::span<const double>> vectors);
Vector centroid(std::span<const Vector> vectors);

/// Store key for a codebook phrase: "phrase:" + 16 hex digits of FNV-1a-64
/// over the lowercased, whitespace-collapsed phrase.
std::string phrase_key(std::string_view phrase);

struct TextItem {
    std::string key;
    std::string text;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// One vector per item, in input order.
    virtual std::vector<Vector> embed(std::span<const TextItem> items) = 0;
};

/// Serves vectors from a precomputed store, looked up by item key.
class FileProvider final : public EmbeddingProvider {
public:
    explicit FileProvider(EmbeddingStore store) : store_(std::move(store)) {}
    std::vector<Vector> embed(std::span<const TextItem> items) override;
    const EmbeddingStore& store() const { return store_; }

private:
    EmbeddingStore store_;
};

struct HttpProviderConfig {
    /// Base URL, e.g. "http://127.0.0.1:8080"; requests go to <url>/embed.
    std::string url;
    std::size_t batch_size = 64;
    std::size_t max_in_flight = 4;
    std::optional<std::size_t> expected_dimension;
    int timeout_seconds = 60;
};

/// POST /embed {"texts": [...]} -> {"vectors": [[...]]}.
class HttpProvider final : public EmbeddingProvider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    std::vector<Vector> embed(std::span<const TextItem> items) override;

private:
    std::vector<Vector> embed_batch(std::span<const TextItem> batch) const;
    HttpProviderConfig config_;
};

/// Deterministic offline embedder: L2-normalized sum of per-token
/// pseudo-random vectors seeded by the token hash, stopwords skipped.
/// Shared vocabulary gives high cosine; it carries no semantics beyond that.
class HashingProvider final : public EmbeddingProvider {
public:
    HashingProvider(std::size_t dimension, std::unordered_set<std::string> stoplist = {});
    std::vector<Vector> embed(std::span<const TextItem> items) override;
    Vector embed_text(std::string_view text) const;

private:
    std::size_t dimension_;
    std::unordered_set<std::string> stoplist_;
};

/// Embeds each distinct key once (first occurrence wins) and checks that
/// every returned vector has one common, finite dimension.
EmbeddingStore embed_texts(EmbeddingProvider& provider, std::span<const TextItem> items);

}  // namespace ipts
