#include "ipts/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "http_json.hpp"
#include "ipts/error.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

using json = nlohmann::json;
constexpr const char* kModule = "embedding";

std::string join_keys(const std::vector<std::string>& keys, std::size_t limit = 20) {
    std::string out;
    for (std::size_t i = 0; i < keys.size() && i < limit; ++i) {
        if (i > 0) out += ", ";
        out += keys[i];
    }
    if (keys.size() > limit) out += fmt::format(", ... ({} total)", keys.size());
    return out;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw Error(kModule, "embedding dimension must be positive");
}

bool EmbeddingStore::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void EmbeddingStore::insert(std::string key, Vector values) {
    if (values.empty()) throw Error(kModule, "empty vector", key);
    if (dimension_ && values.size() != *dimension_) {
        throw Error(kModule,
                    fmt::format("dimension mismatch: store has {}, vector has {}", *dimension_, values.size()),
                    key);
    }
    for (const double v : values) {
        if (!std::isfinite(v)) throw Error(kModule, "non-finite vector component", key);
    }
    if (entries_.count(key) != 0) throw Error(kModule, "duplicate embedding key", key);
    if (!dimension_) dimension_ = values.size();
    entries_.emplace(std::move(key), std::move(values));
}

std::span<const double> EmbeddingStore::at(std::string_view key) const {
    if (!dimension_) throw Error(kModule, "query on an empty store (dimension undefined)", std::string(key));
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw Error(kModule, "missing embedding", std::string(key));
    return it->second;
}

void EmbeddingStore::merge(const EmbeddingStore& other) {
    for (const auto& [key, values] : other.entries_) {
        if (!contains(key)) insert(key, values);
    }
}

std::vector<std::string> EmbeddingStore::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& entry : entries_) out.push_back(entry.first);
    return out;
}

EmbeddingStore load_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(kModule, "cannot open embedding file", path.string());
    return read_store(in);
}

EmbeddingStore read_store(std::istream& in) {
    EmbeddingStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(kModule, fmt::format("malformed JSON: {}", e.what()), fmt::format("line {}", line_no));
        }
        const auto key_it = record.find("key");
        const auto vec_it = record.find("vector");
        if (key_it == record.end() || !key_it->is_string()) {
            throw Error(kModule, "record needs a string 'key'", fmt::format("line {}", line_no));
        }
        if (vec_it == record.end() || !vec_it->is_array()) {
            throw Error(kModule, "record needs an array 'vector'", fmt::format("line {}", line_no));
        }
        Vector values;
        values.reserve(vec_it->size());
        for (const auto& v : *vec_it) {
            if (!v.is_number()) {
                throw Error(kModule, "non-numeric vector component", key_it->get<std::string>());
            }
            values.push_back(v.get<double>());
        }
        auto key = key_it->get<std::string>();
        if (store.dimension() && values.size() != *store.dimension()) {
            throw Error(kModule,
                        fmt::format("inconsistent dimensions: expected {}, got {} for key '{}'",
                                    *store.dimension(), values.size(), key),
                        key);
        }
        store.insert(std::move(key), std::move(values));
    }
    return store;
}

void write_store(std::ostream& out, const EmbeddingStore& store) {
    for (const auto& key : store.keys()) {
        json record;
        record["key"] = key;
        const auto values = store.at(key);
        record["vector"] = std::vector<double>(values.begin(), values.end());
        out << record.dump() << '\n';
    }
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(kModule, fmt::format("cosine of vectors with dimensions {} and {}", a.size(), b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw Error(kModule, "cosine of a zero-norm vector");
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

Vector centroid(std::span<const std::span<const double>> vectors) {
    if (vectors.empty()) throw Error(kModule, "centroid of an empty list");
    const auto dim = vectors.front().size();
    Vector sum(dim, 0.0);
    for (const auto v : vectors) {
        if (v.size() != dim) throw Error(kModule, "centroid of vectors with different dimensions");
        for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
    }
    const auto n = static_cast<double>(vectors.size());
    for (auto& x : sum) x /= n;
    return sum;
}

Vector centroid(std::span<const Vector> vectors) {
    std::vector<std::span<const double>> views(vectors.begin(), vectors.end());
    return centroid(std::span<const std::span<const double>>(views));
}

std::string phrase_key(std::string_view phrase) {
    return "phrase:" + text::to_hex(text::fnv1a64(text::normalize_whitespace_lower(phrase)));
}

std::vector<Vector> FileProvider::embed(std::span<const TextItem> items) {
    std::vector<std::string> missing;
    for (const auto& item : items) {
        if (!store_.contains(item.key)) missing.push_back(item.key);
    }
    if (!missing.empty()) {
        throw Error(kModule, fmt::format("embedding cache miss for {} key(s): {}", missing.size(), join_keys(missing)),
                    join_keys(missing));
    }
    std::vector<Vector> out;
    out.reserve(items.size());
    for (const auto& item : items) {
        const auto v = store_.at(item.key);
        out.emplace_back(v.begin(), v.end());
    }
    return out;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw Error(kModule, "HTTP provider needs a URL");
    config_.url = detail::trim_url(config_.url);
    if (config_.batch_size == 0) config_.batch_size = 1;
    if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

std::vector<Vector> HttpProvider::embed_batch(std::span<const TextItem> batch) const {
    json body;
    body["texts"] = json::array();
    for (const auto& item : batch) body["texts"].push_back(item.text);
    const json reply = detail::post_json(kModule, config_.url, "/embed", body, config_.timeout_seconds);
    const auto it = reply.find("vectors");
    if (it == reply.end() || !it->is_array() || it->size() != batch.size()) {
        throw Error(kModule, fmt::format("embedding server must return {} vectors", batch.size()), config_.url);
    }
    std::vector<Vector> out;
    out.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& v = (*it)[i];
        if (!v.is_array()) throw Error(kModule, "vector entry is not an array", batch[i].key);
        Vector values;
        for (const auto& x : v) {
            if (!x.is_number()) throw Error(kModule, "non-numeric vector component", batch[i].key);
            values.push_back(x.get<double>());
        }
        if (config_.expected_dimension && values.size() != *config_.expected_dimension) {
            throw Error(kModule,
                        fmt::format("provider returned dimension {}, declared {}", values.size(),
                                    *config_.expected_dimension),
                        batch[i].key);
        }
        out.push_back(std::move(values));
    }
    return out;
}

std::vector<Vector> HttpProvider::embed(std::span<const TextItem> items) {
    std::vector<std::span<const TextItem>> batches;
    for (std::size_t start = 0; start < items.size(); start += config_.batch_size) {
        batches.push_back(items.subspan(start, std::min(config_.batch_size, items.size() - start)));
    }
    std::vector<Vector> out;
    out.reserve(items.size());
    // Bounded fan-out; results are appended in batch order.
    for (std::size_t wave = 0; wave < batches.size(); wave += config_.max_in_flight) {
        std::vector<std::future<std::vector<Vector>>> pending;
        const auto end = std::min(batches.size(), wave + config_.max_in_flight);
        for (std::size_t b = wave; b < end; ++b) {
            pending.push_back(std::async(std::launch::async, [this, batch = batches[b]] { return embed_batch(batch); }));
        }
        for (auto& f : pending) {
            for (auto& v : f.get()) out.push_back(std::move(v));
        }
    }
    return out;
}

HashingProvider::HashingProvider(std::size_t dimension, std::unordered_set<std::string> stoplist)
    : dimension_(dimension), stoplist_(std::move(stoplist)) {
    if (dimension_ == 0) throw Error(kModule, "embedding dimension must be positive");
}

Vector HashingProvider::embed_text(std::string_view text) const {
    Vector sum(dimension_, 0.0);
    auto tokens = text::word_tokens(text);
    std::size_t used = 0;
    for (const auto& token : tokens) {
        if (stoplist_.count(token) != 0) continue;
        ++used;
        // splitmix64 stream seeded by the token hash
        std::uint64_t state = text::fnv1a64(token);
        for (std::size_t j = 0; j < dimension_; ++j) {
            state += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = state;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            z ^= z >> 31;
            sum[j] += static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
        }
    }
    if (used == 0) {
        // Texts without content words still need a usable, non-zero vector.
        sum.assign(dimension_, 0.0);
        sum[0] = 1.0;
        return sum;
    }
    double norm = 0.0;
    for (const double x : sum) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : sum) x /= norm;
    return sum;
}

std::vector<Vector> HashingProvider::embed(std::span<const TextItem> items) {
    std::vector<Vector> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(embed_text(item.text));
    return out;
}

EmbeddingStore embed_texts(EmbeddingProvider& provider, std::span<const TextItem> items) {
    std::vector<TextItem> unique;
    std::unordered_set<std::string> seen;
    for (const auto& item : items) {
        if (seen.insert(item.key).second) unique.push_back(item);
    }
    EmbeddingStore store;
    if (unique.empty()) return store;
    auto vectors = provider.embed(unique);
    if (vectors.size() != unique.size()) {
        throw Error(kModule, fmt::format("provider returned {} vectors for {} texts", vectors.size(), unique.size()));
    }
    for (std::size_t i = 0; i < unique.size(); ++i) store.insert(unique[i].key, std::move(vectors[i]));
    return store;
}

}  // namespace ipts
