#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ipts/corpus.hpp"
#include "ipts/embedding.hpp"
#include "ipts/rake.hpp"

namespace ipts {

struct TopicDocument {
    std::string id;
    std::string text;
};

/// Every document of the corpus, in corpus order.
std::vector<TopicDocument> topic_documents(const Corpus& corpus);

struct KMeansConfig {
    std::size_t max_iters = 100;
    std::size_t restarts = 8;
};

struct Clustering {
    std::vector<std::string> doc_ids;
    /// Topic index per entry of doc_ids.
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
};

/// k-means++ with restarts over L2-normalized embeddings. Documents are
/// processed in id order and topics are numbered by their smallest member
/// id, so input order does not affect the result. An empty cluster takes
/// the point farthest from its current center. Throws when fewer
/// documents than k are given or a document has no vector.
Clustering cluster_topics(std::span<const std::string> doc_ids, const EmbeddingStore& store, std::size_t k,
                          std::uint64_t seed, const KMeansConfig& config = {});

struct Keyword {
    std::string term;
    double weight = 0.0;
};

/// Class-based TF-IDF: weight(t, c) = tf(t, c) * log(1 + A / f(t)), A the
/// mean token count per topic and f(t) the corpus frequency. Tokens come
/// from text::word_tokens with stopwords removed. Terms absent from a topic
/// are never listed. Top m per topic, ties by term.
std::vector<std::vector<Keyword>> ctfidf_keywords(std::span<const std::string> texts,
                                                  std::span<const std::size_t> assignments, std::size_t k,
                                                  std::size_t m, const Stoplist& stoplist = default_stoplist());

/// UMass coherence of one ranked keyword list against document
/// co-occurrence: mean over pairs i > j of log((D(w_i, w_j) + 1e-12) / D(w_j)).
double umass_coherence(std::span<const std::string> ranked_terms, std::span<const std::string> texts,
                       const Stoplist& stoplist = default_stoplist());

struct TopicModelResult {
    std::size_t k = 0;
    Clustering clustering;
    std::vector<std::vector<Keyword>> keywords;
    double coherence = 0.0;
};

struct ScanConfig {
    std::size_t k_min = 5;
    std::size_t k_max = 14;
    std::uint64_t seed = 7;
    std::size_t top_terms = 10;
    KMeansConfig kmeans;
    Stoplist stoplist = default_stoplist();
    /// Coherences within this distance of the maximum count as ties.
    double tie_tolerance = 1e-9;

    void validate() const;
};

/// Cluster, extract keywords and score coherence for one k. Topic
/// coherence is averaged over topics with at least two keywords.
TopicModelResult fit_topics(std::span<const TopicDocument> docs, const EmbeddingStore& store, std::size_t k,
                            const ScanConfig& config);

struct ScanResult {
    std::vector<std::pair<std::size_t, double>> scores;
    std::size_t best_k = 0;
    TopicModelResult best;
};

/// Fits every k in [k_min, k_max]; best_k is the argmax, ties to smaller k.
ScanResult coherence_scan(std::span<const TopicDocument> docs, const EmbeddingStore& store, const ScanConfig& config);

void write_scan_json(std::ostream& out, const ScanResult& scan);

}  // namespace ipts
