#include "ipts/topics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/rng.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "topics";
constexpr double kUmassEpsilon = 1e-12;

using Matrix = std::vector<Vector>;

double sq_dist(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct Run {
    std::vector<std::size_t> labels;
    double inertia = 0.0;
};

std::size_t nearest(const Vector& x, const Matrix& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(x, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

Matrix init_plus_plus(const Matrix& x, std::size_t k, Rng& rng) {
    Matrix centers;
    centers.push_back(x[rng.uniform_index(x.size())]);
    std::vector<double> d2(x.size(), std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            d2[i] = std::min(d2[i], sq_dist(x[i], centers.back()));
            sum += d2[i];
        }
        std::size_t pick = 0;
        if (sum <= 0.0) {
            pick = rng.uniform_index(x.size());
        } else {
            const double target = rng.uniform() * sum;
            double acc = 0.0;
            pick = x.size() - 1;
            for (std::size_t i = 0; i < x.size(); ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(x[pick]);
    }
    return centers;
}

Matrix recompute(const Matrix& x, const std::vector<std::size_t>& labels, std::size_t k, std::size_t dim,
                 std::vector<std::size_t>& sizes) {
    Matrix centers(k, Vector(dim, 0.0));
    sizes.assign(k, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++sizes[labels[i]];
        for (std::size_t d = 0; d < dim; ++d) centers[labels[i]][d] += x[i][d];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (sizes[c] > 0)
            for (auto& v : centers[c]) v /= static_cast<double>(sizes[c]);
    return centers;
}

/// Moves the point farthest from its center into each empty cluster.
bool reseed_empty(const Matrix& x, std::vector<std::size_t>& labels, Matrix& centers, std::vector<std::size_t>& sizes) {
    bool changed = false;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (sizes[c] > 0) continue;
        std::size_t far = x.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (sizes[labels[i]] < 2) continue;
            const double d = sq_dist(x[i], centers[labels[i]]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == x.size()) throw Error(kModule, "cannot re-seed an empty cluster");
        --sizes[labels[far]];
        labels[far] = c;
        sizes[c] = 1;
        centers[c] = x[far];
        changed = true;
    }
    return changed;
}

Run lloyd(const Matrix& x, std::size_t k, Rng& rng, std::size_t max_iters) {
    const std::size_t dim = x.front().size();
    Matrix centers = init_plus_plus(x, k, rng);
    Run run;
    run.labels.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) run.labels[i] = nearest(x[i], centers);
    std::vector<std::size_t> sizes;
    for (std::size_t it = 0; it < max_iters; ++it) {
        centers = recompute(x, run.labels, k, dim, sizes);
        if (reseed_empty(x, run.labels, centers, sizes)) centers = recompute(x, run.labels, k, dim, sizes);
        bool changed = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto c = nearest(x[i], centers);
            if (c != run.labels[i]) {
                run.labels[i] = c;
                changed = true;
            }
        }
        if (!changed) break;
    }
    centers = recompute(x, run.labels, k, dim, sizes);
    reseed_empty(x, run.labels, centers, sizes);
    centers = recompute(x, run.labels, k, dim, sizes);
    for (std::size_t i = 0; i < x.size(); ++i) run.inertia += sq_dist(x[i], centers[run.labels[i]]);
    return run;
}

std::vector<std::string> content_tokens(std::string_view t, const Stoplist& stoplist) {
    auto toks = text::word_tokens(t);
    std::erase_if(toks, [&](const std::string& w) { return stoplist.count(w) > 0; });
    return toks;
}

}  // namespace

std::vector<TopicDocument> topic_documents(const Corpus& corpus) {
    std::vector<TopicDocument> out;
    out.reserve(corpus.size());
    for (const auto& d : corpus.documents()) out.push_back({d.id, d.text});
    return out;
}

Clustering cluster_topics(std::span<const std::string> doc_ids, const EmbeddingStore& store, std::size_t k,
                          std::uint64_t seed, const KMeansConfig& config) {
    if (k < 1) throw Error(kModule, "k must be >= 1");
    if (doc_ids.size() < k)
        throw Error(kModule, fmt::format("{} documents cannot form {} clusters", doc_ids.size(), k));
    if (config.restarts < 1 || config.max_iters < 1) throw Error(kModule, "restarts and max_iters must be >= 1");

    std::vector<std::string> ids(doc_ids.begin(), doc_ids.end());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw Error(kModule, "duplicate document id");

    Matrix x;
    x.reserve(ids.size());
    for (const auto& id : ids) {
        if (!store.contains(id)) throw Error(kModule, "document has no embedding", id);
        auto v = store.at(id);
        Vector row(v.begin(), v.end());
        double norm = 0.0;
        for (double e : row) norm += e * e;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw Error(kModule, "document embedding has zero norm", id);
        for (auto& e : row) e /= norm;
        x.push_back(std::move(row));
    }

    Rng rng(seed);
    Run best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < config.restarts; ++r) {
        auto run = lloyd(x, k, rng, config.max_iters);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    std::vector<std::size_t> relabel(k, k);
    std::size_t next = 0;
    for (auto l : best.labels)
        if (relabel[l] == k) relabel[l] = next++;

    Clustering out;
    out.doc_ids = std::move(ids);
    out.inertia = best.inertia;
    out.assignments.reserve(best.labels.size());
    for (auto l : best.labels) out.assignments.push_back(relabel[l]);
    return out;
}

std::vector<std::vector<Keyword>> ctfidf_keywords(std::span<const std::string> texts,
                                                  std::span<const std::size_t> assignments, std::size_t k,
                                                  std::size_t m, const Stoplist& stoplist) {
    if (texts.size() != assignments.size())
        throw Error(kModule, fmt::format("{} texts but {} assignments", texts.size(), assignments.size()));
    std::vector<std::map<std::string, double>> tf(k);
    std::unordered_map<std::string, double> f;
    double tokens = 0.0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (assignments[i] >= k) throw Error(kModule, fmt::format("topic index {} out of range", assignments[i]));
        for (auto& w : content_tokens(texts[i], stoplist)) {
            tf[assignments[i]][w] += 1.0;
            f[w] += 1.0;
            tokens += 1.0;
        }
    }
    const double a = k > 0 ? tokens / static_cast<double>(k) : 0.0;
    std::vector<std::vector<Keyword>> out(k);
    for (std::size_t c = 0; c < k; ++c) {
        if (m == 0) continue;
        std::vector<Keyword> all;
        for (const auto& [term, count] : tf[c]) all.push_back({term, count * std::log(1.0 + a / f[term])});
        std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) {
            return l.weight != r.weight ? l.weight > r.weight : l.term < r.term;
        });
        if (all.size() > m) all.resize(m);
        out[c] = std::move(all);
    }
    return out;
}

double umass_coherence(std::span<const std::string> ranked_terms, std::span<const std::string> texts,
                       const Stoplist& stoplist) {
    if (ranked_terms.size() < 2) return 0.0;
    std::vector<std::unordered_set<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) {
        auto toks = content_tokens(t, stoplist);
        docs.emplace_back(toks.begin(), toks.end());
    }
    auto df = [&](const std::string& a) {
        return static_cast<double>(std::count_if(docs.begin(), docs.end(), [&](const auto& d) { return d.count(a) > 0; }));
    };
    auto co = [&](const std::string& a, const std::string& b) {
        return static_cast<double>(
            std::count_if(docs.begin(), docs.end(), [&](const auto& d) { return d.count(a) > 0 && d.count(b) > 0; }));
    };
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 1; i < ranked_terms.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double dj = df(ranked_terms[j]);
            if (dj == 0.0) throw Error(kModule, "keyword absent from every document", ranked_terms[j]);
            sum += std::log((co(ranked_terms[i], ranked_terms[j]) + kUmassEpsilon) / dj);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

void ScanConfig::validate() const {
    if (k_min < 2) throw Error(kModule, "k_min must be >= 2");
    if (k_min > k_max) throw Error(kModule, "k_min must not exceed k_max");
    if (top_terms < 2) throw Error(kModule, "top_terms must be >= 2");
    if (!(tie_tolerance >= 0.0)) throw Error(kModule, "tie_tolerance must be non-negative");
}

TopicModelResult fit_topics(std::span<const TopicDocument> docs, const EmbeddingStore& store, std::size_t k,
                            const ScanConfig& config) {
    std::vector<std::string> ids;
    std::unordered_map<std::string, const std::string*> text_of;
    for (const auto& d : docs) {
        ids.push_back(d.id);
        text_of[d.id] = &d.text;
    }
    TopicModelResult r;
    r.k = k;
    r.clustering = cluster_topics(ids, store, k, config.seed, config.kmeans);
    std::vector<std::string> texts;
    texts.reserve(ids.size());
    for (const auto& id : r.clustering.doc_ids) texts.push_back(*text_of.at(id));
    r.keywords = ctfidf_keywords(texts, r.clustering.assignments, k, config.top_terms, config.stoplist);

    double total = 0.0;
    std::size_t scored = 0;
    for (const auto& kw : r.keywords) {
        if (kw.size() < 2) continue;
        std::vector<std::string> terms;
        for (const auto& w : kw) terms.push_back(w.term);
        total += umass_coherence(terms, texts, config.stoplist);
        ++scored;
    }
    r.coherence = scored ? total / static_cast<double>(scored) : 0.0;
    return r;
}

ScanResult coherence_scan(std::span<const TopicDocument> docs, const EmbeddingStore& store, const ScanConfig& config) {
    config.validate();
    if (docs.size() < config.k_max)
        throw Error(kModule, fmt::format("{} documents cannot form {} clusters", docs.size(), config.k_max));
    std::vector<std::future<TopicModelResult>> jobs;
    for (std::size_t k = config.k_min; k <= config.k_max; ++k)
        jobs.push_back(std::async(std::launch::async, [&, k] { return fit_topics(docs, store, k, config); }));
    std::vector<TopicModelResult> fits;
    for (auto& j : jobs) fits.push_back(j.get());

    ScanResult scan;
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& f : fits) {
        scan.scores.emplace_back(f.k, f.coherence);
        hi = std::max(hi, f.coherence);
    }
    for (auto& f : fits) {
        if (f.coherence >= hi - config.tie_tolerance) {
            scan.best_k = f.k;
            scan.best = std::move(f);
            break;
        }
    }
    return scan;
}

void write_scan_json(std::ostream& out, const ScanResult& scan) {
    nlohmann::ordered_json j;
    j["best_k"] = scan.best_k;
    auto& scores = j["scores"] = nlohmann::ordered_json::array();
    for (const auto& [k, c] : scan.scores) scores.push_back({{"k", k}, {"coherence", c}});
    auto& topics = j["topics"] = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < scan.best.keywords.size(); ++t) {
        nlohmann::ordered_json topic;
        topic["topic"] = t;
        auto& kws = topic["keywords"] = nlohmann::ordered_json::array();
        for (const auto& kw : scan.best.keywords[t]) kws.push_back({{"term", kw.term}, {"weight", kw.weight}});
        auto& members = topic["documents"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < scan.best.clustering.doc_ids.size(); ++i)
            if (scan.best.clustering.assignments[i] == t) members.push_back(scan.best.clustering.doc_ids[i]);
        topics.push_back(std::move(topic));
    }
    out << j.dump(2) << '\n';
}

}  // namespace ipts
