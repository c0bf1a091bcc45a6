#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "ipts/error.hpp"
#include "ipts/topics.hpp"
#include "oracles.hpp"

using namespace ipts;

namespace {

std::vector<std::string> ids_of(const std::vector<TopicDocument>& docs) {
    std::vector<std::string> ids;
    for (const auto& d : docs) ids.push_back(d.id);
    return ids;
}

// Two clusterings agree when they induce the same partition.
bool same_partition(const Clustering& a, const Clustering& b) {
    if (a.doc_ids != b.doc_ids) return false;
    for (std::size_t i = 0; i < a.doc_ids.size(); ++i) {
        for (std::size_t j = i + 1; j < a.doc_ids.size(); ++j) {
            if ((a.assignments[i] == a.assignments[j]) != (b.assignments[i] == b.assignments[j])) return false;
        }
    }
    return true;
}

ScanConfig scan_config() {
    ScanConfig cfg;
    cfg.k_min = 5;
    cfg.k_max = 10;
    return cfg;
}

}  // namespace

TEST_CASE("planted topics are recovered by the coherence scan") {
    const auto planted = testing::planted_topics(7, 12, 99);
    const auto scan = coherence_scan(planted.docs, planted.store, scan_config());
    CHECK(scan.best_k == 7);
    CHECK(scan.scores.size() == 6);
    // every planted group lands in one topic
    const auto& cl = scan.best.clustering;
    for (std::size_t i = 0; i < cl.doc_ids.size(); ++i) {
        for (std::size_t j = 0; j < cl.doc_ids.size(); ++j) {
            const bool same_group = cl.doc_ids[i].substr(0, 3) == cl.doc_ids[j].substr(0, 3);
            CHECK((cl.assignments[i] == cl.assignments[j]) == same_group);
        }
    }
}

TEST_CASE("planted topics score above random labelings") {
    const auto planted = testing::planted_topics(6, 10, 5);
    std::vector<std::string> texts;
    for (const auto& d : planted.docs) texts.push_back(d.text);
    const auto fit = fit_topics(planted.docs, planted.store, 6, scan_config());
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::size_t> random(texts.size());
        for (auto& a : random) a = rng.uniform_index(6);
        const auto kw = ctfidf_keywords(texts, random, 6, 10);
        double total = 0;
        std::size_t n = 0;
        for (const auto& topic : kw) {
            if (topic.size() < 2) continue;
            std::vector<std::string> terms;
            for (const auto& k : topic) terms.push_back(k.term);
            total += umass_coherence(terms, texts);
            ++n;
        }
        CHECK(fit.coherence > total / static_cast<double>(n));
    }
}

TEST_CASE("clustering is deterministic and ignores input order") {
    const auto planted = testing::planted_topics(4, 8, 3);
    auto ids = ids_of(planted.docs);
    const auto a = cluster_topics(ids, planted.store, 4, 11);
    const auto b = cluster_topics(ids, planted.store, 4, 11);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
    Rng rng(8);
    rng.shuffle(ids);
    const auto c = cluster_topics(ids, planted.store, 4, 11);
    CHECK(c.doc_ids == a.doc_ids);
    CHECK(c.assignments == a.assignments);
    CHECK(same_partition(a, c));
}

TEST_CASE("clustering edge cases") {
    EmbeddingStore store;
    store.insert("a", {1, 0});
    store.insert("b", {0.99, 0.01});
    store.insert("c", {0, 1});
    store.insert("d", {0.01, 0.99});
    const std::vector<std::string> ids = {"a", "b", "c", "d"};
    const auto two = cluster_topics(ids, store, 2, 1);
    CHECK(two.assignments[0] == two.assignments[1]);
    CHECK(two.assignments[2] == two.assignments[3]);
    CHECK(two.assignments[0] != two.assignments[2]);
    CHECK(two.assignments[0] == 0);

    const auto all = cluster_topics(ids, store, 4, 1);
    CHECK(std::set<std::size_t>(all.assignments.begin(), all.assignments.end()).size() == 4);
    CHECK(all.inertia == doctest::Approx(0.0));

    CHECK_THROWS_AS(cluster_topics(ids, store, 5, 1), Error);
    const std::vector<std::string> ghost = {"a", "b", "zzz"};
    CHECK_THROWS_AS(cluster_topics(ghost, store, 2, 1), Error);

    EmbeddingStore same;
    for (const char* id : {"x", "y", "z"}) same.insert(id, {0.3, 0.4});
    const std::vector<std::string> xyz = {"x", "y", "z"};
    const auto degenerate = cluster_topics(xyz, same, 2, 1);
    CHECK(degenerate.assignments.size() == 3);
    CHECK(degenerate.inertia == doctest::Approx(0.0));
}

TEST_CASE("class TF-IDF keywords") {
    const std::vector<std::string> texts = {"apple banana apple", "apple cherry", "dog cat", "dog the cat dog"};
    const std::vector<std::size_t> assign = {0, 0, 1, 1};
    const auto kw = ctfidf_keywords(texts, assign, 2, 5);
    REQUIRE(kw.size() == 2);
    CHECK(kw[0][0].term == "apple");
    CHECK(kw[1][0].term == "dog");
    for (const auto& k : kw[0]) CHECK(k.term != "dog");
    for (const auto& topic : kw) {
        for (const auto& k : topic) CHECK(k.term != "the");
        for (std::size_t i = 1; i < topic.size(); ++i) CHECK(topic[i - 1].weight >= topic[i].weight);
    }
    // A = 5 tokens per topic; f(apple) = 3; tf(apple, 0) = 3
    CHECK(kw[0][0].weight == doctest::Approx(3 * std::log(1 + 5.0 / 3.0)));
    const auto one = ctfidf_keywords(texts, assign, 2, 1);
    CHECK(one[0].size() == 1);
}

TEST_CASE("UMass coherence by hand") {
    const std::vector<std::string> texts = {"red blue", "red blue", "red green", "blue"};
    const std::vector<std::string> terms = {"red", "blue"};
    // D(blue, red) = 2, D(red) = 3
    CHECK(umass_coherence(terms, texts) == doctest::Approx(std::log((2 + 1e-12) / 3.0)));
    const std::vector<std::string> single = {"red"};
    CHECK(umass_coherence(single, texts) == 0.0);
}

TEST_CASE("scan configuration and ties") {
    ScanConfig bad;
    bad.k_min = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.k_min = 6;
    bad.k_max = 5;
    CHECK_THROWS_AS(bad.validate(), Error);

    // Identical documents give the same coherence at every k; ties go to the smaller k.
    std::vector<TopicDocument> docs;
    EmbeddingStore store;
    for (int i = 0; i < 8; ++i) {
        const auto id = "d" + std::to_string(i);
        docs.push_back({id, "same words here again"});
        store.insert(id, {1, 2, 3});
    }
    ScanConfig cfg;
    cfg.k_min = 2;
    cfg.k_max = 5;
    const auto scan = coherence_scan(docs, store, cfg);
    CHECK(scan.best_k == 2);
    std::ostringstream out;
    write_scan_json(out, scan);
    CHECK(out.str().find("\"best_k\"") != std::string::npos);
}

TEST_CASE("topic documents cover posts and comments") {
    const auto& fx = testing::fixture();
    const auto docs = topic_documents(fx.corpus);
    CHECK(docs.size() == fx.corpus.size());
    CHECK(docs.front().id == fx.corpus.documents().front().id);
}
