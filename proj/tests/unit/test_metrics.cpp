#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ipts/embedding.hpp"
#include "ipts/error.hpp"
#include "ipts/lexicon.hpp"
#include "ipts/metrics.hpp"
#include "ipts/text.hpp"
#include "oracles.hpp"

using namespace ipts;

namespace {

LexiconProfile rates(std::map<std::string, double> r) {
    LexiconProfile p;
    p.rates = std::move(r);
    return p;
}

std::size_t whitespace_words(const std::string& s) { return text::split_whitespace(s).size(); }

}  // namespace

TEST_CASE("verbosity examples") {
    auto v = verbosity("Hello world. Hi.");
    CHECK(v.words == 3);
    CHECK(v.words_per_sentence == 1.5);
    v = verbosity("");
    CHECK(v.words == 0);
    CHECK(v.words_per_sentence == 0.0);
    v = verbosity("one two three four five six seven");
    CHECK(v.words == 7);
    CHECK(v.words_per_sentence == 7.0);
    CHECK(count_sentences("Wait... what?! Fine.") == 3);
    CHECK(count_sentences("line one\nline two") == 2);
    CHECK(count_sentences("v1.2 is out") == 1);
}

TEST_CASE("readability examples") {
    CHECK(readability_cli(500, 5) == doctest::Approx(12.12).epsilon(1e-12));
    CHECK(readability_cli("abcde") == doctest::Approx(-16.0).epsilon(1e-12));
    CHECK_THROWS_AS(readability_cli(""), Error);
    CHECK_THROWS_AS(readability_cli("  \n "), Error);
}

TEST_CASE("repeatability and complexity examples") {
    CHECK(repeatability("a a b") == doctest::Approx(1.0 / 3.0));
    CHECK(repeatability("every word differs") == 0.0);
    CHECK(repeatability("x x x x") == 0.75);
    CHECK(repeatability("A a") == 0.5);
    CHECK_THROWS_AS(repeatability(""), Error);
    CHECK(complexity("cat catalog") == 5.0);
    CHECK(complexity("wonderful") == 9.0);
    CHECK(complexity("CAT cat") == 3.0);
    CHECK_THROWS_AS(complexity(" "), Error);
}

TEST_CASE("style accommodation examples") {
    const std::vector<std::string> cats = {"prep", "conj"};
    const auto a = rates({{"prep", 0.1}, {"conj", 0.1}});
    const auto b = rates({{"prep", 0.2}, {"conj", 0.0}});
    const auto c = rates({{"prep", 0.0}, {"conj", 0.3}});
    const auto z = rates({{"prep", 0.0}, {"conj", 0.0}});
    CHECK(style_accommodation(a, a, cats) == doctest::Approx(1.0));
    CHECK(style_accommodation(b, c, cats) == doctest::Approx(0.0));
    CHECK(style_accommodation(a, b, cats) == doctest::Approx(0.70710678));
    CHECK_THROWS_AS(style_accommodation(a, z, cats), Error);
    const std::vector<std::string> missing = {"prep", "article"};
    CHECK_THROWS_AS(style_accommodation(a, b, missing), Error);
}

TEST_CASE("diversity examples") {
    const std::vector<double> e1 = {1, 0}, e2 = {0, 1}, zero = {0, 0};
    const std::vector<std::span<const double>> both = {e1, e2};
    const auto c = centroid(both);
    CHECK(diversity(e1, c) == doctest::Approx(1 - 0.70710678));
    CHECK(diversity(e2, c) == doctest::Approx(1 - 0.70710678));
    CHECK(diversity(c, c) == doctest::Approx(0.0));
    CHECK_THROWS_AS(diversity(zero, c), Error);
    CHECK(semantic_similarity(e1, e1) == doctest::Approx(1.0));
    CHECK(semantic_similarity(e1, e2) == doctest::Approx(0.0));
}

TEST_CASE("text metrics hold their invariants on random texts") {
    Rng rng(1000);
    for (int i = 0; i < 1000; ++i) {
        const auto t = oracle::random_prose(rng, 1, 6);
        const auto padded = t + "   \n\t ";
        CHECK(verbosity(padded).words == verbosity(t).words);
        CHECK(verbosity(padded).words_per_sentence == verbosity(t).words_per_sentence);
        CHECK(readability_cli(padded) == readability_cli(t));
        CHECK(repeatability(padded) == repeatability(t));
        CHECK(complexity(padded) == complexity(t));

        const auto doubled = t + " " + t;
        CHECK(std::abs(readability_cli(doubled) - readability_cli(t)) < 1e-9);

        const double words = static_cast<double>(whitespace_words(t));
        const double letters = static_cast<double>(text::count_letters(t));
        const double sentences = static_cast<double>(count_sentences(t));
        CHECK(readability_cli(t) == doctest::Approx(oracle::coleman_liau(letters, words, sentences)).epsilon(1e-12));
        CHECK(verbosity(t).words == whitespace_words(t));
        const double r = repeatability(t);
        CHECK(r >= 0.0);
        CHECK(r < 1.0);
    }
}

TEST_CASE("vector metrics hold their invariants on random vectors") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        const auto dim = 2 + rng.uniform_index(30);
        const auto a = oracle::random_vector(rng, dim);
        const auto b = oracle::random_vector(rng, dim);
        const double s = semantic_similarity(a, b);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        const double d = diversity(a, b);
        CHECK(d >= 0.0);
        CHECK(d <= 2.0);
        const std::vector<std::span<const double>> only = {a};
        CHECK(std::abs(diversity(a, centroid(only))) < 1e-12);
    }
}

TEST_CASE("identical profiles accommodate fully") {
    const auto& lex = demo_lexicon();
    Rng rng(4);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto t = oracle::random_prose(rng, 1, 4) + " and the of it is";
        const auto p = profile(t, lex);
        CHECK(style_accommodation(p, p, default_function_categories()) == doctest::Approx(1.0));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("condition names") {
    for (auto c : kAllConditions) CHECK(parse_condition(condition_name(c)) == c);
    CHECK_THROWS_AS(parse_condition("AI9"), Error);
}

TEST_CASE("file score provider") {
    std::istringstream in(R"({"id":"a","formality":0.5,"empathy":0.25}
{"id":"b","formality":0.9}
)");
    FileScoreProvider provider(in);
    const std::vector<TextItem> items = {{"a", "x"}, {"b", "y"}};
    const auto s = external_scores(items, provider);
    CHECK(s.at("a").formality == 0.5);
    CHECK(s.at("a").empathy == 0.25);
    CHECK_FALSE(s.at("b").empathy.has_value());
    const std::vector<TextItem> ghost = {{"zz", "x"}};
    try {
        external_scores(ghost, provider);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK((std::string(e.what()) + e.context()).find("zz") != std::string::npos);
    }
    std::istringstream bad(R"({"id":"a","formality":1.5})");
    CHECK_THROWS_AS(FileScoreProvider{bad}, Error);
}

TEST_CASE("compute_metrics over a small batch") {
    EmbeddingStore store;
    store.insert("p1", {1, 0, 0});
    store.insert("r1", {1, 0, 0});
    store.insert("r2", {0, 1, 0});
    store.insert("r3", {0, 0, 1});
    const std::vector<MetricInput> inputs = {
        {"p1", "r1", Condition::OC, "I am alone and it is hard.", "You are not alone in this."},
        {"p1", "r2", Condition::AI1, "I am alone and it is hard.", "Hmm."},
        {"p1", "r3", Condition::AI1, "I am alone and it is hard.", "I hear you and I am here for you."},
    };
    MetricConfig cfg;
    cfg.lexicon = &demo_lexicon();
    const auto batch = compute_metrics(inputs, store, cfg);
    REQUIRE(batch.rows.size() == 3);
    CHECK(batch.rows[0].post_id == "p1");
    CHECK(batch.rows[0].semantic_similarity == doctest::Approx(1.0));
    CHECK(batch.rows[0].diversity == doctest::Approx(0.0));
    CHECK(batch.rows[1].diversity == doctest::Approx(1 - 0.70710678));
    CHECK(batch.rows[1].style_accommodation == 0.0);
    CHECK_FALSE(batch.warnings.empty());
    CHECK_FALSE(batch.rows[0].formality.has_value());
    CHECK(metric_value(batch.rows[0], "verbosity_response") == 6.0);
    CHECK_FALSE(metric_value(batch.rows[0], "empathy").has_value());
    CHECK(metric_names().size() == 11);

    std::ostringstream out;
    write_metrics_csv(out, batch.rows);
    const auto csv = out.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
