#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "ipts/codebook.hpp"
#include "ipts/embedding.hpp"
#include "ipts/error.hpp"
#include "oracles.hpp"

using namespace ipts;

namespace {

EmbeddingStore read(const std::string& s) {
    std::istringstream in(s);
    return read_store(in);
}

}  // namespace

TEST_CASE("load_store declares the first record's dimension") {
    const auto store = read("{\"key\":\"a\",\"vector\":[1,0,0]}\n{\"key\":\"b\",\"vector\":[0,1,0]}\n");
    CHECK(store.dimension() == 3u);
    CHECK(store.size() == 2);
}

TEST_CASE("load_store rejects mixed dimensions naming both") {
    try {
        read("{\"key\":\"a\",\"vector\":[1,0,0]}\n{\"key\":\"b\",\"vector\":[0,1,0,0]}\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find('3') != std::string::npos);
        CHECK(msg.find('4') != std::string::npos);
        CHECK(e.context() == "b");
    }
}

TEST_CASE("empty store has no dimension and queries fail") {
    const auto store = read("");
    CHECK_FALSE(store.dimension().has_value());
    CHECK_THROWS_AS(store.at("x"), Error);
}

TEST_CASE("non-finite components and repeated keys are rejected") {
    EmbeddingStore s;
    CHECK_THROWS_AS(s.insert("x", {1.0, NAN}), Error);
    s.insert("y", {1.0, 2.0});
    CHECK_THROWS_AS(s.insert("y", {1.0, 2.0}), Error);
    CHECK_THROWS_AS(s.insert("z", {1.0}), Error);
}

TEST_CASE("cosine reference values") {
    const std::vector<double> e1 = {1, 0}, e2 = {0, 1}, d = {1, 1}, z = {0, 0};
    CHECK(cosine(e1, e1) == doctest::Approx(1.0));
    CHECK(cosine(e1, e2) == doctest::Approx(0.0));
    CHECK(std::abs(cosine(d, e1) - 0.70710678) < 1e-8);
    CHECK_THROWS_AS(cosine(e1, z), Error);
    CHECK_THROWS_AS(cosine(e1, std::vector<double>{1, 0, 0}), Error);
}

TEST_CASE("cosine properties on random vectors") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto a = oracle::random_vector(rng, 16);
        const auto b = oracle::random_vector(rng, 16);
        const double lam = 0.01 + rng.uniform() * 100;
        auto scaled = a;
        for (auto& x : scaled) x *= lam;
        CHECK(std::abs(cosine(a, a) - 1.0) < 1e-9);
        CHECK(std::abs(cosine(a, b) - cosine(b, a)) < 1e-12);
        CHECK(std::abs(cosine(scaled, b) - cosine(a, b)) < 1e-9);
        CHECK(std::abs(cosine(a, b)) <= 1.0);
    }
}

TEST_CASE("centroid reference values") {
    CHECK(centroid(std::vector<Vector>{{1, 0}}) == Vector{1, 0});
    CHECK(centroid(std::vector<Vector>{{1, 0}, {0, 1}}) == Vector{0.5, 0.5});
    CHECK(centroid(std::vector<Vector>{{2, 0}, {0, 0}, {1, 3}}) == Vector{1, 1});
    CHECK_THROWS_AS(centroid(std::vector<Vector>{}), Error);
    const Vector v = {0.1, -0.7, 1.0 / 3};
    const auto c = centroid(std::vector<Vector>(7, v));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(c[i] - v[i]) < 1e-15);
}

TEST_CASE("file provider lists missing keys") {
    EmbeddingStore s;
    s.insert("a", {1, 0});
    s.insert("b", {0, 1});
    FileProvider p(s);
    const std::vector<TextItem> ok = {{"a", "x"}, {"b", "y"}};
    CHECK(embed_texts(p, ok).size() == 2);
    const std::vector<TextItem> miss = {{"a", "x"}, {"gone", "y"}};
    try {
        embed_texts(p, miss);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("gone") != std::string::npos);
    }
}

TEST_CASE("store round-trips through JSONL in sorted order") {
    EmbeddingStore s;
    s.insert("b", {0.1, 1e-17});
    s.insert("a", {-2.5, 3.0});
    std::ostringstream out;
    write_store(out, s);
    CHECK(out.str().rfind("{\"key\":\"a\"", 0) == 0);
    const auto back = read(out.str());
    CHECK(back.keys() == s.keys());
    CHECK(back.at("b")[1] == 1e-17);
}

TEST_CASE("phrase keys normalize case and whitespace") {
    CHECK(phrase_key("Living  ALONE") == phrase_key("living alone"));
    CHECK(phrase_key("living alone") != phrase_key("living  alone!"));
    CHECK(phrase_key("x").rfind("phrase:", 0) == 0);
    CHECK(phrase_key("x").size() == 7 + 16);
}

TEST_CASE("exported fixture covers every seed phrase key") {
    const auto& store = testing::fixture().store;
    for (const auto& [label, book] : seed_codebooks())
        for (const auto& p : book.phrases()) CHECK_MESSAGE(store.contains(phrase_key(p.text)), p.text);
}

TEST_CASE("hashing provider is deterministic and unit norm") {
    HashingProvider h(32);
    const auto a = h.embed_text("alpha beta");
    CHECK(a == h.embed_text("Alpha   BETA"));
    double n = 0;
    for (double x : a) n += x * x;
    CHECK(std::sqrt(n) == doctest::Approx(1.0));
    CHECK(cosine(a, h.embed_text("alpha beta gamma")) > cosine(a, h.embed_text("delta epsilon")));
}
