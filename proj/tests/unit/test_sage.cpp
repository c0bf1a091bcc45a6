#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ipts/error.hpp"
#include "ipts/sage.hpp"
#include "oracles.hpp"

using namespace ipts;

namespace {

SageInput input(std::vector<std::uint64_t> fg, std::vector<std::uint64_t> bg) {
    SageInput in;
    for (std::size_t i = 0; i < fg.size(); ++i) in.vocab.push_back("t" + std::to_string(100 + i));
    in.fg_counts = std::move(fg);
    in.bg_counts = std::move(bg);
    return in;
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("identical foreground and background give zero eta") {
    const auto r = fit_sage(input({5, 17, 3, 40, 9}, {5, 17, 3, 40, 9}));
    CHECK(r.converged);
    for (double e : r.eta) CHECK(std::abs(e) < 1e-6);
}

TEST_CASE("two-term signs follow the gradient at zero") {
    const auto in = input({90, 10}, {50, 50});
    const auto g = sage_gradient_at_zero(in, 0.1);
    CHECK(g[0] > 0);
    CHECK(g[1] < 0);
    const auto r = fit_sage(in);
    CHECK(r.eta[0] > 0);
    CHECK(r.eta[1] < 0);
}

TEST_CASE("swapping foreground and background flips the gradient") {
    const auto a = input({30, 5, 12, 60}, {10, 25, 12, 40});
    const auto b = input({10, 25, 12, 40}, {30, 5, 12, 60});
    const auto ga = sage_gradient_at_zero(a, 0.1);
    const auto gb = sage_gradient_at_zero(b, 0.1);
    for (std::size_t i = 0; i < ga.size(); ++i) {
        if (std::abs(ga[i]) > 1e-9) CHECK((ga[i] > 0) != (gb[i] > 0));
    }
}

TEST_CASE("planted token has the largest eta") {
    std::vector<std::uint64_t> fg(20, 100), bg(20, 100);
    fg[7] = 1000;
    const auto r = fit_sage(input(fg, bg));
    CHECK(argmax(r.eta) == 7);
    for (std::size_t i = 0; i < 20; ++i) {
        if (i != 7) CHECK(r.eta[i] < r.eta[7]);
    }
}

TEST_CASE("two-term fits match a brute-force grid search") {
    const std::uint64_t cases[][4] = {{90, 10, 50, 50}, {1000, 100, 100, 100}, {3, 40, 20, 20}, {7, 7, 1, 30},
                                      {250, 120, 80, 300}};
    for (const auto& c : cases) {
        const auto r = fit_sage(input({c[0], c[1]}, {c[2], c[3]}));
        REQUIRE(!r.regularizer_trace.empty());
        const double lambda = r.regularizer_trace.back();
        const double x = oracle::sage_two_term_argmax(c[0], c[1], c[2], c[3], 0.1, lambda);
        CHECK(std::abs(r.eta[0] - x) < 1e-3);
        CHECK(std::abs(r.eta[1] + x) < 1e-3);
    }
}

TEST_CASE("objective matches the two-term form") {
    const auto in = input({90, 10}, {50, 50});
    const auto m = sage_background(in, 0.1);
    for (double x : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
        const std::vector<double> eta = {x, -x};
        const double got = sage_objective(in.fg_counts, m, eta, 0.7);
        const double want = oracle::sage_two_term_objective(x, 90, 10, 50, 50, 0.1, 0.7);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("scaling counts keeps the ranking of discriminating terms") {
    const std::vector<std::uint64_t> fg = {40, 10, 25, 5, 80}, bg = {20, 20, 20, 20, 20};
    std::vector<std::uint64_t> fg10, bg10;
    for (auto v : fg) fg10.push_back(v * 10);
    for (auto v : bg) bg10.push_back(v * 10);
    const auto a = fit_sage(input(fg, bg));
    const auto b = fit_sage(input(fg10, bg10));
    std::vector<std::size_t> ia(5), ib(5);
    for (std::size_t i = 0; i < 5; ++i) ia[i] = ib[i] = i;
    std::sort(ia.begin(), ia.end(), [&](auto x, auto y) { return a.eta[x] < a.eta[y]; });
    std::sort(ib.begin(), ib.end(), [&](auto x, auto y) { return b.eta[x] < b.eta[y]; });
    CHECK(ia == ib);
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(fit_sage(input({1, 2}, {0, 0})), Error);
    CHECK_THROWS_AS(fit_sage(input({0, 0}, {1, 2})), Error);
    auto bad = input({1, 2}, {1, 2});
    bad.vocab.pop_back();
    CHECK_THROWS_AS(fit_sage(bad), Error);
    SageConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(fit_sage(input({1, 2}, {1, 2}), cfg), Error);
}

TEST_CASE("max_iters exhaustion reports non-convergence") {
    SageConfig cfg;
    cfg.max_iters = 1;
    const auto r = fit_sage(input({90, 10, 40}, {50, 50, 5}), cfg);
    CHECK(r.iterations == 1);
    CHECK_FALSE(r.converged);
}

TEST_CASE("vocabulary building") {
    const std::vector<std::string_view> fg = {"the dark night", "dark night again", "dark night"};
    const std::vector<std::string_view> bg = {"the sunny day", "dark day"};
    VocabConfig cfg;
    cfg.min_count = 2;
    const auto in = build_sage_input(fg, bg, cfg);
    CHECK(std::is_sorted(in.vocab.begin(), in.vocab.end()));
    const auto at = [&](const std::string& w) {
        return static_cast<std::size_t>(std::find(in.vocab.begin(), in.vocab.end(), w) - in.vocab.begin());
    };
    REQUIRE(at("dark") < in.vocab.size());
    CHECK(in.fg_counts[at("dark")] == 3);
    CHECK(in.bg_counts[at("dark")] == 1);
    CHECK(at("dark night") < in.vocab.size());
    CHECK(at("the") == in.vocab.size());
    CHECK(at("again") == in.vocab.size());
}

TEST_CASE("top discriminating lists") {
    SageResult r;
    r.vocab = {"a", "b", "c", "d"};
    r.eta = {0.5, -1.0, 0.5, 2.0};
    const auto t = top_discriminating(r, 2);
    REQUIRE(t.top_positive.size() == 2);
    CHECK(t.top_positive[0].ngram == "d");
    CHECK(t.top_positive[1].ngram == "a");
    CHECK(t.top_negative[0].ngram == "b");
    CHECK(t.top_negative[1].ngram == "a");
    const auto all = top_discriminating(r, 10);
    CHECK(all.top_positive.size() == 4);
    std::ostringstream out;
    write_sage_csv(out, t);
    CHECK(out.str().rfind("ngram,eta\n", 0) == 0);
}
