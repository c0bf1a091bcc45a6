#include "ipts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "ipts/error.hpp"

namespace ipts::stats {
namespace {

constexpr const char* kModule = "stats";
constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

Stars stars_for(double p) {
    if (p < 0.001) return Stars::Three;
    if (p < 0.01) return Stars::Two;
    if (p < 0.05) return Stars::One;
    return Stars::NS;
}

StatResult finish(double statistic, double p, int n) {
    StatResult r;
    r.statistic = statistic;
    r.p_value = std::clamp(p, 0.0, 1.0);
    r.n_comparisons = n;
    const auto adj = bonferroni(r.p_value, n);
    r.p_adjusted = adj.p;
    r.stars = adj.stars;
    return r;
}

}  // namespace

std::string_view stars_text(Stars s) {
    switch (s) {
        case Stars::Three: return "***";
        case Stars::Two: return "**";
        case Stars::One: return "*";
        case Stars::NS: break;
    }
    return "ns";
}

Adjusted bonferroni(double p, int n) {
    if (n < 1) throw Error(kModule, "number of comparisons must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(kModule, fmt::format("p-value {} outside [0,1]", p));
    Adjusted a;
    a.p = std::min(1.0, p * n);
    a.stars = stars_for(a.p);
    return a;
}

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw Error(kModule, "gamma_p needs a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw Error(kModule, "gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_cf(a, x);
}

double beta_i(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0) throw Error(kModule, "beta_i needs a, b > 0 and x in [0,1]");
    if (x == 0.0 || x == 1.0) return x;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi2_sf(double x, double df) {
    if (df <= 0.0) throw Error(kModule, "chi-square df must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double t_two_sided(double t, double df) {
    if (df <= 0.0) throw Error(kModule, "t df must be positive");
    if (!std::isfinite(t)) return 0.0;
    return beta_i(df / 2.0, 0.5, df / (df + t * t));
}

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

StatResult kruskal_wallis(std::span<const std::vector<double>> groups, int n_comparisons) {
    if (groups.size() < 2) throw Error(kModule, "Kruskal-Wallis needs at least 2 groups");
    std::vector<double> pooled;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw Error(kModule, fmt::format("group {} is empty", g));
        for (double v : groups[g]) {
            if (!std::isfinite(v)) throw Error(kModule, fmt::format("non-finite value in group {}", g));
            pooled.push_back(v);
        }
    }
    const double n = static_cast<double>(pooled.size());
    if (pooled.size() < 3) throw Error(kModule, "Kruskal-Wallis needs N >= 3");
    const auto ranks = midranks(pooled);

    double sum = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double r = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) r += ranks[offset + i];
        sum += r * r / static_cast<double>(g.size());
        offset += g.size();
    }
    const double h_raw = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double correction = 1.0 - ties / (n * n * n - n);
    if (correction <= 0.0) throw Error(kModule, "all values are identical; H is undefined");
    const double h = std::max(0.0, h_raw / correction);
    return finish(h, chi2_sf(h, static_cast<double>(groups.size() - 1)), n_comparisons);
}

StatResult paired_t(std::span<const double> x, std::span<const double> y, int n_comparisons) {
    if (x.size() != y.size())
        throw Error(kModule, fmt::format("paired samples differ in length ({} vs {})", x.size(), y.size()));
    if (x.size() < 2) throw Error(kModule, "paired t-test needs at least 2 pairs");
    const double n = static_cast<double>(x.size());
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double scale = std::max(1.0, std::abs(mean));
    if (!(sd > 1e-12 * scale)) throw Error(kModule, "differences are constant; t is undefined");
    const double t = mean / (sd / std::sqrt(n));
    return finish(t, t_two_sided(t, n - 1.0), n_comparisons);
}

}  // namespace ipts::stats
