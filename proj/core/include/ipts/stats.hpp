#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipts::stats {

enum class Stars { NS, One, Two, Three };

std::string_view stars_text(Stars s);

struct StatResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int n_comparisons = 1;
    double p_adjusted = 1.0;
    Stars stars = Stars::NS;
};

struct Adjusted {
    double p = 1.0;
    Stars stars = Stars::NS;
};

/// min(1, p * n); stars at strict thresholds 0.05, 0.01, 0.001.
Adjusted bonferroni(double p, int n);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double beta_i(double a, double b, double x);

/// Upper tail of the chi-square distribution.
double chi2_sf(double x, double df);
/// Two-sided tail P(|T| >= |t|) of Student's t.
double t_two_sided(double t, double df);

/// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

/// H with tie correction; p from chi-square with groups - 1 df.
/// Throws when fewer than 2 groups, an empty group, N < 3, or all values equal.
StatResult kruskal_wallis(std::span<const std::vector<double>> groups, int n_comparisons = 1);

/// t over d = y - x with sample sd; two-sided p on n - 1 df.
/// Throws on unequal lengths, n < 2, or constant differences.
StatResult paired_t(std::span<const double> x, std::span<const double> y, int n_comparisons = 1);

}  // namespace ipts::stats
