#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ipts/rake.hpp"

namespace ipts {

struct SageInput {
    std::vector<std::string> vocab;
    std::vector<std::uint64_t> fg_counts;
    std::vector<std::uint64_t> bg_counts;

    /// Throws unless lengths agree and both totals are positive.
    void validate() const;
};

struct VocabConfig {
    Stoplist stoplist = default_stoplist();
    std::uint64_t min_count = 5;
};

/// Lowercased unigrams and bigrams from text::word_tokens, counted within
/// each text. An n-gram is kept when its combined fg+bg count reaches
/// min_count and it is not made only of stopwords. Vocab is sorted.
SageInput build_sage_input(std::span<const std::string_view> foreground, std::span<const std::string_view> background,
                           const VocabConfig& config = {});

struct SageConfig {
    int max_iters = 100;
    double tol = 1e-6;
    double smoothing = 0.1;

    void validate() const;
};

struct SageResult {
    std::vector<std::string> vocab;
    std::vector<double> eta;
    /// Penalty weight used by each outer iteration; the last entry produced eta.
    std::vector<double> regularizer_trace;
    int iterations = 0;
    bool converged = false;
};

/// Background log-probabilities log((bg + s) / sum(bg + s)).
std::vector<double> sage_background(const SageInput& input, double smoothing);

/// Penalized foreground log-likelihood
/// sum c_i eta_i - C log sum exp(m_i + eta_i) - lambda/2 sum eta_i^2.
double sage_objective(std::span<const std::uint64_t> fg_counts, std::span<const double> m, std::span<const double> eta,
                      double lambda);

/// d/d eta of the unpenalized likelihood at eta = 0.
std::vector<double> sage_gradient_at_zero(const SageInput& input, double smoothing);

/// Outer loop re-estimates lambda = 1 / mean|eta| (starting at 1); the inner
/// Newton solve maximizes sage_objective for that lambda. Stops when
/// max|delta eta| < tol between outer iterations.
SageResult fit_sage(const SageInput& input, const SageConfig& config = {});

struct NgramWeight {
    std::string ngram;
    double eta = 0.0;
};

struct Discriminating {
    std::vector<NgramWeight> top_positive;
    std::vector<NgramWeight> top_negative;
};

/// k largest and k smallest eta; ties by n-gram. Lists truncate at |vocab|.
Discriminating top_discriminating(const SageResult& result, std::size_t k);

/// Columns ngram,eta: top positive rows first, then top negative rows.
void write_sage_csv(std::ostream& out, const Discriminating& top);

}  // namespace ipts
