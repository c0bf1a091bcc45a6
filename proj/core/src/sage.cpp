#include "ipts/sage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "sage";
constexpr double kMaxLambda = 1e12;
constexpr int kInnerIters = 200;

double total(std::span<const std::uint64_t> v) {
    return std::accumulate(v.begin(), v.end(), 0.0, [](double a, std::uint64_t b) { return a + static_cast<double>(b); });
}

std::vector<double> softmax(std::span<const double> m, std::span<const double> eta, double* log_z = nullptr) {
    std::vector<double> p(m.size());
    double hi = -INFINITY;
    for (std::size_t i = 0; i < m.size(); ++i) hi = std::max(hi, m[i] + eta[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        p[i] = std::exp(m[i] + eta[i] - hi);
        z += p[i];
    }
    for (auto& v : p) v /= z;
    if (log_z) *log_z = hi + std::log(z);
    return p;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Newton ascent for fixed lambda. The negated Hessian is
/// diag(C p + lambda) - C p p^T, inverted with Sherman-Morrison.
std::vector<double> solve_inner(std::span<const std::uint64_t> c, double big_c, std::span<const double> m,
                                std::vector<double> eta, double lambda, double tol) {
    const std::size_t n = eta.size();
    double f = sage_objective(c, m, eta, lambda);
    for (int it = 0; it < kInnerIters; ++it) {
        const auto p = softmax(m, eta);
        std::vector<double> g(n), dinv(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = static_cast<double>(c[i]) - big_c * p[i] - lambda * eta[i];
            dinv[i] = 1.0 / (big_c * p[i] + lambda);
        }
        double utdg = 0.0, utdu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            utdg += p[i] * dinv[i] * g[i];
            utdu += p[i] * p[i] * dinv[i];
        }
        const double denom = 1.0 - big_c * utdu;
        std::vector<double> step(n);
        for (std::size_t i = 0; i < n; ++i) step[i] = dinv[i] * g[i] + dinv[i] * p[i] * big_c * utdg / denom;

        double t = 1.0;
        std::vector<double> next(n);
        double f_next = f;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) next[i] = eta[i] + t * step[i];
            f_next = sage_objective(c, m, next, lambda);
            if (f_next >= f) break;
            t *= 0.5;
        }
        if (!(f_next >= f)) break;
        const double moved = max_abs_diff(next, eta);
        eta.swap(next);
        f = f_next;
        if (moved < tol * 1e-2) break;
    }
    return eta;
}

}  // namespace

void SageInput::validate() const {
    if (fg_counts.size() != vocab.size() || bg_counts.size() != vocab.size())
        throw Error(kModule, fmt::format("length mismatch: vocab {}, fg {}, bg {}", vocab.size(), fg_counts.size(),
                                         bg_counts.size()));
    if (vocab.empty()) throw Error(kModule, "empty vocabulary");
    if (total(fg_counts) <= 0.0) throw Error(kModule, "foreground total is zero");
    if (total(bg_counts) <= 0.0) throw Error(kModule, "background total is zero");
}

void SageConfig::validate() const {
    if (max_iters < 1) throw Error(kModule, "max_iters must be >= 1");
    if (!(tol > 0.0)) throw Error(kModule, "tol must be positive");
    if (!(smoothing > 0.0)) throw Error(kModule, "smoothing must be positive");
}

SageInput build_sage_input(std::span<const std::string_view> foreground, std::span<const std::string_view> background,
                           const VocabConfig& config) {
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;
    auto stop = [&](const std::string& w) { return config.stoplist.count(w) > 0; };
    auto count_side = [&](std::span<const std::string_view> texts, bool fg) {
        for (auto t : texts) {
            const auto toks = text::word_tokens(t);
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (!stop(toks[i])) {
                    auto& e = counts[toks[i]];
                    (fg ? e.first : e.second)++;
                }
                if (i + 1 < toks.size() && !(stop(toks[i]) && stop(toks[i + 1]))) {
                    auto& e = counts[toks[i] + " " + toks[i + 1]];
                    (fg ? e.first : e.second)++;
                }
            }
        }
    };
    count_side(foreground, true);
    count_side(background, false);

    SageInput in;
    for (const auto& [gram, fb] : counts) {
        if (fb.first + fb.second < config.min_count) continue;
        in.vocab.push_back(gram);
        in.fg_counts.push_back(fb.first);
        in.bg_counts.push_back(fb.second);
    }
    in.validate();
    return in;
}

std::vector<double> sage_background(const SageInput& input, double smoothing) {
    double z = 0.0;
    for (auto b : input.bg_counts) z += static_cast<double>(b) + smoothing;
    std::vector<double> m(input.bg_counts.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::log((static_cast<double>(input.bg_counts[i]) + smoothing) / z);
    return m;
}

double sage_objective(std::span<const std::uint64_t> c, std::span<const double> m, std::span<const double> eta,
                      double lambda) {
    double log_z = 0.0;
    softmax(m, eta, &log_z);
    double f = -total(c) * log_z;
    for (std::size_t i = 0; i < c.size(); ++i)
        f += static_cast<double>(c[i]) * eta[i] - 0.5 * lambda * eta[i] * eta[i];
    return f;
}

std::vector<double> sage_gradient_at_zero(const SageInput& input, double smoothing) {
    input.validate();
    const auto m = sage_background(input, smoothing);
    const std::vector<double> zero(m.size(), 0.0);
    const auto p = softmax(m, zero);
    const double big_c = total(input.fg_counts);
    std::vector<double> g(m.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<double>(input.fg_counts[i]) - big_c * p[i];
    return g;
}

SageResult fit_sage(const SageInput& input, const SageConfig& config) {
    input.validate();
    config.validate();
    const auto m = sage_background(input, config.smoothing);
    const double big_c = total(input.fg_counts);
    const std::size_t n = m.size();

    SageResult r;
    r.vocab = input.vocab;
    r.eta.assign(n, 0.0);
    double lambda = 1.0;
    for (int outer = 0; outer < config.max_iters; ++outer) {
        r.regularizer_trace.push_back(lambda);
        auto next = solve_inner(input.fg_counts, big_c, m, r.eta, lambda, config.tol);
        const double moved = max_abs_diff(next, r.eta);
        r.eta.swap(next);
        r.iterations = outer + 1;
        if (outer > 0 && moved < config.tol) {
            r.converged = true;
            break;
        }
        double mean_abs = 0.0;
        for (double e : r.eta) mean_abs += std::abs(e);
        mean_abs /= static_cast<double>(n);
        lambda = mean_abs > 1.0 / kMaxLambda ? 1.0 / mean_abs : kMaxLambda;
    }
    for (double e : r.eta)
        if (!std::isfinite(e)) throw Error(kModule, "fit produced a non-finite eta");
    return r;
}

Discriminating top_discriminating(const SageResult& result, std::size_t k) {
    std::vector<NgramWeight> all;
    all.reserve(result.vocab.size());
    for (std::size_t i = 0; i < result.vocab.size(); ++i) all.push_back({result.vocab[i], result.eta[i]});
    const std::size_t take = std::min(k, all.size());
    Discriminating d;
    auto pos = all;
    std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) {
        return a.eta != b.eta ? a.eta > b.eta : a.ngram < b.ngram;
    });
    d.top_positive.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take));
    auto neg = std::move(all);
    std::sort(neg.begin(), neg.end(), [](const auto& a, const auto& b) {
        return a.eta != b.eta ? a.eta < b.eta : a.ngram < b.ngram;
    });
    d.top_negative.assign(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(take));
    return d;
}

void write_sage_csv(std::ostream& out, const Discriminating& top) {
    out << "ngram,eta\n";
    for (const auto& w : top.top_positive) out << io::csv_field(w.ngram) << ',' << io::format_real(w.eta) << '\n';
    for (const auto& w : top.top_negative) out << io::csv_field(w.ngram) << ',' << io::format_real(w.eta) << '\n';
}

}  // namespace ipts
