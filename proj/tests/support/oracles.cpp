#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace oracle {
namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool numeric(const std::string& w) {
    return std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<std::pair<std::string, double>> rake(const std::string& text, const Stoplist& stop, std::size_t min_len,
                                                 std::size_t max_len) {
    // Rewrite the text so that every phrase delimiter becomes a lone "|".
    std::string spaced;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (word_char(c)) {
            spaced += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if ((c == '\'' || c == '-') && i > 0 && word_char(text[i - 1]) && i + 1 < text.size() &&
                   word_char(text[i + 1])) {
            spaced += c;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            spaced += ' ';
        } else {
            spaced += " | ";
        }
    }
    std::vector<std::vector<std::string>> phrases(1);
    std::istringstream in(spaced);
    std::string tok;
    while (in >> tok) {
        if (tok == "|" || stop.count(tok) || numeric(tok)) {
            if (!phrases.back().empty()) phrases.emplace_back();
        } else {
            phrases.back().push_back(tok);
        }
    }
    if (phrases.back().empty()) phrases.pop_back();

    std::map<std::string, double> freq, deg;
    for (const auto& p : phrases)
        for (const auto& w : p) {
            freq[w] += 1;
            deg[w] += static_cast<double>(p.size());
        }
    std::map<std::string, double> scored;
    for (const auto& p : phrases) {
        if (p.size() < min_len || p.size() > max_len) continue;
        std::string key;
        double s = 0;
        for (const auto& w : p) {
            key += (key.empty() ? "" : " ") + w;
            s += deg[w] / freq[w];
        }
        scored[key] = s;
    }
    std::vector<std::pair<std::string, double>> out(scored.begin(), scored.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

Flags label_flags(const double (&s)[5], double tau) {
    Flags f;
    f.tb = (s[0] + s[1]) / 2 > tau;
    f.pb = (s[2] + s[3]) / 2 > tau;
    f.ac = s[4] > tau;
    f.lethal = f.tb && f.pb && f.ac;
    return f;
}

double sage_two_term_objective(double x, std::uint64_t fg_a, std::uint64_t fg_b, std::uint64_t bg_a,
                               std::uint64_t bg_b, double smoothing, double lambda) {
    const double za = static_cast<double>(bg_a) + smoothing;
    const double zb = static_cast<double>(bg_b) + smoothing;
    const double ma = std::log(za / (za + zb));
    const double mb = std::log(zb / (za + zb));
    const double ca = static_cast<double>(fg_a);
    const double cb = static_cast<double>(fg_b);
    const double a = ma + x;
    const double b = mb - x;
    const double hi = std::max(a, b);
    const double lse = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
    return ca * x - cb * x - (ca + cb) * lse - lambda * x * x;
}

double sage_two_term_argmax(std::uint64_t fg_a, std::uint64_t fg_b, std::uint64_t bg_a, std::uint64_t bg_b,
                            double smoothing, double lambda) {
    double best = 0.0;
    double best_value = sage_two_term_objective(0.0, fg_a, fg_b, bg_a, bg_b, smoothing, lambda);
    double lo = -30.0, hi = 30.0, step = 1e-2;
    for (int round = 0; round < 5; ++round) {
        for (double x = lo; x <= hi; x += step) {
            const double v = sage_two_term_objective(x, fg_a, fg_b, bg_a, bg_b, smoothing, lambda);
            if (v > best_value) {
                best_value = v;
                best = x;
            }
        }
        lo = best - 2 * step;
        hi = best + 2 * step;
        step /= 20;
    }
    return best;
}

double kruskal_h(const std::vector<std::vector<double>>& groups) {
    std::vector<double> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    const double n = static_cast<double>(all.size());
    auto rank = [&](double v) {
        double less = 0, equal = 0;
        for (double w : all) {
            if (w < v) ++less;
            if (w == v) ++equal;
        }
        return less + (equal + 1) / 2;
    };
    double sum = 0;
    for (const auto& g : groups) {
        double r = 0;
        for (double v : g) r += rank(v);
        sum += r * r / static_cast<double>(g.size());
    }
    const double h = 12.0 / (n * (n + 1)) * sum - 3 * (n + 1);
    std::map<double, double> ties;
    for (double v : all) ties[v] += 1;
    double t = 0;
    for (const auto& [v, c] : ties) t += c * c * c - c;
    return h / (1 - t / (n * n * n - n));
}

double paired_t(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mean = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += (y[i] - x[i]) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += (y[i] - x[i] - mean) * (y[i] - x[i] - mean);
    return mean / std::sqrt(ss / (n - 1) / n);
}

double coleman_liau(double letters, double words, double sentences) {
    return 0.0588 * (letters / words * 100) - 0.296 * (sentences / words * 100) - 15.8;
}

std::string random_rake_text(ipts::Rng& rng, const std::vector<std::string>& stopwords) {
    static const std::vector<std::string> content = {
        "keyword", "Extraction", "quality", "deep", "learning", "graph", "self-blame", "don't", "model",
        "Signal", "noise", "corpus", "rapid", "automatic", "phrase", "well-known", "degree", "frequency"};
    static const std::vector<std::string> punct = {",", ".", ";", "!", "?", "(", ")", ":"};
    std::string out;
    const auto n = 5 + rng.uniform_index(30);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pick = rng.uniform_index(10);
        std::string tok;
        if (pick < 5) {
            tok = content[rng.uniform_index(content.size())];
        } else if (pick < 8) {
            tok = stopwords[rng.uniform_index(stopwords.size())];
        } else if (pick < 9) {
            tok = std::to_string(rng.uniform_index(100));
        } else {
            tok = punct[rng.uniform_index(punct.size())];
        }
        if (!out.empty() && rng.uniform_index(4) != 0) out += ' ';
        out += tok;
    }
    return out;
}

std::string random_prose(ipts::Rng& rng, std::size_t min_sentences, std::size_t max_sentences) {
    static const char* ends[] = {".", "?", "!", "..."};
    std::string out;
    const auto sentences = min_sentences + rng.uniform_index(max_sentences - min_sentences + 1);
    for (std::size_t s = 0; s < sentences; ++s) {
        const auto words = 1 + rng.uniform_index(12);
        for (std::size_t w = 0; w < words; ++w) {
            if (!out.empty()) out += ' ';
            const auto len = 1 + rng.uniform_index(9);
            for (std::size_t c = 0; c < len; ++c) {
                const char ch = static_cast<char>('a' + rng.uniform_index(26));
                out += rng.uniform_index(8) == 0 ? static_cast<char>(std::toupper(ch)) : ch;
            }
        }
        out += ends[rng.uniform_index(4)];
    }
    return out;
}

std::vector<double> random_vector(ipts::Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform() * 2 - 1;
    return v;
}

}  // namespace oracle
