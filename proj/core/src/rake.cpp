#include "ipts/rake.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ipts/error.hpp"
#include "ipts/text.hpp"
#include "stoplist_data.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "codebook";

Stoplist parse_stoplist(std::istream& in) {
    Stoplist out;
    std::string line;
    while (std::getline(in, line)) {
        const auto word = text::trim(line);
        if (word.empty() || word.front() == '#') continue;
        out.insert(text::to_lower_ascii(word));
    }
    return out;
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }
bool is_word_char(char32_t cp) { return text::is_letter(cp) || is_digit(cp); }
bool is_joiner(char32_t cp) { return text::is_apostrophe(cp) || cp == '-'; }

bool all_digits(const std::string& w) {
    return std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

const Stoplist& default_stoplist() {
    static const Stoplist list = [] {
        std::istringstream in{std::string(detail::kStoplistData)};
        return parse_stoplist(in);
    }();
    return list;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open stoplist", path.string());
    return parse_stoplist(in);
}

void RakeConfig::validate() const {
    if (min_phrase_len < 1) throw Error(kModule, "min_phrase_len must be >= 1");
    if (min_phrase_len > max_phrase_len) throw Error(kModule, "min_phrase_len must not exceed max_phrase_len");
    if (top_n_per_iteration < 1) throw Error(kModule, "top_n_per_iteration must be >= 1");
}

std::vector<std::vector<std::string>> rake_candidates(std::string_view input, const Stoplist& stoplist) {
    std::vector<std::vector<std::string>> candidates;
    std::vector<std::string> run;
    std::string word;

    const auto close_run = [&] {
        if (!run.empty()) candidates.push_back(std::move(run));
        run.clear();
    };
    const auto close_word = [&] {
        if (word.empty()) return;
        if (stoplist.count(word) != 0 || all_digits(word)) {
            close_run();
        } else {
            run.push_back(word);
        }
        word.clear();
    };

    std::size_t i = 0;
    while (i < input.size()) {
        const auto cp = text::decode_utf8(input, i);
        if (is_word_char(cp.value)) {
            if (cp.value < 0x80) {
                word.push_back(static_cast<char>(cp.value >= 'A' && cp.value <= 'Z' ? cp.value | 0x20 : cp.value));
            } else {
                word.append(input.substr(i, cp.length));
            }
        } else if (is_joiner(cp.value) && !word.empty() && i + cp.length < input.size() &&
                   is_word_char(text::decode_utf8(input, i + cp.length).value)) {
            word.push_back(cp.value == '-' ? '-' : '\'');
        } else if (text::is_space(cp.value)) {
            close_word();
        } else {
            close_word();
            close_run();
        }
        i += cp.length;
    }
    close_word();
    close_run();
    return candidates;
}

std::vector<ScoredPhrase> rake_extract(std::string_view text, const RakeConfig& config) {
    const std::string_view one[] = {text};
    return rake_extract(std::span<const std::string_view>(one), config);
}

std::vector<ScoredPhrase> rake_extract(std::span<const std::string_view> texts, const RakeConfig& config) {
    config.validate();
    std::vector<std::vector<std::string>> candidates;
    for (const auto t : texts) {
        auto c = rake_candidates(t, config.stoplist);
        std::move(c.begin(), c.end(), std::back_inserter(candidates));
    }

    std::unordered_map<std::string, double> degree;
    std::unordered_map<std::string, double> frequency;
    for (const auto& phrase : candidates) {
        const auto len = static_cast<double>(phrase.size());
        for (const auto& w : phrase) {
            degree[w] += len;
            frequency[w] += 1.0;
        }
    }

    std::map<std::string, double> scored;
    for (const auto& phrase : candidates) {
        if (phrase.size() < config.min_phrase_len || phrase.size() > config.max_phrase_len) continue;
        std::string joined;
        double score = 0.0;
        for (const auto& w : phrase) {
            if (!joined.empty()) joined.push_back(' ');
            joined += w;
            score += degree[w] / frequency[w];
        }
        scored.emplace(std::move(joined), score);
    }

    std::vector<ScoredPhrase> out;
    out.reserve(scored.size());
    for (auto& [phrase, score] : scored) out.push_back({phrase, score});
    std::stable_sort(out.begin(), out.end(),
                     [](const ScoredPhrase& a, const ScoredPhrase& b) { return a.score > b.score; });
    return out;
}

}  // namespace ipts
