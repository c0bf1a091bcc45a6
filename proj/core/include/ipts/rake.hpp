#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ipts {

using Stoplist = std::unordered_set<std::string>;

/// The shipped English stoplist (core/data/stoplist_en.txt).
const Stoplist& default_stoplist();

/// One lowercase word per line; blank lines and '#' comments ignored.
Stoplist load_stoplist(const std::filesystem::path& path);

struct RakeConfig {
    Stoplist stoplist = default_stoplist();
    std::size_t min_phrase_len = 1;
    std::size_t max_phrase_len = 6;
    std::size_t top_n_per_iteration = 20;

    /// Throws unless 1 <= min <= max and top_n >= 1.
    void validate() const;
};

struct ScoredPhrase {
    std::string phrase;
    double score = 0.0;
};

/// Splits text into RAKE candidate phrases: maximal runs of words that are
/// neither stopwords nor purely numeric, broken at any punctuation. Words
/// are lowercased; apostrophes and hyphens between word characters stay
/// inside the word.
std::vector<std::vector<std::string>> rake_candidates(std::string_view text, const Stoplist& stoplist);

/// Rapid Automatic Keyword Extraction over one text.
/// word score = degree / frequency, degree(w) = sum of the lengths of the
/// candidate occurrences containing w; phrase score = sum of its word
/// scores. Distinct phrases within [min, max] words, by descending score,
/// ties in lexicographic order.
std::vector<ScoredPhrase> rake_extract(std::string_view text, const RakeConfig& config);

/// Same scoring with word statistics pooled over several texts. Candidates
/// never span two texts.
std::vector<ScoredPhrase> rake_extract(std::span<const std::string_view> texts, const RakeConfig& config);

}  // namespace ipts
