#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipts {

/// Category name -> patterns. A pattern ending in '*' is a prefix.
class CategoryLexicon {
public:
    CategoryLexicon() = default;
    /// Throws on an empty category, a non-lowercase pattern or an interior '*'.
    explicit CategoryLexicon(std::map<std::string, std::set<std::string>> categories);

    const std::map<std::string, std::set<std::string>>& categories() const noexcept { return categories_; }
    std::vector<std::string> category_names() const;
    bool has_category(std::string_view name) const;

    /// Categories whose patterns match `token` (already lowercased).
    std::vector<std::size_t> match(std::string_view token) const;

private:
    std::map<std::string, std::set<std::string>> categories_;
    std::vector<std::string> names_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> exact_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> prefixes_;
    std::size_t max_prefix_ = 0;
};

CategoryLexicon parse_lexicon(std::istream& in, const std::string& origin = "<stream>");
CategoryLexicon load_lexicon(const std::filesystem::path& path);

/// The shipped demo dictionary (core/data/demo_lexicon.dic).
const CategoryLexicon& demo_lexicon();

struct LexiconProfile {
    std::string document_id;
    std::map<std::string, double> rates;
    std::size_t token_count = 0;

    double rate(std::string_view category) const;
};

/// Tokens come from text::word_tokens. rate = matched tokens / token count.
LexiconProfile profile(std::string_view text, const CategoryLexicon& lexicon, std::string document_id = {});

using CdiWeights = std::map<std::string, double>;

/// +1 article, prep; -1 ppron, ipron, auxverb, conj, adverb, negate.
const CdiWeights& default_cdi_weights();

/// intercept + sum of weight(c) * 100 * rate(c).
double cdi(const LexiconProfile& profile, const CdiWeights& weights, double intercept = 0.0);

/// One row per profile, one column per lexicon category.
void write_profiles_csv(std::ostream& out, std::span<const LexiconProfile> profiles, const CategoryLexicon& lexicon);

}  // namespace ipts
