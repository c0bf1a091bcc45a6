#include "ipts/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "demo_lexicon_data.hpp"
#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "lexicon";

bool is_lower_pattern(std::string_view p) {
    return std::none_of(p.begin(), p.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

CategoryLexicon::CategoryLexicon(std::map<std::string, std::set<std::string>> categories)
    : categories_(std::move(categories)) {
    for (const auto& [name, patterns] : categories_) {
        if (patterns.empty()) throw Error(kModule, "category has no patterns", name);
        const std::size_t idx = names_.size();
        names_.push_back(name);
        for (const auto& p : patterns) {
            if (p.empty() || p == "*") throw Error(kModule, "empty pattern", name);
            if (!is_lower_pattern(p)) throw Error(kModule, "pattern must be lowercase", p);
            const auto star = p.find('*');
            if (star != std::string::npos && star != p.size() - 1)
                throw Error(kModule, "'*' is only allowed at the end of a pattern", p);
            if (star == std::string::npos) {
                exact_[p].push_back(idx);
            } else {
                auto stem = p.substr(0, p.size() - 1);
                max_prefix_ = std::max(max_prefix_, stem.size());
                prefixes_[stem].push_back(idx);
            }
        }
    }
}

std::vector<std::string> CategoryLexicon::category_names() const { return names_; }

bool CategoryLexicon::has_category(std::string_view name) const {
    return categories_.find(std::string(name)) != categories_.end();
}

std::vector<std::size_t> CategoryLexicon::match(std::string_view token) const {
    std::vector<std::size_t> hits;
    if (auto it = exact_.find(token); it != exact_.end()) hits = it->second;
    const std::size_t limit = std::min(max_prefix_, token.size());
    for (std::size_t len = 1; len <= limit; ++len) {
        if (auto it = prefixes_.find(token.substr(0, len)); it != prefixes_.end())
            hits.insert(hits.end(), it->second.begin(), it->second.end());
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return hits;
}

CategoryLexicon parse_lexicon(std::istream& in, const std::string& origin) {
    std::map<std::string, std::string> id_to_name;
    std::map<std::string, std::set<std::string>> categories;
    std::string line;
    std::size_t line_no = 0;
    int markers = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        const auto where = fmt::format("{}:{}", origin, line_no);
        if (trimmed == "%") {
            ++markers;
            if (markers > 2) throw Error(kModule, "unexpected third '%' marker", where);
            continue;
        }
        if (markers == 0) throw Error(kModule, "expected '%' header block", where);
        std::istringstream fields(trimmed);
        std::string first;
        fields >> first;
        if (markers == 1) {
            std::string name;
            if (!(fields >> name)) throw Error(kModule, "header line needs an id and a name", where);
            if (id_to_name.count(first)) throw Error(kModule, fmt::format("duplicate category id {}", first), where);
            id_to_name[first] = name;
            categories[name];
            continue;
        }
        const auto pattern = text::to_lower_ascii(first);
        const auto star = pattern.find('*');
        if (star != std::string::npos && star != pattern.size() - 1)
            throw Error(kModule, fmt::format("interior '*' in pattern '{}'", first), where);
        std::string id;
        bool any = false;
        while (fields >> id) {
            auto it = id_to_name.find(id);
            if (it == id_to_name.end()) throw Error(kModule, fmt::format("unknown category id {}", id), where);
            categories[it->second].insert(pattern);
            any = true;
        }
        if (!any) throw Error(kModule, fmt::format("word '{}' has no category ids", first), where);
    }
    if (markers < 2) throw Error(kModule, "unterminated '%' header block", origin);
    for (const auto& [name, patterns] : categories)
        if (patterns.empty()) throw Error(kModule, fmt::format("category '{}' has no words", name), origin);
    return CategoryLexicon(std::move(categories));
}

CategoryLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open lexicon", path.string());
    return parse_lexicon(in, path.string());
}

const CategoryLexicon& demo_lexicon() {
    static const CategoryLexicon lexicon = [] {
        std::istringstream in{std::string(detail::kDemoLexiconData)};
        return parse_lexicon(in, "demo_lexicon.dic");
    }();
    return lexicon;
}

double LexiconProfile::rate(std::string_view category) const {
    auto it = rates.find(std::string(category));
    if (it == rates.end()) throw Error(kModule, "category missing from profile", std::string(category));
    return it->second;
}

LexiconProfile profile(std::string_view input, const CategoryLexicon& lexicon, std::string document_id) {
    LexiconProfile out;
    out.document_id = std::move(document_id);
    const auto names = lexicon.category_names();
    std::vector<std::size_t> counts(names.size(), 0);
    const auto tokens = text::word_tokens(input);
    for (const auto& tok : tokens)
        for (auto idx : lexicon.match(tok)) ++counts[idx];
    out.token_count = tokens.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        out.rates[names[i]] = tokens.empty() ? 0.0 : static_cast<double>(counts[i]) / static_cast<double>(tokens.size());
    return out;
}

const CdiWeights& default_cdi_weights() {
    static const CdiWeights weights{
        {"article", 1.0}, {"prep", 1.0},    {"ppron", -1.0}, {"ipron", -1.0},
        {"auxverb", -1.0}, {"conj", -1.0}, {"adverb", -1.0}, {"negate", -1.0},
    };
    return weights;
}

double cdi(const LexiconProfile& p, const CdiWeights& weights, double intercept) {
    double total = intercept;
    for (const auto& [category, w] : weights) {
        auto it = p.rates.find(category);
        if (it == p.rates.end())
            throw Error(kModule, fmt::format("CDI category '{}' missing from profile", category), p.document_id);
        total += w * 100.0 * it->second;
    }
    return total;
}

void write_profiles_csv(std::ostream& out, std::span<const LexiconProfile> profiles, const CategoryLexicon& lexicon) {
    const auto names = lexicon.category_names();
    out << "document_id,token_count";
    for (const auto& n : names) out << ',' << io::csv_field(n);
    out << '\n';
    for (const auto& p : profiles) {
        out << io::csv_field(p.document_id) << ',' << p.token_count;
        for (const auto& n : names) out << ',' << io::format_real(p.rate(n));
        out << '\n';
    }
}

}  // namespace ipts
