#include "ipts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "http_json.hpp"
#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "metrics";

using json = nlohmann::json;

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

std::size_t require_words(std::string_view t, const char* what) {
    const auto n = text::split_whitespace(t).size();
    if (n == 0) throw Error(kModule, fmt::format("{} needs at least one word", what));
    return n;
}

void check_unit(const std::optional<double>& v, const std::string& id, const char* field) {
    if (v && !(*v >= 0.0 && *v <= 1.0))
        throw Error(kModule, fmt::format("{} score {} outside [0,1]", field, *v), id);
}

std::optional<double> optional_number(const json& j, const char* field, const std::string& id) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw Error(kModule, fmt::format("{} must be a number", field), id);
    return it->get<double>();
}

}  // namespace

std::string_view condition_name(Condition c) {
    switch (c) {
        case Condition::OC: return "OC";
        case Condition::AI1: return "AI1";
        case Condition::AI2: return "AI2";
        case Condition::AI3: return "AI3";
    }
    return "OC";
}

Condition parse_condition(std::string_view name) {
    auto up = std::string(name);
    std::erase(up, '-');
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto c : kAllConditions)
        if (condition_name(c) == up) return c;
    throw Error(kModule, fmt::format("unknown condition '{}'", name));
}

std::size_t count_sentences(std::string_view t) {
    std::size_t count = 0;
    bool has_token = false;
    auto close = [&] {
        if (has_token) ++count;
        has_token = false;
    };
    std::size_t i = 0;
    while (i < t.size()) {
        const auto cp = text::decode_utf8(t, i);
        if (cp.value == '\n' || cp.value == '\r') {
            close();
            i += cp.length;
            continue;
        }
        if (!text::is_space(cp.value)) has_token = true;
        if (is_terminator(t[i])) {
            std::size_t j = i;
            while (j < t.size() && is_terminator(t[j])) ++j;
            if (j == t.size() || text::is_space(text::decode_utf8(t, j).value)) close();
            i = j;
            continue;
        }
        i += cp.length;
    }
    close();
    return count;
}

Verbosity verbosity(std::string_view t) {
    Verbosity v;
    v.words = text::split_whitespace(t).size();
    if (v.words == 0) return v;
    v.words_per_sentence = static_cast<double>(v.words) / static_cast<double>(std::max<std::size_t>(1, count_sentences(t)));
    return v;
}

double readability_cli(double letters_per_100, double sentences_per_100) {
    return 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;
}

double readability_cli(std::string_view t) {
    const double words = static_cast<double>(require_words(t, "readability"));
    const double letters = static_cast<double>(text::count_letters(t));
    const double sentences = static_cast<double>(std::max<std::size_t>(1, count_sentences(t)));
    return readability_cli(letters / words * 100.0, sentences / words * 100.0);
}

double repeatability(std::string_view t) {
    const auto toks = text::split_whitespace(t);
    if (toks.empty()) throw Error(kModule, "repeatability needs at least one token");
    std::unordered_set<std::string> unique;
    for (auto tok : toks) unique.insert(text::to_lower_ascii(tok));
    return 1.0 - static_cast<double>(unique.size()) / static_cast<double>(toks.size());
}

double complexity(std::string_view t) {
    const double words = static_cast<double>(require_words(t, "complexity"));
    return static_cast<double>(text::count_letters(t)) / words;
}

double semantic_similarity(std::span<const double> post, std::span<const double> response) {
    return cosine(post, response);
}

const std::vector<std::string>& default_function_categories() {
    static const std::vector<std::string> cats{"prep", "conj", "ppron", "ipron", "auxverb", "article"};
    return cats;
}

double style_accommodation(const LexiconProfile& post, const LexiconProfile& response,
                           std::span<const std::string> categories) {
    if (categories.empty()) throw Error(kModule, "style accommodation needs at least one category");
    std::vector<double> a, b;
    for (const auto& c : categories) {
        a.push_back(post.rate(c));
        b.push_back(response.rate(c));
    }
    auto zero = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); };
    if (zero(a)) throw Error(kModule, "post has no function-word usage", post.document_id);
    if (zero(b)) throw Error(kModule, "response has no function-word usage", response.document_id);
    return cosine(a, b);
}

double diversity(std::span<const double> response, std::span<const double> centroid) {
    if (response.size() == centroid.size() && std::equal(response.begin(), response.end(), centroid.begin())) {
        cosine(response, centroid);
        return 0.0;
    }
    return std::clamp(1.0 - cosine(response, centroid), 0.0, 2.0);
}

FileScoreProvider::FileScoreProvider(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open score file", path.string());
    *this = FileScoreProvider(in);
}

FileScoreProvider::FileScoreProvider(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(kModule, fmt::format("malformed score record: {}", e.what()), fmt::format("line {}", line_no));
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
            throw Error(kModule, "score record needs a string id", fmt::format("line {}", line_no));
        const auto id = j["id"].get<std::string>();
        ExternalScore s{optional_number(j, "formality", id), optional_number(j, "empathy", id)};
        check_unit(s.formality, id, "formality");
        check_unit(s.empathy, id, "empathy");
        if (!scores_.emplace(id, s).second) throw Error(kModule, "duplicate score id", id);
    }
}

std::vector<ExternalScore> FileScoreProvider::score(std::span<const TextItem> items) {
    std::vector<ExternalScore> out;
    std::vector<std::string> missing;
    for (const auto& item : items) {
        auto it = scores_.find(item.key);
        if (it == scores_.end()) {
            missing.push_back(item.key);
            continue;
        }
        out.push_back(it->second);
    }
    if (!missing.empty())
        throw Error(kModule, fmt::format("{} ids missing from score file", missing.size()), fmt::format("{}", fmt::join(missing, ", ")));
    return out;
}

HttpScoreProvider::HttpScoreProvider(std::string url, std::size_t batch_size, int timeout_seconds)
    : url_(detail::trim_url(std::move(url))), batch_size_(std::max<std::size_t>(1, batch_size)),
      timeout_seconds_(timeout_seconds) {
    if (url_.empty()) throw Error(kModule, "score provider needs a URL");
}

std::vector<ExternalScore> HttpScoreProvider::score(std::span<const TextItem> items) {
    std::vector<ExternalScore> out;
    out.reserve(items.size());
    for (std::size_t start = 0; start < items.size(); start += batch_size_) {
        const auto batch = items.subspan(start, std::min(batch_size_, items.size() - start));
        json body;
        body["texts"] = json::array();
        for (const auto& item : batch) body["texts"].push_back(item.text);
        const auto reply = detail::post_json(kModule, url_, "/score", body, timeout_seconds_);
        const auto it = reply.find("scores");
        if (it == reply.end() || !it->is_array() || it->size() != batch.size())
            throw Error(kModule, fmt::format("score server must return {} scores", batch.size()), url_);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto& s = (*it)[i];
            if (!s.is_object()) throw Error(kModule, "score entry is not an object", batch[i].key);
            out.push_back({optional_number(s, "formality", batch[i].key), optional_number(s, "empathy", batch[i].key)});
        }
    }
    return out;
}

std::map<std::string, ExternalScore> external_scores(std::span<const TextItem> items, ScoreProvider& provider) {
    const auto scores = provider.score(items);
    if (scores.size() != items.size())
        throw Error(kModule, fmt::format("score provider returned {} scores for {} texts", scores.size(), items.size()));
    std::map<std::string, ExternalScore> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        check_unit(scores[i].formality, items[i].key, "formality");
        check_unit(scores[i].empathy, items[i].key, "empathy");
        out[items[i].key] = scores[i];
    }
    return out;
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{
        "verbosity_response", "verbosity_sentence", "readability", "repeatability",       "complexity", "cdi",
        "formality",          "empathy",            "semantic_similarity", "style_accommodation", "diversity"};
    return names;
}

std::optional<double> metric_value(const MetricRow& r, std::string_view name) {
    if (name == "verbosity_response") return r.verbosity_response;
    if (name == "verbosity_sentence") return r.verbosity_sentence;
    if (name == "readability") return r.readability;
    if (name == "repeatability") return r.repeatability;
    if (name == "complexity") return r.complexity;
    if (name == "cdi") return r.cdi;
    if (name == "formality") return r.formality;
    if (name == "empathy") return r.empathy;
    if (name == "semantic_similarity") return r.semantic_similarity;
    if (name == "style_accommodation") return r.style_accommodation;
    if (name == "diversity") return r.diversity;
    throw Error(kModule, fmt::format("unknown metric '{}'", name));
}

MetricBatch compute_metrics(std::span<const MetricInput> inputs, const EmbeddingStore& store,
                            const MetricConfig& config, ScoreProvider* scores) {
    const CategoryLexicon& lexicon = config.lexicon ? *config.lexicon : demo_lexicon();
    for (const auto& c : config.function_categories)
        if (!lexicon.has_category(c)) throw Error(kModule, fmt::format("lexicon lacks function category '{}'", c));

    auto vector_of = [&](const std::string& key, const char* what) {
        if (!store.contains(key)) throw Error(kModule, fmt::format("no embedding for {}", what), key);
        return store.at(key);
    };

    std::map<Condition, std::vector<std::span<const double>>> by_condition;
    for (const auto& in : inputs) by_condition[in.condition].push_back(vector_of(in.response_id, "response"));
    std::map<Condition, Vector> centroids;
    for (const auto& [cond, vecs] : by_condition) centroids[cond] = centroid(std::span<const std::span<const double>>(vecs));

    std::map<std::string, ExternalScore> external;
    if (scores) {
        std::vector<TextItem> items;
        for (const auto& in : inputs) items.push_back({in.response_id, in.response_text});
        external = external_scores(items, *scores);
    }

    MetricBatch batch;
    for (const auto& in : inputs) {
        if (text::split_whitespace(in.response_text).empty())
            throw Error(kModule, "response text is empty", in.response_id);
        MetricRow row;
        row.response_id = in.response_id;
        row.post_id = in.post_id;
        row.condition = in.condition;
        const auto v = verbosity(in.response_text);
        row.verbosity_response = static_cast<double>(v.words);
        row.verbosity_sentence = v.words_per_sentence;
        row.readability = readability_cli(in.response_text);
        row.repeatability = repeatability(in.response_text);
        row.complexity = complexity(in.response_text);
        const auto resp_profile = profile(in.response_text, lexicon, in.response_id);
        const auto post_profile = profile(in.post_text, lexicon, in.post_id);
        row.cdi = cdi(resp_profile, config.cdi_weights, config.cdi_intercept);
        if (scores) {
            row.formality = external.at(in.response_id).formality;
            row.empathy = external.at(in.response_id).empathy;
        }
        row.semantic_similarity = semantic_similarity(vector_of(in.post_id, "post"), vector_of(in.response_id, "response"));
        try {
            row.style_accommodation = style_accommodation(post_profile, resp_profile, config.function_categories);
        } catch (const Error& e) {
            row.style_accommodation = 0.0;
            batch.warnings.push_back(fmt::format("{} ({}): {}; style_accommodation set to 0", in.response_id,
                                                 condition_name(in.condition), e.what()));
        }
        row.diversity = diversity(vector_of(in.response_id, "response"), centroids.at(in.condition));
        batch.rows.push_back(std::move(row));
    }
    return batch;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows) {
    out << "response_id,post_id,condition";
    for (const auto& n : metric_names()) out << ',' << n;
    out << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? io::format_real(*v) : std::string(); };
    for (const auto& r : rows) {
        out << io::csv_field(r.response_id) << ',' << io::csv_field(r.post_id) << ',' << condition_name(r.condition) << ','
            << io::format_real(r.verbosity_response) << ',' << io::format_real(r.verbosity_sentence) << ','
            << io::format_real(r.readability) << ',' << io::format_real(r.repeatability) << ','
            << io::format_real(r.complexity) << ',' << io::format_real(r.cdi) << ',' << opt(r.formality) << ','
            << opt(r.empathy) << ',' << io::format_real(r.semantic_similarity) << ','
            << io::format_real(r.style_accommodation) << ',' << io::format_real(r.diversity) << '\n';
    }
}

}  // namespace ipts
