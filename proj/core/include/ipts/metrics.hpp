#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipts/embedding.hpp"
#include "ipts/lexicon.hpp"

namespace ipts {

enum class Condition { OC, AI1, AI2, AI3 };

inline constexpr Condition kAllConditions[] = {Condition::OC, Condition::AI1, Condition::AI2, Condition::AI3};

std::string_view condition_name(Condition c);
Condition parse_condition(std::string_view name);

/// Sentence boundaries: a run of '.', '?' or '!' followed by whitespace or
/// end of text, and any line break. Segments without a whitespace token do
/// not count.
std::size_t count_sentences(std::string_view text);

struct Verbosity {
    std::size_t words = 0;
    double words_per_sentence = 0.0;
};

/// Words are whitespace tokens. Empty text gives (0, 0).
Verbosity verbosity(std::string_view text);

/// 0.0588 L - 0.296 S - 15.8 with L letters and S sentences per 100 words.
double readability_cli(std::string_view text);
double readability_cli(double letters_per_100, double sentences_per_100);

/// 1 - unique / total over lowercased whitespace tokens.
double repeatability(std::string_view text);

/// Letters per whitespace token.
double complexity(std::string_view text);

double semantic_similarity(std::span<const double> post, std::span<const double> response);

/// prep, conj, ppron, ipron, auxverb, article.
const std::vector<std::string>& default_function_categories();

/// Cosine of the two rate vectors restricted to `categories`.
double style_accommodation(const LexiconProfile& post, const LexiconProfile& response,
                           std::span<const std::string> categories);

/// 1 - cosine(response, centroid).
double diversity(std::span<const double> response, std::span<const double> centroid);

struct ExternalScore {
    std::optional<double> formality;
    std::optional<double> empathy;
};

class ScoreProvider {
public:
    virtual ~ScoreProvider() = default;
    /// One score per item, in input order. Values outside [0,1] raise.
    virtual std::vector<ExternalScore> score(std::span<const TextItem> items) = 0;
};

/// JSONL of {"id", "formality"?, "empathy"?}, looked up by item key.
class FileScoreProvider final : public ScoreProvider {
public:
    explicit FileScoreProvider(const std::filesystem::path& path);
    explicit FileScoreProvider(std::istream& in);
    std::vector<ExternalScore> score(std::span<const TextItem> items) override;

private:
    std::map<std::string, ExternalScore> scores_;
};

/// POST /score {"texts": [...]} -> {"scores": [{"formality", "empathy"}]}.
class HttpScoreProvider final : public ScoreProvider {
public:
    explicit HttpScoreProvider(std::string url, std::size_t batch_size = 64, int timeout_seconds = 60);
    std::vector<ExternalScore> score(std::span<const TextItem> items) override;

private:
    std::string url_;
    std::size_t batch_size_;
    int timeout_seconds_;
};

/// Scores keyed by item key.
std::map<std::string, ExternalScore> external_scores(std::span<const TextItem> items, ScoreProvider& provider);

struct MetricRow {
    std::string response_id;
    std::string post_id;
    Condition condition = Condition::OC;
    double verbosity_response = 0.0;
    double verbosity_sentence = 0.0;
    double readability = 0.0;
    double repeatability = 0.0;
    double complexity = 0.0;
    double cdi = 0.0;
    std::optional<double> formality;
    std::optional<double> empathy;
    double semantic_similarity = 0.0;
    double style_accommodation = 0.0;
    double diversity = 0.0;
};

/// Metric names in MetricRow column order, excluding the id columns.
const std::vector<std::string>& metric_names();

/// Named metric value, or nullopt for an absent optional score.
std::optional<double> metric_value(const MetricRow& row, std::string_view name);

struct MetricInput {
    std::string post_id;
    std::string response_id;
    Condition condition = Condition::OC;
    std::string post_text;
    std::string response_text;
};

struct MetricConfig {
    const CategoryLexicon* lexicon = nullptr;
    CdiWeights cdi_weights = default_cdi_weights();
    double cdi_intercept = 0.0;
    std::vector<std::string> function_categories = default_function_categories();
};

struct MetricBatch {
    std::vector<MetricRow> rows;
    std::vector<std::string> warnings;
};

/// Vectors are looked up by post_id and response_id. Diversity uses the
/// centroid of every response vector in the same condition. A response or
/// post with no function words gets style_accommodation 0 and a warning.
MetricBatch compute_metrics(std::span<const MetricInput> inputs, const EmbeddingStore& store,
                            const MetricConfig& config, ScoreProvider* scores = nullptr);

/// Columns in MetricRow field order; absent scores are empty cells.
void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows);

}  // namespace ipts
