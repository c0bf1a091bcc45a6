#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ipts/bootstrap.hpp"
#include "ipts/codebook.hpp"
#include "ipts/corpus.hpp"
#include "ipts/embedding.hpp"

namespace ipts {

inline constexpr double kDefaultThreshold = 0.6;

/// Score assigned to a dimension the bootstrap classifier rejected; below any
/// attainable cosine so it never clears a threshold.
inline constexpr double kGatedScore = -1.0;

enum class RiskFactor { ThwartedBelongingness, PerceivedBurdensomeness, AcquiredCapability };

inline constexpr std::array<RiskFactor, 3> kAllRiskFactors = {
    RiskFactor::ThwartedBelongingness, RiskFactor::PerceivedBurdensomeness, RiskFactor::AcquiredCapability};

std::string_view risk_factor_name(RiskFactor factor);
std::string_view risk_factor_display_name(RiskFactor factor);

using DimensionScores = std::array<double, 5>;  // indexed by label_index

struct LabelAssignment {
    std::string document_id;
    DimensionScores dim_scores{};
    std::array<bool, 5> dims_present{};
    std::array<bool, 3> risk_factors{};
    bool lethal = false;

    bool has(Label label) const { return dims_present[label_index(label)]; }
    bool has(RiskFactor factor) const { return risk_factors[static_cast<std::size_t>(factor)]; }
    double score(Label label) const { return dim_scores[label_index(label)]; }
};

/// Applies the thresholding rules to a score tuple, all comparisons strict:
///   dimension present      score > tau
///   thwarted belonging     mean(Loneliness, LackOfReciprocalLove) > tau
///   perceived burden       mean(SelfHate, Liability) > tau
///   acquired capability    score(AcquiredCapability) > tau
///   lethal                 all three risk factors
LabelAssignment assign_from_scores(std::string document_id, const DimensionScores& scores, double tau);

/// Max cosine between the post vector and the label's phrase vectors.
/// Phrase vectors are looked up by phrase_key(). Throws on an empty codebook.
double dim_score(std::span<const double> post_vector, const Codebook& codebook, const EmbeddingStore& store);

/// Scores every label present in `codebooks` (a missing label scores the gated
/// value). When `bootstrap` is given, a dimension it rejects scores -1.
LabelAssignment assign(const Document& post, const CodebookSet& codebooks, const EmbeddingStore& store,
                       double tau = kDefaultThreshold, const BootstrapClassifier* bootstrap = nullptr);

struct DistributionTable {
    std::size_t posts = 0;
    std::array<std::size_t, 5> dimensions{};
    std::array<std::size_t, 3> risk_factors{};
    std::size_t lethal = 0;

    void add(const LabelAssignment& assignment);
};

struct LabelingResult {
    std::vector<LabelAssignment> assignments;  // corpus post order
    DistributionTable table;
};

/// Labels every post of the corpus. Errors carry the document id.
LabelingResult label_corpus(const Corpus& corpus, const CodebookSet& codebooks, const EmbeddingStore& store,
                            double tau = kDefaultThreshold, const BootstrapClassifier* bootstrap = nullptr);

/// 100 x cosine(centroid(a), centroid(b)), clipped to [0, 100].
double equivalence_score(std::span<const std::span<const double>> a, std::span<const std::span<const double>> b);
/// Same over the documents of two corpora, vectors looked up by document id.
double equivalence_score(const Corpus& a, const Corpus& b, const EmbeddingStore& store);

/// Per label: percentage of human-labeled documents whose presence/absence
/// matches the automatic assignment. Throws on an id with no assignment.
std::map<Label, double> agreement(std::span<const LabelAssignment> assignments,
                                  const std::map<std::string, std::set<Label>>& human_labels);

nlohmann::ordered_json assignment_to_json(const LabelAssignment& assignment);
LabelAssignment assignment_from_json(const nlohmann::json& value, double tau);

/// One JSON object per line: {"id", "dim_scores", "risk_factors", "lethal"}.
void write_assignments(std::ostream& out, std::span<const LabelAssignment> assignments);
/// Reads assignments back; presence flags are recomputed with `tau`.
std::vector<LabelAssignment> load_assignments(const std::filesystem::path& path, double tau = kDefaultThreshold);

/// Rows in risk-factor / dimension order: ipts_type,posts,share.
void write_distribution_csv(std::ostream& out, const DistributionTable& table);

}  // namespace ipts
