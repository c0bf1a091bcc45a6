#include "ipts/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

using json = nlohmann::json;
constexpr const char* kModule = "labeling";

std::optional<RiskFactor> parse_risk_factor(std::string_view name) {
    for (const auto f : kAllRiskFactors) {
        if (name == risk_factor_name(f)) return f;
    }
    return std::nullopt;
}

}  // namespace

std::string_view risk_factor_name(RiskFactor factor) {
    switch (factor) {
        case RiskFactor::ThwartedBelongingness: return "ThwartedBelongingness";
        case RiskFactor::PerceivedBurdensomeness: return "PerceivedBurdensomeness";
        case RiskFactor::AcquiredCapability: return "AcquiredCapability";
    }
    return "";
}

std::string_view risk_factor_display_name(RiskFactor factor) {
    switch (factor) {
        case RiskFactor::ThwartedBelongingness: return "Thwarted Belongingness";
        case RiskFactor::PerceivedBurdensomeness: return "Perceived Burdensomeness";
        case RiskFactor::AcquiredCapability: return "Acquired Capability";
    }
    return "";
}

LabelAssignment assign_from_scores(std::string document_id, const DimensionScores& scores, double tau) {
    LabelAssignment a;
    a.document_id = std::move(document_id);
    a.dim_scores = scores;
    for (std::size_t i = 0; i < scores.size(); ++i) a.dims_present[i] = scores[i] > tau;
    const auto s = [&](Label l) { return scores[label_index(l)]; };
    const double tb = (s(Label::Loneliness) + s(Label::LackOfReciprocalLove)) / 2.0;
    const double pb = (s(Label::SelfHate) + s(Label::Liability)) / 2.0;
    a.risk_factors[0] = tb > tau;
    a.risk_factors[1] = pb > tau;
    a.risk_factors[2] = s(Label::AcquiredCapability) > tau;
    a.lethal = a.risk_factors[0] && a.risk_factors[1] && a.risk_factors[2];
    return a;
}

double dim_score(std::span<const double> post_vector, const Codebook& codebook, const EmbeddingStore& store) {
    if (codebook.empty()) throw Error(kModule, "empty codebook", std::string(label_name(codebook.label())));
    double best = -1.0;
    for (const auto& phrase : codebook.phrases()) {
        const auto key = phrase_key(phrase.text);
        if (!store.contains(key)) throw Error(kModule, "codebook phrase has no embedding", phrase.text);
        best = std::max(best, cosine(post_vector, store.at(key)));
    }
    return best;
}

LabelAssignment assign(const Document& post, const CodebookSet& codebooks, const EmbeddingStore& store, double tau,
                       const BootstrapClassifier* bootstrap) {
    if (!store.contains(post.id)) throw Error(kModule, "post has no embedding", post.id);
    const auto vector = store.at(post.id);
    DimensionScores scores;
    scores.fill(kGatedScore);
    for (const auto label : kAllLabels) {
        const auto it = codebooks.find(label);
        if (it == codebooks.end()) continue;
        if (bootstrap != nullptr && !bootstrap->passes(label, post.text)) continue;
        scores[label_index(label)] = dim_score(vector, it->second, store);
    }
    return assign_from_scores(post.id, scores, tau);
}

void DistributionTable::add(const LabelAssignment& a) {
    ++posts;
    for (std::size_t i = 0; i < dimensions.size(); ++i) dimensions[i] += a.dims_present[i] ? 1 : 0;
    for (std::size_t i = 0; i < risk_factors.size(); ++i) risk_factors[i] += a.risk_factors[i] ? 1 : 0;
    lethal += a.lethal ? 1 : 0;
}

LabelingResult label_corpus(const Corpus& corpus, const CodebookSet& codebooks, const EmbeddingStore& store, double tau,
                            const BootstrapClassifier* bootstrap) {
    LabelingResult result;
    for (const auto* post : corpus.posts()) {
        try {
            result.assignments.push_back(assign(*post, codebooks, store, tau, bootstrap));
        } catch (const Error& e) {
            throw Error(kModule, e.what(), post->id + (e.context().empty() || e.context() == post->id ? "" : ": " + e.context()));
        }
        result.table.add(result.assignments.back());
    }
    return result;
}

double equivalence_score(std::span<const std::span<const double>> a, std::span<const std::span<const double>> b) {
    if (a.empty() || b.empty()) throw Error(kModule, "equivalence score of an empty corpus");
    const auto ca = centroid(a);
    const auto cb = centroid(b);
    return std::clamp(100.0 * cosine(ca, cb), 0.0, 100.0);
}

double equivalence_score(const Corpus& a, const Corpus& b, const EmbeddingStore& store) {
    const auto vectors = [&](const Corpus& c) {
        std::vector<std::span<const double>> out;
        for (const auto& doc : c.documents()) {
            if (!store.contains(doc.id)) throw Error(kModule, "document has no embedding", doc.id);
            out.push_back(store.at(doc.id));
        }
        return out;
    };
    const auto va = vectors(a);
    const auto vb = vectors(b);
    return equivalence_score(va, vb);
}

std::map<Label, double> agreement(std::span<const LabelAssignment> assignments,
                                  const std::map<std::string, std::set<Label>>& human_labels) {
    std::map<std::string, const LabelAssignment*> by_id;
    for (const auto& a : assignments) by_id[a.document_id] = &a;
    std::map<Label, double> out;
    if (human_labels.empty()) return out;
    std::array<std::size_t, 5> matches{};
    for (const auto& [id, labels] : human_labels) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(kModule, "human label for unknown document", id);
        for (const auto label : kAllLabels) {
            if (it->second->has(label) == (labels.count(label) != 0)) ++matches[label_index(label)];
        }
    }
    for (const auto label : kAllLabels) {
        out[label] = 100.0 * static_cast<double>(matches[label_index(label)]) / static_cast<double>(human_labels.size());
    }
    return out;
}

nlohmann::ordered_json assignment_to_json(const LabelAssignment& a) {
    nlohmann::ordered_json out;
    out["id"] = a.document_id;
    nlohmann::ordered_json scores;
    for (const auto label : kAllLabels) scores[std::string(label_name(label))] = a.score(label);
    out["dim_scores"] = scores;
    out["risk_factors"] = nlohmann::ordered_json::array();
    for (const auto f : kAllRiskFactors) {
        if (a.has(f)) out["risk_factors"].push_back(std::string(risk_factor_name(f)));
    }
    out["lethal"] = a.lethal;
    return out;
}

LabelAssignment assignment_from_json(const json& value, double tau) {
    const auto id = value.at("id").get<std::string>();
    DimensionScores scores;
    scores.fill(kGatedScore);
    for (const auto& [name, score] : value.at("dim_scores").items()) {
        const auto label = parse_label(name);
        if (!label) throw Error(kModule, "unknown label in assignment", id);
        scores[label_index(*label)] = score.get<double>();
    }
    auto a = assign_from_scores(id, scores, tau);
    // Stored risk factors must agree with the recomputed ones.
    if (const auto it = value.find("risk_factors"); it != value.end()) {
        for (const auto& name : *it) {
            const auto f = parse_risk_factor(name.get<std::string>());
            if (!f) throw Error(kModule, "unknown risk factor in assignment", id);
        }
    }
    return a;
}

void write_assignments(std::ostream& out, std::span<const LabelAssignment> assignments) {
    for (const auto& a : assignments) out << assignment_to_json(a).dump() << '\n';
}

std::vector<LabelAssignment> load_assignments(const std::filesystem::path& path, double tau) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open assignments file", path.string());
    std::vector<LabelAssignment> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        try {
            out.push_back(assignment_from_json(json::parse(line), tau));
        } catch (const json::exception& e) {
            throw Error(kModule, fmt::format("malformed assignment: {}", e.what()), fmt::format("line {}", line_no));
        }
    }
    return out;
}

void write_distribution_csv(std::ostream& out, const DistributionTable& t) {
    const auto share = [&](std::size_t n) {
        return io::format_real(t.posts == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(t.posts));
    };
    const auto row = [&](const std::string& name, std::size_t n) {
        out << io::csv_field(name) << ',' << n << ',' << share(n) << '\n';
    };
    const auto dim = [&](Label l) { return t.dimensions[label_index(l)]; };
    out << "ipts_type,posts,share\n";
    row("Risk Factor: Thwarted Belongingness", t.risk_factors[0]);
    row("Dimension: Loneliness", dim(Label::Loneliness));
    row("Dimension: Lack of Reciprocal Love", dim(Label::LackOfReciprocalLove));
    row("Risk Factor: Perceived Burdensomeness", t.risk_factors[1]);
    row("Dimension: Self-Hate", dim(Label::SelfHate));
    row("Dimension: Liability", dim(Label::Liability));
    row("Risk Factor: Acquired Capability", t.risk_factors[2]);
    row("Lethally Suicidal", t.lethal);
    row("All posts", t.posts);
}

}  // namespace ipts
