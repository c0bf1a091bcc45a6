#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ipts {

/// The five codebooked labels. Thwarted belongingness and perceived
/// burdensomeness are derived from dimension pairs, never codebooked.
enum class Label { Loneliness, LackOfReciprocalLove, SelfHate, Liability, AcquiredCapability };

inline constexpr std::array<Label, 5> kAllLabels = {Label::Loneliness, Label::LackOfReciprocalLove, Label::SelfHate,
                                                    Label::Liability, Label::AcquiredCapability};

inline constexpr std::size_t label_index(Label label) { return static_cast<std::size_t>(label); }

/// Identifier form, e.g. "LackOfReciprocalLove".
std::string_view label_name(Label label);
/// Human form, e.g. "Lack of Reciprocal Love".
std::string_view label_display_name(Label label);
/// Accepts the identifier form, the human form and snake_case, any case.
std::optional<Label> parse_label(std::string_view name);

/// Iteration 0 marks a seed phrase.
struct PhraseOrigin {
    int iteration = 0;

    bool is_seed() const { return iteration == 0; }
    friend bool operator==(const PhraseOrigin&, const PhraseOrigin&) = default;
};

struct Phrase {
    std::string text;
    PhraseOrigin origin;
};

/// Lowercase, single-spaced, boundary punctuation stripped; interior
/// hyphens and apostrophes kept.
std::string normalize_phrase(std::string_view phrase);

/// Phrases for one label, in insertion order, normalized and unique.
class Codebook {
public:
    Codebook() = default;
    explicit Codebook(Label label) : label_(label) {}

    Label label() const { return label_; }
    const std::vector<Phrase>& phrases() const { return phrases_; }
    std::size_t size() const { return phrases_.size(); }
    bool empty() const { return phrases_.empty(); }

    /// Normalizes and inserts; returns false when the phrase is already present
    /// or normalizes to nothing.
    bool add(std::string_view text, PhraseOrigin origin);
    bool contains(std::string_view text) const;
    int max_iteration() const;

private:
    Label label_ = Label::Loneliness;
    std::vector<Phrase> phrases_;
};

using CodebookSet = std::map<Label, Codebook>;

/// The seed keyword codebooks, origin = seed.
CodebookSet seed_codebooks();

nlohmann::json codebook_to_json(const Codebook& codebook);
Codebook codebook_from_json(const nlohmann::json& value);

/// A JSON array of codebook objects (a single object is also accepted).
CodebookSet load_codebooks(const std::filesystem::path& path);
CodebookSet parse_codebooks(std::string_view json_text);
void write_codebooks(std::ostream& out, const CodebookSet& codebooks);

/// True when every phrase of `base` is present in `grown` for the same label.
bool is_superset(const CodebookSet& grown, const CodebookSet& base);

}  // namespace ipts
