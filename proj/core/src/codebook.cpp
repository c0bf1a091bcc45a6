#include "ipts/codebook.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

using json = nlohmann::json;
constexpr const char* kModule = "codebook";

bool is_word_char(char32_t cp) { return text::is_letter(cp) || (cp >= '0' && cp <= '9'); }

std::string squash(std::string_view s) {
    std::string out;
    for (const char c : s) {
        if (c == '_' || c == '-' || c == ' ') continue;
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c | 0x20) : c);
    }
    return out;
}

// Seed keywords per label.
const std::map<Label, std::vector<std::string_view>>& seed_table() {
    static const std::map<Label, std::vector<std::string_view>> table = {
        {Label::Loneliness,
         {"disconnected", "loneliness", "pulling together", "no care", "seasonal variation",
          "reductions in social interactions", "marriage", "no children and friend", "living alone",
          "no social supports"}},
        {Label::LackOfReciprocalLove,
         {"lack love", "no love", "social withdrawal", "low openness", "single jail cell", "domestic violence",
          "childhood abuse", "familial discord"}},
        {Label::SelfHate,
         {"I hate myself", "I am useless", "low self-esteem", "self-blame", "shame", "mental state of agitation"}},
        {Label::Liability,
         {"my death is worth more than my life", "distress from homelessness", "distress from incarceration",
          "distress from unemployment", "distress from physical illness", "expendability unwanted",
          "belief of burden on family"}},
        {Label::AcquiredCapability,
         {"increased physical pain tolerance", "reduced fear of death", "habituation", "physical pain",
          "acquired capability", "lowered fear of death", "past serious ideation",
          "non-zero degree of fearlessness", "courage and the ability to commit suicide",
          "elevated physical pain tolerance", "recent suicidal behavior", "serious levels of SI",
          "cutting one's wrists", "pulling the trigger on a gun", "jumping off a building", "overdose"}},
    };
    return table;
}

}  // namespace

std::string_view label_name(Label label) {
    switch (label) {
        case Label::Loneliness: return "Loneliness";
        case Label::LackOfReciprocalLove: return "LackOfReciprocalLove";
        case Label::SelfHate: return "SelfHate";
        case Label::Liability: return "Liability";
        case Label::AcquiredCapability: return "AcquiredCapability";
    }
    return "";
}

std::string_view label_display_name(Label label) {
    switch (label) {
        case Label::Loneliness: return "Loneliness";
        case Label::LackOfReciprocalLove: return "Lack of Reciprocal Love";
        case Label::SelfHate: return "Self-Hate";
        case Label::Liability: return "Liability";
        case Label::AcquiredCapability: return "Acquired Capability";
    }
    return "";
}

std::optional<Label> parse_label(std::string_view name) {
    const auto key = squash(name);
    for (const auto label : kAllLabels) {
        if (key == squash(label_name(label)) || key == squash(label_display_name(label))) return label;
    }
    return std::nullopt;
}

std::string normalize_phrase(std::string_view phrase) {
    const auto collapsed = text::normalize_whitespace_lower(phrase);
    std::size_t begin = 0;
    std::size_t end = collapsed.size();
    // Trim non-word code points from both ends.
    while (begin < end) {
        const auto cp = text::decode_utf8(collapsed, begin);
        if (is_word_char(cp.value)) break;
        begin += cp.length;
    }
    while (end > begin) {
        std::size_t start = end - 1;
        while (start > begin && (static_cast<unsigned char>(collapsed[start]) & 0xC0) == 0x80) --start;
        const auto cp = text::decode_utf8(collapsed, start);
        if (is_word_char(cp.value)) break;
        end = start;
    }
    return text::normalize_whitespace_lower(std::string_view(collapsed).substr(begin, end - begin));
}

bool Codebook::add(std::string_view text, PhraseOrigin origin) {
    auto normalized = normalize_phrase(text);
    if (normalized.empty() || contains(normalized)) return false;
    phrases_.push_back({std::move(normalized), origin});
    return true;
}

bool Codebook::contains(std::string_view text) const {
    const auto normalized = normalize_phrase(text);
    return std::any_of(phrases_.begin(), phrases_.end(), [&](const Phrase& p) { return p.text == normalized; });
}

int Codebook::max_iteration() const {
    int best = 0;
    for (const auto& p : phrases_) best = std::max(best, p.origin.iteration);
    return best;
}

CodebookSet seed_codebooks() {
    CodebookSet out;
    for (const auto& [label, phrases] : seed_table()) {
        Codebook book(label);
        for (const auto phrase : phrases) book.add(phrase, PhraseOrigin{0});
        out.emplace(label, std::move(book));
    }
    return out;
}

nlohmann::json codebook_to_json(const Codebook& codebook) {
    json out;
    out["label"] = std::string(label_name(codebook.label()));
    out["phrases"] = json::array();
    for (const auto& p : codebook.phrases()) {
        json entry;
        entry["text"] = p.text;
        if (p.origin.is_seed()) {
            entry["origin"] = "seed";
        } else {
            entry["origin"] = json{{"iteration", p.origin.iteration}};
        }
        out["phrases"].push_back(std::move(entry));
    }
    return out;
}

Codebook codebook_from_json(const nlohmann::json& value) {
    if (!value.is_object()) throw Error(kModule, "codebook must be a JSON object");
    const auto label_it = value.find("label");
    if (label_it == value.end() || !label_it->is_string()) throw Error(kModule, "codebook needs a string 'label'");
    const auto label = parse_label(label_it->get<std::string>());
    if (!label) throw Error(kModule, "unknown codebook label", label_it->get<std::string>());
    Codebook book(*label);
    const auto phrases_it = value.find("phrases");
    if (phrases_it == value.end() || !phrases_it->is_array()) {
        throw Error(kModule, "codebook needs a 'phrases' array", std::string(label_name(*label)));
    }
    for (const auto& entry : *phrases_it) {
        const auto text_it = entry.find("text");
        if (text_it == entry.end() || !text_it->is_string()) {
            throw Error(kModule, "phrase needs a string 'text'", std::string(label_name(*label)));
        }
        PhraseOrigin origin;
        const auto origin_it = entry.find("origin");
        if (origin_it == entry.end() || (origin_it->is_string() && origin_it->get<std::string>() == "seed")) {
            origin.iteration = 0;
        } else if (origin_it->is_object() && origin_it->contains("iteration") &&
                   (*origin_it)["iteration"].is_number_integer() && (*origin_it)["iteration"].get<int>() >= 1) {
            origin.iteration = (*origin_it)["iteration"].get<int>();
        } else {
            throw Error(kModule, "phrase origin must be \"seed\" or {\"iteration\": n} with n >= 1",
                        text_it->get<std::string>());
        }
        book.add(text_it->get<std::string>(), origin);
    }
    return book;
}

CodebookSet parse_codebooks(std::string_view json_text) {
    json value;
    try {
        value = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(kModule, fmt::format("malformed codebook JSON: {}", e.what()));
    }
    CodebookSet out;
    const auto add = [&](const json& item) {
        auto book = codebook_from_json(item);
        const auto label = book.label();
        if (!out.emplace(label, std::move(book)).second) {
            throw Error(kModule, "label appears twice in codebook file", std::string(label_name(label)));
        }
    };
    if (value.is_array()) {
        for (const auto& item : value) add(item);
    } else {
        add(value);
    }
    return out;
}

CodebookSet load_codebooks(const std::filesystem::path& path) { return parse_codebooks(io::read_file(path)); }

void write_codebooks(std::ostream& out, const CodebookSet& codebooks) {
    json array = json::array();
    for (const auto& [label, book] : codebooks) array.push_back(codebook_to_json(book));
    // nlohmann::json sorts object keys, so "label" precedes "phrases" and
    // "origin" precedes "text" deterministically.
    out << array.dump(2) << '\n';
}

bool is_superset(const CodebookSet& grown, const CodebookSet& base) {
    for (const auto& [label, book] : base) {
        const auto it = grown.find(label);
        if (it == grown.end()) return false;
        for (const auto& p : book.phrases()) {
            if (!it->second.contains(p.text)) return false;
        }
    }
    return true;
}

}  // namespace ipts
