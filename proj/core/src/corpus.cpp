#include "ipts/corpus.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ipts/error.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

using json = nlohmann::json;

constexpr const char* kModule = "corpus";

const json& require(const json& record, const char* field, std::size_t line) {
    const auto it = record.find(field);
    if (it == record.end()) {
        throw Error(kModule, fmt::format("missing required field '{}'", field), fmt::format("line {}", line));
    }
    return *it;
}

std::string require_string(const json& record, const char* field, std::size_t line) {
    const auto& value = require(record, field, line);
    if (!value.is_string()) {
        throw Error(kModule, fmt::format("field '{}' must be a string", field), fmt::format("line {}", line));
    }
    return value.get<std::string>();
}

std::int64_t require_integer(const json& record, const char* field, std::size_t line) {
    const auto& value = require(record, field, line);
    if (!value.is_number_integer()) {
        throw Error(kModule, fmt::format("field '{}' must be an integer", field), fmt::format("line {}", line));
    }
    return value.get<std::int64_t>();
}

Document parse_document(const json& record, std::size_t line) {
    if (!record.is_object()) throw Error(kModule, "line is not a JSON object", fmt::format("line {}", line));
    Document doc;
    doc.id = require_string(record, "id", line);
    const auto kind = require_string(record, "kind", line);
    if (kind == "post") {
        doc.kind = DocumentKind::Post;
    } else if (kind == "comment") {
        doc.kind = DocumentKind::Comment;
    } else {
        throw Error(kModule, fmt::format("field 'kind' must be \"post\" or \"comment\", got \"{}\"", kind),
                    fmt::format("line {}", line));
    }
    const auto& parent = require(record, "parent_id", line);
    if (parent.is_string()) {
        doc.parent_id = parent.get<std::string>();
    } else if (!parent.is_null()) {
        throw Error(kModule, "field 'parent_id' must be a string or null", fmt::format("line {}", line));
    }
    if (doc.kind == DocumentKind::Comment && !doc.parent_id) {
        throw Error(kModule, "comment requires field 'parent_id'", fmt::format("line {}", line));
    }
    if (doc.kind == DocumentKind::Post && doc.parent_id) {
        throw Error(kModule, "post must have a null 'parent_id'", fmt::format("line {}", line));
    }
    doc.author_id = require_string(record, "author_id", line);
    doc.created_at = require_integer(record, "created_at", line);
    doc.text = require_string(record, "text", line);
    doc.score = require_integer(record, "score", line);
    return doc;
}

bool is_dropped_text(const std::string& text) {
    const auto trimmed = text::trim(text);
    return trimmed.empty() || trimmed == "[deleted]" || trimmed == "[removed]";
}

}  // namespace

std::string_view kind_name(DocumentKind kind) { return kind == DocumentKind::Post ? "post" : "comment"; }

Corpus::Corpus(std::string source_label, std::vector<Document> documents, std::int64_t ingested_at)
    : source_label_(std::move(source_label)), ingested_at_(ingested_at), documents_(std::move(documents)) {
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        if (!index_.emplace(documents_[i].id, i).second) {
            throw Error(kModule, "duplicate document id", documents_[i].id);
        }
    }
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& doc = documents_[i];
        if (doc.is_post()) continue;
        const Document* parent = doc.parent_id ? find(*doc.parent_id) : nullptr;
        if (parent == nullptr || !parent->is_post()) {
            throw Error(kModule, "comment parent does not resolve to a post", doc.id);
        }
        children_[parent->id].push_back(i);
    }
}

const Document* Corpus::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &documents_[it->second];
}

std::vector<const Document*> Corpus::posts() const {
    std::vector<const Document*> out;
    for (const auto& doc : documents_) {
        if (doc.is_post()) out.push_back(&doc);
    }
    return out;
}

std::vector<const Document*> Corpus::comments() const {
    std::vector<const Document*> out;
    for (const auto& doc : documents_) {
        if (!doc.is_post()) out.push_back(&doc);
    }
    return out;
}

std::vector<const Document*> Corpus::responses_to(std::string_view post_id) const {
    std::vector<const Document*> out;
    const auto it = children_.find(std::string(post_id));
    if (it == children_.end()) return out;
    for (const auto i : it->second) out.push_back(&documents_[i]);
    return out;
}

IngestResult ingest(const std::filesystem::path& path, const IngestConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(kModule, "cannot open corpus file", path.string());
    return ingest(in, config);
}

IngestResult ingest(std::istream& in, const IngestConfig& config) {
    IngestReport report;
    std::vector<Document> kept;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        ++report.lines_read;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(kModule, fmt::format("malformed JSON: {}", e.what()), fmt::format("line {}", line_no));
        }
        auto doc = parse_document(record, line_no);
        if (!seen.insert(doc.id).second) {
            ++report.duplicates;
            continue;
        }
        if (is_dropped_text(doc.text)) {
            ++report.removed_or_empty;
            continue;
        }
        kept.push_back(std::move(doc));
    }

    // Resolve each comment to its root post; deeper threads are flattened.
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < kept.size(); ++i) index.emplace(kept[i].id, i);
    // Roots are resolved before anything is moved out of `kept`.
    std::vector<const Document*> roots(kept.size(), nullptr);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const Document* cursor = &kept[i];
        std::size_t hops = 0;
        while (cursor != nullptr && !cursor->is_post() && hops <= kept.size()) {
            const auto it = index.find(*cursor->parent_id);
            cursor = it == index.end() ? nullptr : &kept[it->second];
            ++hops;
        }
        if (cursor != nullptr && cursor->is_post()) roots[i] = cursor;
    }
    std::vector<std::string> root_ids(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (roots[i] != nullptr) root_ids[i] = roots[i]->id;

    std::vector<Document> documents;
    documents.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        auto& doc = kept[i];
        if (doc.is_post()) {
            documents.push_back(std::move(doc));
            continue;
        }
        if (roots[i] == nullptr) {
            ++report.orphans;
            continue;
        }
        if (*doc.parent_id != root_ids[i]) {
            ++report.flattened;
            doc.parent_id = root_ids[i];
        }
        documents.push_back(std::move(doc));
    }

    auto ingested_at = config.ingested_at;
    if (ingested_at == 0) {
        ingested_at = std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
    }
    return {Corpus(config.source_label, std::move(documents), ingested_at), report};
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& doc : corpus.documents()) {
        nlohmann::ordered_json record;
        record["id"] = doc.id;
        record["kind"] = std::string(kind_name(doc.kind));
        record["parent_id"] = doc.parent_id ? nlohmann::ordered_json(*doc.parent_id) : nlohmann::ordered_json(nullptr);
        record["author_id"] = doc.author_id;
        record["created_at"] = doc.created_at;
        record["text"] = doc.text;
        record["score"] = doc.score;
        out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

namespace {

struct Moments {
    double mean = 0.0;
    double stdev = 0.0;
};

Moments population_moments(const std::vector<double>& values) {
    if (values.empty()) return {};
    double sum = 0.0;
    for (const double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

}  // namespace

CorpusStats corpus_stats(const Corpus& corpus) {
    if (corpus.empty()) throw Error(kModule, "stats of an empty corpus");
    CorpusStats s;
    std::unordered_set<std::string> posting;
    std::unordered_set<std::string> commenting;
    std::vector<double> post_words;
    std::vector<double> comment_words;
    for (const auto& doc : corpus.documents()) {
        const auto words = static_cast<double>(text::split_whitespace(doc.text).size());
        if (doc.is_post()) {
            ++s.posts;
            posting.insert(doc.author_id);
            post_words.push_back(words);
        } else {
            ++s.comments;
            commenting.insert(doc.author_id);
            comment_words.push_back(words);
        }
    }
    s.unique_posting_authors = posting.size();
    s.unique_commenting_authors = commenting.size();
    const auto pm = population_moments(post_words);
    const auto cm = population_moments(comment_words);
    s.mean_post_words = pm.mean;
    s.stdev_post_words = pm.stdev;
    s.mean_comment_words = cm.mean;
    s.stdev_comment_words = cm.stdev;
    s.mean_comments_per_post = s.posts == 0 ? 0.0 : static_cast<double>(s.comments) / static_cast<double>(s.posts);
    return s;
}

}  // namespace ipts
