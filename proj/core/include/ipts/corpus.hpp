#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ipts {

enum class DocumentKind { Post, Comment };

std::string_view kind_name(DocumentKind kind);

/// One post or comment. Comments always point at a root post after ingestion.
struct Document {
    std::string id;
    DocumentKind kind = DocumentKind::Post;
    std::optional<std::string> parent_id;
    std::string author_id;
    std::int64_t created_at = 0;  // UTC seconds
    std::string text;
    std::int64_t score = 0;

    bool is_post() const { return kind == DocumentKind::Post; }
};

/// Immutable, validated collection of documents in ingestion order.
class Corpus {
public:
    Corpus() = default;

    /// Validates id uniqueness and that every comment's parent is a post in
    /// the same collection; throws ipts::Error otherwise.
    Corpus(std::string source_label, std::vector<Document> documents, std::int64_t ingested_at = 0);

    const std::vector<Document>& documents() const { return documents_; }
    const std::string& source_label() const { return source_label_; }
    std::int64_t ingested_at() const { return ingested_at_; }
    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }

    const Document* find(std::string_view id) const;
    std::vector<const Document*> posts() const;
    std::vector<const Document*> comments() const;
    /// Comments whose root post is `post_id`, in corpus order.
    std::vector<const Document*> responses_to(std::string_view post_id) const;

private:
    std::string source_label_;
    std::int64_t ingested_at_ = 0;
    std::vector<Document> documents_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_map<std::string, std::vector<std::size_t>> children_;
};

struct IngestConfig {
    std::string source_label;
    /// Recorded on the corpus; 0 means "now".
    std::int64_t ingested_at = 0;
};

/// Counts of records that did not make it into the corpus, by reason.
struct IngestReport {
    std::size_t lines_read = 0;
    std::size_t duplicates = 0;
    std::size_t removed_or_empty = 0;
    /// Comments whose parent chain never reached a surviving post.
    std::size_t orphans = 0;
    /// Comments whose parent was a comment; re-pointed at the root post.
    std::size_t flattened = 0;
};

struct IngestResult {
    Corpus corpus;
    IngestReport report;
};

/// Reads JSONL documents. Duplicate ids keep the first occurrence; "[deleted]",
/// "[removed]" and blank texts are dropped. Throws ipts::Error with the line
/// number on malformed JSON or a missing/ill-typed field.
IngestResult ingest(const std::filesystem::path& path, const IngestConfig& config);
IngestResult ingest(std::istream& in, const IngestConfig& config);

/// Canonical JSONL: fixed field order, LF line endings, corpus order.
void write_corpus(std::ostream& out, const Corpus& corpus);

struct CorpusStats {
    std::size_t posts = 0;
    std::size_t comments = 0;
    std::size_t unique_posting_authors = 0;
    std::size_t unique_commenting_authors = 0;
    double mean_post_words = 0.0;
    double stdev_post_words = 0.0;  // population
    double mean_comment_words = 0.0;
    double stdev_comment_words = 0.0;  // population
    double mean_comments_per_post = 0.0;
};

/// Word = whitespace-delimited token. Throws on an empty corpus.
CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace ipts
