#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ipts/corpus.hpp"
#include "ipts/labeling.hpp"
#include "ipts/metrics.hpp"
#include "ipts/stats.hpp"

namespace ipts {

enum class PromptTier { AI1, AI2, AI3 };

inline constexpr std::array<PromptTier, 3> kAllTiers = {PromptTier::AI1, PromptTier::AI2, PromptTier::AI3};

std::string_view tier_name(PromptTier tier);
PromptTier parse_tier(std::string_view name);
Condition tier_condition(PromptTier tier);

/// AI1: instruction and post text only. AI2 adds the post's risk factors.
/// AI3 adds the four supportive-response characteristics.
std::string build_prompt(const Document& post, PromptTier tier, const LabelAssignment* assignment = nullptr);

enum class Bucket { Lethal, AcquiredCapability, PerceivedBurdensomeness, ThwartedBelongingness };

std::string_view bucket_name(Bucket bucket);

/// Highest-priority bucket of an assignment: lethal, then AC, PB, TB.
std::optional<Bucket> bucket_of(const LabelAssignment& assignment);

struct SampledPost {
    std::string post_id;
    Bucket bucket = Bucket::Lethal;
};

/// per_bucket posts from each bucket, drawn by a seeded shuffle of the
/// bucket's ids in sorted order. Throws naming every short bucket.
std::vector<SampledPost> sample_posts(std::span<const LabelAssignment> assignments, std::size_t per_bucket,
                                      std::uint64_t seed);

/// Highest-scoring comment on the post; ties to the earliest timestamp, then id.
const Document* select_oc_response(const Corpus& corpus, std::string_view post_id);

struct PromptRequest {
    std::string post_id;
    PromptTier tier = PromptTier::AI1;
    std::string prompt;
};

using ResponseKey = std::pair<std::string, PromptTier>;
using ResponseMap = std::map<ResponseKey, std::string>;

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

struct HttpChatConfig {
    std::string url;
    int max_retries = 3;
    int initial_backoff_ms = 250;
    int timeout_seconds = 120;
};

/// POST /chat {"prompt"} -> {"text"}. Transport failures are retried with
/// exponential backoff.
class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(HttpChatConfig config);
    std::string complete(const std::string& prompt) override;

private:
    HttpChatConfig config_;
};

/// JSONL of {"post_id", "tier", "text"}.
ResponseMap load_responses(const std::filesystem::path& path);
ResponseMap read_responses(std::istream& in);
void write_responses(std::ostream& out, const ResponseMap& responses);

struct ResponseSet {
    ResponseMap responses;
    /// Keys whose response text is blank.
    std::vector<ResponseKey> empty;
};

/// One provider call per request, at most max_in_flight at a time.
ResponseSet collect_responses(std::span<const PromptRequest> requests, ChatProvider& provider,
                              std::size_t max_in_flight = 4);

/// File mode: every request must be covered; gaps are listed in the error.
ResponseSet collect_responses(std::span<const PromptRequest> requests, const ResponseMap& file);

/// Response id used for AI responses: "<post_id>:<tier>".
std::string ai_response_id(std::string_view post_id, PromptTier tier);

struct ExcludedPost {
    std::string post_id;
    std::string reason;
};

struct ComparisonInputs {
    std::vector<MetricInput> inputs;
    std::vector<ExcludedPost> excluded;
};

/// OC plus every AI tier per sampled post. A post without a comment or with
/// a blank response is excluded and listed.
ComparisonInputs comparison_inputs(const Corpus& corpus, std::span<const SampledPost> sample,
                                   const ResponseSet& responses);

struct MetricComparison {
    std::string metric;
    /// OC, AI1, AI2, AI3.
    std::array<double, 4> means{};
    /// AI1, AI2, AI3 against OC; nullopt when the differences are constant.
    std::array<std::optional<stats::StatResult>, 3> paired{};
    /// nullopt when every value is identical.
    std::optional<stats::StatResult> kruskal;
};

struct ComparisonReport {
    std::size_t posts = 0;
    std::vector<MetricComparison> rows;
};

/// Rows for every metric present on all input rows. Bonferroni n is the
/// number of report rows. Throws naming posts that lack a condition.
ComparisonReport comparison_report(std::span<const MetricRow> rows);

void write_report_csv(std::ostream& out, const ComparisonReport& report);
void write_report_json(std::ostream& out, const ComparisonReport& report);

}  // namespace ipts
