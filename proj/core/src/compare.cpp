#include "ipts/compare.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <ostream>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "http_json.hpp"
#include "ipts/error.hpp"
#include "ipts/io.hpp"
#include "ipts/rng.hpp"
#include "ipts/text.hpp"

namespace ipts {
namespace {

constexpr const char* kModule = "compare";

using json = nlohmann::json;

constexpr const char* kInstruction =
    "You are replying to a post written by someone on an online peer-support forum. "
    "Write one reply of a few sentences that supports the author.";

constexpr const char* kCharacteristics =
    "Your reply should be:\n"
    "1. semantically similar and linguistically accommodating to the query, using the author's own words and style;\n"
    "2. diverse, rather than a generic or stock reply;\n"
    "3. empathetic, acknowledging how the author feels;\n"
    "4. promoting hopefulness about the author's future.\n";

std::string key_text(const ResponseKey& k) { return fmt::format("{}/{}", k.first, tier_name(k.second)); }

json stat_json(const std::optional<stats::StatResult>& r) {
    if (!r) return nullptr;
    json j;
    j["statistic"] = r->statistic;
    j["p"] = r->p_value;
    j["p_bonferroni"] = r->p_adjusted;
    j["significance"] = std::string(stats::stars_text(r->stars));
    return j;
}

}  // namespace

std::string_view tier_name(PromptTier tier) {
    switch (tier) {
        case PromptTier::AI1: return "AI1";
        case PromptTier::AI2: return "AI2";
        case PromptTier::AI3: return "AI3";
    }
    return "AI1";
}

PromptTier parse_tier(std::string_view name) {
    const auto c = parse_condition(name);
    if (c == Condition::OC) throw Error(kModule, "OC is not a prompt tier");
    return static_cast<PromptTier>(static_cast<int>(c) - 1);
}

Condition tier_condition(PromptTier tier) { return static_cast<Condition>(static_cast<int>(tier) + 1); }

std::string build_prompt(const Document& post, PromptTier tier, const LabelAssignment* assignment) {
    if (tier != PromptTier::AI1 && !assignment)
        throw Error(kModule, fmt::format("{} prompt needs the post's label assignment", tier_name(tier)), post.id);
    std::string out = kInstruction;
    out += "\n\n";
    if (tier != PromptTier::AI1) {
        std::vector<std::string> names;
        for (auto f : kAllRiskFactors)
            if (assignment->has(f)) names.emplace_back(risk_factor_display_name(f));
        if (names.empty()) {
            out += "The post was screened for suicide risk factors and none were detected.\n";
        } else {
            out += fmt::format("The post was screened for suicide risk factors and shows: {}.\n", fmt::join(names, ", "));
            if (assignment->lethal) out += "Together these indicate the author may be at lethal risk.\n";
            out += "Keep these risk factors in mind when replying.\n";
        }
        out += "\n";
    }
    if (tier == PromptTier::AI3) {
        out += kCharacteristics;
        out += "\n";
    }
    out += "Post:\n";
    out += post.text;
    out += "\n";
    return out;
}

std::string_view bucket_name(Bucket bucket) {
    switch (bucket) {
        case Bucket::Lethal: return "lethal";
        case Bucket::AcquiredCapability: return "AcquiredCapability";
        case Bucket::PerceivedBurdensomeness: return "PerceivedBurdensomeness";
        case Bucket::ThwartedBelongingness: return "ThwartedBelongingness";
    }
    return "lethal";
}

std::optional<Bucket> bucket_of(const LabelAssignment& a) {
    if (a.lethal) return Bucket::Lethal;
    if (a.has(RiskFactor::AcquiredCapability)) return Bucket::AcquiredCapability;
    if (a.has(RiskFactor::PerceivedBurdensomeness)) return Bucket::PerceivedBurdensomeness;
    if (a.has(RiskFactor::ThwartedBelongingness)) return Bucket::ThwartedBelongingness;
    return std::nullopt;
}

std::vector<SampledPost> sample_posts(std::span<const LabelAssignment> assignments, std::size_t per_bucket,
                                      std::uint64_t seed) {
    constexpr std::array<Bucket, 4> order{Bucket::Lethal, Bucket::AcquiredCapability, Bucket::PerceivedBurdensomeness,
                                          Bucket::ThwartedBelongingness};
    std::map<Bucket, std::vector<std::string>> pools;
    for (const auto& a : assignments)
        if (auto b = bucket_of(a)) pools[*b].push_back(a.document_id);

    std::vector<std::string> shortfalls;
    for (auto b : order) {
        const auto have = pools[b].size();
        if (have < per_bucket)
            shortfalls.push_back(
                fmt::format("{} has {} posts, {} needed (short by {})", bucket_name(b), have, per_bucket, per_bucket - have));
    }
    if (!shortfalls.empty()) throw Error(kModule, fmt::format("insufficient bucket population: {}", fmt::join(shortfalls, "; ")));

    Rng rng(seed);
    std::vector<SampledPost> out;
    for (auto b : order) {
        auto ids = pools[b];
        std::sort(ids.begin(), ids.end());
        rng.shuffle(ids);
        for (std::size_t i = 0; i < per_bucket; ++i) out.push_back({ids[i], b});
    }
    return out;
}

const Document* select_oc_response(const Corpus& corpus, std::string_view post_id) {
    const Document* best = nullptr;
    for (const auto* c : corpus.responses_to(post_id)) {
        if (!best || c->score > best->score ||
            (c->score == best->score &&
             (c->created_at < best->created_at || (c->created_at == best->created_at && c->id < best->id))))
            best = c;
    }
    return best;
}

HttpChatProvider::HttpChatProvider(HttpChatConfig config) : config_(std::move(config)) {
    config_.url = detail::trim_url(config_.url);
    if (config_.url.empty()) throw Error(kModule, "chat provider needs a URL");
    if (config_.max_retries < 0) throw Error(kModule, "max_retries must be >= 0");
}

std::string HttpChatProvider::complete(const std::string& prompt) {
    json body;
    body["prompt"] = prompt;
    int delay = config_.initial_backoff_ms;
    for (int attempt = 0;; ++attempt) {
        try {
            const auto reply = detail::post_json(kModule, config_.url, "/chat", body, config_.timeout_seconds);
            const auto it = reply.find("text");
            if (it == reply.end() || !it->is_string()) throw Error(kModule, "chat reply lacks a text field", config_.url);
            return it->get<std::string>();
        } catch (const detail::TransportError&) {
            if (attempt >= config_.max_retries) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            delay *= 2;
        }
    }
}

ResponseMap read_responses(std::istream& in) {
    ResponseMap out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        const auto where = fmt::format("line {}", line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(kModule, fmt::format("malformed response record: {}", e.what()), where);
        }
        for (const char* field : {"post_id", "tier", "text"})
            if (!j.is_object() || !j.contains(field) || !j[field].is_string())
                throw Error(kModule, fmt::format("response record needs string field '{}'", field), where);
        ResponseKey key{j["post_id"].get<std::string>(), parse_tier(j["tier"].get<std::string>())};
        if (!out.emplace(key, j["text"].get<std::string>()).second)
            throw Error(kModule, fmt::format("duplicate response {}", key_text(key)), where);
    }
    return out;
}

ResponseMap load_responses(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open response file", path.string());
    return read_responses(in);
}

void write_responses(std::ostream& out, const ResponseMap& responses) {
    for (const auto& [key, text] : responses) {
        nlohmann::ordered_json j;
        j["post_id"] = key.first;
        j["tier"] = std::string(tier_name(key.second));
        j["text"] = text;
        out << j.dump() << '\n';
    }
}

ResponseSet collect_responses(std::span<const PromptRequest> requests, ChatProvider& provider,
                              std::size_t max_in_flight) {
    max_in_flight = std::max<std::size_t>(1, max_in_flight);
    ResponseSet set;
    for (std::size_t start = 0; start < requests.size(); start += max_in_flight) {
        const auto wave = requests.subspan(start, std::min(max_in_flight, requests.size() - start));
        std::vector<std::future<std::string>> jobs;
        for (const auto& r : wave)
            jobs.push_back(std::async(std::launch::async, [&provider, &r] { return provider.complete(r.prompt); }));
        for (std::size_t i = 0; i < wave.size(); ++i) {
            ResponseKey key{wave[i].post_id, wave[i].tier};
            auto text = jobs[i].get();
            if (text::is_blank(text)) set.empty.push_back(key);
            set.responses[key] = std::move(text);
        }
    }
    return set;
}

ResponseSet collect_responses(std::span<const PromptRequest> requests, const ResponseMap& file) {
    ResponseSet set;
    std::vector<std::string> gaps;
    for (const auto& r : requests) {
        ResponseKey key{r.post_id, r.tier};
        auto it = file.find(key);
        if (it == file.end()) {
            gaps.push_back(key_text(key));
            continue;
        }
        if (text::is_blank(it->second)) set.empty.push_back(key);
        set.responses[key] = it->second;
    }
    if (!gaps.empty())
        throw Error(kModule, fmt::format("response file lacks {} responses", gaps.size()), fmt::format("{}", fmt::join(gaps, ", ")));
    return set;
}

std::string ai_response_id(std::string_view post_id, PromptTier tier) {
    return fmt::format("{}:{}", post_id, tier_name(tier));
}

ComparisonInputs comparison_inputs(const Corpus& corpus, std::span<const SampledPost> sample,
                                   const ResponseSet& responses) {
    ComparisonInputs out;
    for (const auto& s : sample) {
        const auto* post = corpus.find(s.post_id);
        if (!post || !post->is_post()) throw Error(kModule, "sampled post not in corpus", s.post_id);
        const auto* oc = select_oc_response(corpus, s.post_id);
        if (!oc) {
            out.excluded.push_back({s.post_id, "no comment to serve as the OC response"});
            continue;
        }
        std::vector<MetricInput> rows{{s.post_id, oc->id, Condition::OC, post->text, oc->text}};
        std::string reason;
        for (auto tier : kAllTiers) {
            auto it = responses.responses.find({s.post_id, tier});
            if (it == responses.responses.end()) {
                reason = fmt::format("no {} response", tier_name(tier));
                break;
            }
            if (text::is_blank(it->second)) {
                reason = fmt::format("empty {} response", tier_name(tier));
                break;
            }
            rows.push_back({s.post_id, ai_response_id(s.post_id, tier), tier_condition(tier), post->text, it->second});
        }
        if (!reason.empty()) {
            out.excluded.push_back({s.post_id, reason});
            continue;
        }
        out.inputs.insert(out.inputs.end(), rows.begin(), rows.end());
    }
    return out;
}

ComparisonReport comparison_report(std::span<const MetricRow> rows) {
    if (rows.empty()) throw Error(kModule, "no metric rows to compare");
    std::map<std::string, std::array<const MetricRow*, 4>> by_post;
    for (const auto& r : rows) {
        auto& slot = by_post[r.post_id][static_cast<std::size_t>(r.condition)];
        if (slot) throw Error(kModule, fmt::format("duplicate {} row", condition_name(r.condition)), r.post_id);
        slot = &r;
    }
    std::vector<std::string> unmatched;
    for (const auto& [post, slots] : by_post)
        if (std::any_of(slots.begin(), slots.end(), [](auto* p) { return p == nullptr; })) unmatched.push_back(post);
    if (!unmatched.empty())
        throw Error(kModule, "posts lack a response for some condition", fmt::format("{}", fmt::join(unmatched, ", ")));
    if (by_post.size() < 2) throw Error(kModule, "comparison needs at least 2 posts");

    std::vector<std::string> metrics;
    for (const auto& name : metric_names()) {
        const auto present = std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return metric_value(r, name).has_value(); });
        if (present == 0) continue;
        if (static_cast<std::size_t>(present) != rows.size())
            throw Error(kModule, fmt::format("metric '{}' is missing on some rows", name));
        metrics.push_back(name);
    }

    ComparisonReport report;
    report.posts = by_post.size();
    const int n = static_cast<int>(metrics.size());
    for (const auto& name : metrics) {
        MetricComparison mc;
        mc.metric = name;
        std::array<std::vector<double>, 4> values;
        for (const auto& [post, slots] : by_post)
            for (std::size_t c = 0; c < 4; ++c) values[c].push_back(*metric_value(*slots[c], name));
        for (std::size_t c = 0; c < 4; ++c) {
            double sum = 0.0;
            for (double v : values[c]) sum += v;
            mc.means[c] = sum / static_cast<double>(values[c].size());
        }
        for (std::size_t t = 0; t < 3; ++t) {
            try {
                mc.paired[t] = stats::paired_t(values[0], values[t + 1], n);
            } catch (const Error&) {
                mc.paired[t] = std::nullopt;
            }
        }
        try {
            mc.kruskal = stats::kruskal_wallis(std::span<const std::vector<double>>(values), n);
        } catch (const Error&) {
            mc.kruskal = std::nullopt;
        }
        report.rows.push_back(std::move(mc));
    }
    return report;
}

void write_report_csv(std::ostream& out, const ComparisonReport& report) {
    out << "metric,mean_OC,mean_AI1,mean_AI2,mean_AI3";
    for (auto t : kAllTiers) out << fmt::format(",t_{0},padj_{0},sig_{0}", tier_name(t));
    out << ",H,padj_H,sig_H\n";
    auto stat_cells = [](const std::optional<stats::StatResult>& r) {
        if (!r) return std::string(",,degenerate");
        return fmt::format(",{},{},{}", io::format_real(r->statistic), io::format_real(r->p_adjusted),
                           stats::stars_text(r->stars));
    };
    for (const auto& row : report.rows) {
        out << row.metric;
        for (double m : row.means) out << ',' << io::format_real(m);
        for (const auto& p : row.paired) out << stat_cells(p);
        out << stat_cells(row.kruskal) << '\n';
    }
}

void write_report_json(std::ostream& out, const ComparisonReport& report) {
    json j;
    j["posts"] = report.posts;
    j["n_comparisons"] = report.rows.size();
    j["metrics"] = json::array();
    for (const auto& row : report.rows) {
        json r;
        r["metric"] = row.metric;
        for (std::size_t c = 0; c < 4; ++c) r["means"][std::string(condition_name(kAllConditions[c]))] = row.means[c];
        for (std::size_t t = 0; t < 3; ++t) r["paired_t_vs_OC"][std::string(tier_name(kAllTiers[t]))] = stat_json(row.paired[t]);
        r["kruskal_wallis"] = stat_json(row.kruskal);
        j["metrics"].push_back(std::move(r));
    }
    out << j.dump(2) << '\n';
}

}  // namespace ipts
