#include "mc/preference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "mc/common.hpp"

namespace mc {

const char* to_string(PairingPolicy p) {
    return p == PairingPolicy::all_pairs ? "all_pairs" : "max_gap_one_pair";
}

PairingPolicy pairing_policy_from_string(const std::string& s) {
    if (s == "max_gap_one_pair") return PairingPolicy::max_gap_one_pair;
    if (s == "all_pairs") return PairingPolicy::all_pairs;
    throw ConfigError("unknown pairing policy: " + s);
}

std::vector<DraftPair> pair_candidates(const CandidatePool& pool, int threshold,
                                       PairingPolicy policy) {
    std::vector<DraftPair> drafts;
    for (const auto& a : pool.entries) {
        for (const auto& b : pool.entries) {
            if (&a == &b) continue;
            if (b.severity - a.severity > threshold) drafts.push_back({a, b});
        }
    }
    if (policy == PairingPolicy::all_pairs || drafts.empty()) return drafts;

    auto better = [](const DraftPair& x, const DraftPair& y) {
        if (x.gap() != y.gap()) return x.gap() > y.gap();
        const bool xs = x.chosen.id == kSummaryEntryId;
        const bool ys = y.chosen.id == kSummaryEntryId;
        if (xs != ys) return xs;
        if (x.chosen.id != y.chosen.id) return x.chosen.id < y.chosen.id;
        return x.rejected.id < y.rejected.id;
    };
    return {*std::min_element(drafts.begin(), drafts.end(),
                              [&](const DraftPair& x, const DraftPair& y) { return better(x, y); })};
}

// ---- answer extraction ----

ExtractorRule extractor_rule_from_string(const std::string& s) {
    if (s == "standard" || s == "default") return ExtractorRule::standard;
    if (s == "boxed_only") return ExtractorRule::boxed_only;
    if (s == "last_number") return ExtractorRule::last_number;
    throw ConfigError("unknown extractor rule: " + s);
}

namespace {

std::optional<std::string> last_boxed(const std::string& text) {
    const std::string open = "\\boxed{";
    std::size_t pos = text.rfind(open);
    if (pos == std::string::npos) return std::nullopt;
    std::size_t start = pos + open.size();
    int depth = 1;
    std::size_t i = start;
    for (; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        if (text[i] == '}' && --depth == 0) break;
    }
    if (depth != 0) return std::nullopt;
    return text.substr(start, i - start);
}

std::optional<std::string> last_answer_tag(const std::string& text) {
    const std::string lower = to_lower(text);
    static const std::vector<std::string> tags = {"answer is", "answer:", "answer ="};
    std::size_t best = std::string::npos;
    std::size_t tag_len = 0;
    for (const auto& tag : tags) {
        std::size_t pos = lower.rfind(tag);
        if (pos != std::string::npos && (best == std::string::npos || pos > best)) {
            best = pos;
            tag_len = tag.size();
        }
    }
    if (best == std::string::npos) return std::nullopt;
    std::size_t start = best + tag_len;
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string span = trim(text.substr(start, end - start));
    while (!span.empty() && (span.back() == '.' || span.back() == '!' || span.back() == '?'))
        span.pop_back();
    if (span.empty()) return std::nullopt;
    return trim(span);
}

std::optional<std::string> last_number(const std::string& text) {
    std::optional<std::string> found;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        const bool sign = (c == '-' || c == '+') && i + 1 < n &&
                          std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (std::isdigit(static_cast<unsigned char>(c)) || sign) {
            std::size_t j = i;
            if (sign) ++j;
            while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < n && text[j] == '.' && j + 1 < n &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            found = text.substr(i, j - i);
            i = j;
        } else {
            ++i;
        }
    }
    return found;
}

// Canonical comparison form: numeric strings compare by value ("42.0", "+42"
// and "42" coincide), anything else lowercased with collapsed whitespace.
std::string canonicalize(const std::string& raw) {
    std::string s = trim(raw);
    while (!s.empty() && (s.back() == '.' || s.back() == ',')) s.pop_back();
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') s = trim(s.substr(1, s.size() - 2));
    if (!s.empty()) {
        char* end = nullptr;
        const double value = std::strtod(s.c_str(), &end);
        if (end != nullptr && *end == '\0' && std::isfinite(value)) {
            if (value == std::floor(value) && std::fabs(value) < 1e15) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.0f", value);
                return buf;
            }
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.12g", value);
            return buf;
        }
    }
    return normalize_name(s);
}

}  // namespace

std::optional<std::string> extract_answer(const std::string& text, ExtractorRule rule) {
    switch (rule) {
        case ExtractorRule::boxed_only: return last_boxed(text);
        case ExtractorRule::last_number: return last_number(text);
        case ExtractorRule::standard:
            if (auto v = last_boxed(text)) return v;
            if (auto v = last_answer_tag(text)) return v;
            return last_number(text);
    }
    return std::nullopt;
}

ExactMatchResult exact_match(const std::string& revision, const std::string& gold,
                             ExtractorRule rule) {
    if (trim(gold).empty()) throw Error("exact_match: gold answer is empty");
    ExactMatchResult result;
    auto answer = extract_answer(revision, rule);
    if (!answer) return result;  // 0 with a no-answer tally
    result.extracted = true;
    result.matched = canonicalize(*answer) == canonicalize(gold) ? 1 : 0;
    return result;
}

ModelScoredOracle::ModelScoredOracle(Gateway& gateway, AgentSpec spec)
    : gateway_(gateway), spec_(std::move(spec)) {}

double ModelScoredOracle::score(const Query& query, const std::string& revision) {
    ChatRequest request;
    request.template_id = TemplateId::reward_score;
    request.messages = render_prompt(
        TemplateId::reward_score,
        {{"conversation", format_conversation(query)}, {"revision", revision}});
    ChatResult result = gateway_.complete(spec_, std::move(request));
    if (!result.ok()) throw Error("reward oracle call failed: " + result.error);
    const char* start = result.response.content.c_str();
    char* end = nullptr;
    const double value = std::strtod(start, &end);
    if (end == start || !std::isfinite(value))
        throw ParseError("reward oracle returned a non-numeric score: \"" +
                         result.response.content + "\"");
    return value;
}

ExactMatchOracle::ExactMatchOracle(std::string gold, ExtractorRule rule)
    : gold_(std::move(gold)), rule_(rule) {}

double ExactMatchOracle::score(const Query&, const std::string& revision) {
    ExactMatchResult result = exact_match(revision, gold_, rule_);
    if (!result.extracted) ++no_answer_;
    return static_cast<double>(result.matched);
}

MarsVerdict mars_verdict(const MarsEvidence& evidence, int k) {
    const std::size_t minimum = 2 * static_cast<std::size_t>(k);
    if (evidence.chosen.size() < minimum || evidence.rejected.size() < minimum)
        return MarsVerdict::unevaluated;
    const double chosen_mean =
        std::accumulate(evidence.chosen.begin(), evidence.chosen.end(), 0.0) /
        static_cast<double>(evidence.chosen.size());
    const double rejected_mean =
        std::accumulate(evidence.rejected.begin(), evidence.rejected.end(), 0.0) /
        static_cast<double>(evidence.rejected.size());
    return chosen_mean > rejected_mean ? MarsVerdict::kept : MarsVerdict::dropped;
}

PreferencePair mars_filter(const DraftPair& draft, const std::string& sample_id,
                           const MarsInputs& inputs, const std::vector<AgentSpec>& revisers,
                           int k, RewardOracle& oracle, Gateway& gateway, int limit) {
    PreferencePair pair;
    pair.sample_id = sample_id;
    pair.chosen_id = draft.chosen.id;
    pair.rejected_id = draft.rejected.id;
    pair.chosen_text = draft.chosen.acu_markdown;
    pair.rejected_text = draft.rejected.acu_markdown;
    pair.chosen_severity = draft.chosen.severity;
    pair.rejected_severity = draft.rejected.severity;

    // Jobs for both sides in one fan-out; slot order is (side, reviser, trial).
    std::vector<Gateway::Job> jobs;
    jobs.reserve(2 * revisers.size() * static_cast<std::size_t>(k));
    const std::string* sides[2] = {&pair.chosen_text, &pair.rejected_text};
    for (const std::string* side : sides) {
        for (const auto& reviser : revisers) {
            for (int trial = 0; trial < k; ++trial) {
                ChatRequest request;
                request.template_id = TemplateId::revise;
                request.messages = render_prompt(
                    TemplateId::revise, {{"conversation", inputs.conversation},
                                         {"evaluated_response", *inputs.labeled_response},
                                         {"critique", *side}});
                // Distinct trials of the same reviser must not collapse to
                // one digest under the mock backend.
                request.messages.back().content +=
                    "\n\n(revision trial " + std::to_string(trial + 1) + ")";
                jobs.push_back({reviser, std::move(request)});
            }
        }
    }
    const auto results = gateway.complete_many(std::move(jobs), limit);

    const std::size_t per_side = revisers.size() * static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok()) continue;  // a failed reviser call shrinks that side's set
        double value;
        try {
            value = oracle.score(*inputs.query, results[i].response.content);
        } catch (const Error&) {
            continue;
        }
        (i < per_side ? pair.mars_evidence.chosen : pair.mars_evidence.rejected).push_back(value);
    }
    pair.mars_verdict = mars_verdict(pair.mars_evidence, k);
    return pair;
}

}  // namespace mc
