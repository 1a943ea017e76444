#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mc/gateway.hpp"
#include "mc/types.hpp"

namespace mc {

// One pairing candidate: an agent critique or the summarized final critique
// (reserved id "summary", severity 0 by construction).
struct PoolEntry {
    std::string id;
    int severity = 0;
    std::string acu_markdown;  // ACU-list text fed to revisers
};

struct CandidatePool {
    std::string sample_id;
    std::vector<PoolEntry> entries;  // 2..5
};

inline constexpr const char* kSummaryEntryId = "summary";
inline constexpr int kDefaultPairingThreshold = 5;
inline constexpr int kDefaultMarsRevisions = 8;

enum class PairingPolicy { max_gap_one_pair, all_pairs };

const char* to_string(PairingPolicy p);
PairingPolicy pairing_policy_from_string(const std::string& s);

struct DraftPair {
    PoolEntry chosen;
    PoolEntry rejected;
    int gap() const { return rejected.severity - chosen.severity; }
};

// A draft (a, b) exists iff severity(b) - severity(a) > threshold, strictly.
// max_gap_one_pair keeps only the maximal-gap pair, preferring the summary
// entry as chosen and then lexicographic ids on ties.
std::vector<DraftPair> pair_candidates(const CandidatePool& pool,
                                       int threshold = kDefaultPairingThreshold,
                                       PairingPolicy policy = PairingPolicy::max_gap_one_pair);

// ---- scoring oracles ----

enum class ExtractorRule { standard, boxed_only, last_number };

ExtractorRule extractor_rule_from_string(const std::string& s);

// Answer span under the rule: boxed content, then "answer is/:" tags, then
// the last number (the standard rule tries all three in that order).
std::optional<std::string> extract_answer(const std::string& text, ExtractorRule rule);

struct ExactMatchResult {
    int matched = 0;       // 0 or 1
    bool extracted = false;  // false feeds the no-answer tally
};

// Whitespace- and sign-normalized comparison; numeric answers compare by
// value so "42.0" matches "42".
ExactMatchResult exact_match(const std::string& revision, const std::string& gold,
                             ExtractorRule rule = ExtractorRule::standard);

class RewardOracle {
public:
    virtual ~RewardOracle() = default;
    virtual double score(const Query& query, const std::string& revision) = 0;
    virtual std::string kind() const = 0;
};

// Asks a reward endpoint for a scalar per (query, revision).
class ModelScoredOracle : public RewardOracle {
public:
    ModelScoredOracle(Gateway& gateway, AgentSpec spec);
    double score(const Query& query, const std::string& revision) override;
    std::string kind() const override { return "model_scored"; }

private:
    Gateway& gateway_;
    AgentSpec spec_;
};

// 0/1 exact answer matching against a gold answer.
class ExactMatchOracle : public RewardOracle {
public:
    ExactMatchOracle(std::string gold, ExtractorRule rule = ExtractorRule::standard);
    double score(const Query& query, const std::string& revision) override;
    std::string kind() const override { return "exact_match"; }
    int no_answer_tally() const { return no_answer_; }

private:
    std::string gold_;
    ExtractorRule rule_;
    int no_answer_ = 0;
};

// ---- MARS ----

// Pure verdict arithmetic over collected evidence: kept iff mean(chosen) >
// mean(rejected) strictly; unevaluated when either side collected fewer than
// 2k scores.
MarsVerdict mars_verdict(const MarsEvidence& evidence, int k);

struct MarsInputs {
    const Query* query = nullptr;
    const std::string* labeled_response = nullptr;
    std::string conversation;  // formatted conversation block
};

// Runs the 2 * |revisers| * k revision fan-out through the gateway, scores
// every revision with the oracle, and fills verdict + evidence.
PreferencePair mars_filter(const DraftPair& draft, const std::string& sample_id,
                           const MarsInputs& inputs, const std::vector<AgentSpec>& revisers,
                           int k, RewardOracle& oracle, Gateway& gateway, int limit);

}  // namespace mc
