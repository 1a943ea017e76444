#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mc/types.hpp"

namespace mc {

enum class LabelMode { prose, code };

struct LabeledText {
    std::string labeled_text;
    std::vector<SentenceSpan> spans;
};

// Inserts " [Sk]" citation markers. Prose mode splits at {. ! ? ;} with
// closing quotes/brackets attached to the preceding sentence and the marker
// placed immediately before the terminal punctuation; code mode appends the
// marker at the end of each non-blank line. Labels are 1-based and
// contiguous; stripping every marker reproduces the input byte for byte.
//
// No abbreviation handling: "e.g." and decimals over-split, which only
// makes citation granularity finer.
LabeledText label_sentences(const std::string& text, LabelMode mode);

struct ScoredCandidate {
    std::string response_text;
    std::string generator_id;
    double reward_score = 0.0;
};

struct QualityTriple {
    ScoredCandidate low;
    ScoredCandidate medium;
    ScoredCandidate high;
};

struct QualityPair {
    ScoredCandidate low;
    ScoredCandidate high;
};

enum class BinPolicy { three_tier, two_tier_reasoning };

struct BinResult {
    BinPolicy policy = BinPolicy::three_tier;
    std::optional<QualityTriple> triple;
    std::optional<QualityPair> pair;
};

// three_tier picks min / median / max by reward score (even counts take the
// lower middle) and requires both adjacent gaps >= min_gap.
// two_tier_reasoning pairs the best candidate from the designated
// high-quality generator with the lowest-scored other candidate.
// Permutation-invariant over the input order.
BinResult bin_responses(const std::vector<ScoredCandidate>& candidates, BinPolicy policy,
                        double min_gap, const std::string& designated_generator = {});

}  // namespace mc
