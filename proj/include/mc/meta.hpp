#pragma once

#include <map>
#include <string>
#include <vector>

#include "mc/critique.hpp"
#include "mc/gateway.hpp"
#include "mc/types.hpp"

namespace mc {

struct MetaAnnotatedCritique {
    AnalyticalCritique base;
    std::vector<MetaLabel> labels;  // aligned 1:1 with base.acus
    int accumulated_severity = 0;
};

// Order-invariant and additive over concatenation.
int accumulate_severity(const std::vector<MetaLabel>& labels);

struct MetaOutcome {
    std::map<std::string, MetaAnnotatedCritique> annotated;
    std::vector<std::string> unlabeled;  // excluded from pairing, kept for summarization
    std::vector<std::string> warnings;
    std::map<std::string, std::string> raw;  // agent_id -> raw meta markdown
};

// One judge call per critique with every critique in the rendered context.
// Analysis/ACU count mismatches are retried once; a single extra trailing
// entry is dropped with a warning; anything else marks that critique
// unlabeled.
MetaOutcome meta_classify(const CritiqueSample& sample, const CrucialRaw& raw,
                          const AgentSpec& judge, Gateway& gateway);

struct SummarizeOutcome {
    FinalCritique final;
    std::vector<std::string> warnings;
};

// One summarizer call with all critiques plus all meta analyses in context.
// Unparseable or out-of-range scores are retried once, then raise StageError.
// Merged ACUs matching a context ACU the judge labeled L1 produce a
// "retained-flagged-ACU" warning.
SummarizeOutcome summarize(const CritiqueSample& sample, const CrucialRaw& raw,
                           const MetaOutcome& meta, const AgentSpec& summarizer,
                           Gateway& gateway);

}  // namespace mc
