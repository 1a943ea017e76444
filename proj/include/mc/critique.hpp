#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mc/gateway.hpp"
#include "mc/types.hpp"

namespace mc {

struct CritiqueSample {
    std::string sample_id;
    Query query;
    EvaluatedResponse response;
    std::optional<CrucialInfo> crucial_info;
    std::map<std::string, AnalyticalCritique> agent_critiques;
};

// Raw stage outputs kept verbatim: later prompts replay them as assistant
// turns, and they are persisted for audit and resumability.
struct CrucialRaw {
    std::string task_markdown;
    std::string criteria_markdown;
    std::string reference_markdown;
};

struct CrucialOutcome {
    CrucialInfo info;
    CrucialRaw raw;
    int agent_calls = 0;
};

// Step-1 chain: task description, then criteria (conditioned on the task
// description and optional user criteria), then reference response. Math and
// code queries skip the reference call and keep it empty. Criteria failing
// validation are retried once; a second failure raises StageError (the
// caller quarantines the sample).
CrucialOutcome generate_crucial_info(const Query& query, const AgentSpec& elicitor,
                                     Gateway& gateway);

// Chain bindings shared by the critique, meta and summarize prompts.
Bindings make_chain_bindings(const Query& query, const CrucialRaw& raw,
                             const std::string& labeled_response);

struct CritiqueOutcome {
    std::map<std::string, AnalyticalCritique> critiques;  // parsed per agent
    std::map<std::string, std::string> raw;               // every agent's raw output
    std::map<std::string, std::string> failures;          // agent_id -> reason
    int dropped_acus = 0;
};

inline constexpr int kCritiqueQuorum = 2;

// One critique prompt per critic with identical bindings, fanned out through
// the gateway; critics never see each other's outputs. A parse failure
// quarantines that agent's slot only; fewer than kCritiqueQuorum parsed
// critiques raises StageError.
CritiqueOutcome critique_with_agents(const CritiqueSample& sample, const CrucialRaw& raw,
                                     const std::vector<AgentSpec>& critics, Gateway& gateway,
                                     int limit);

}  // namespace mc
