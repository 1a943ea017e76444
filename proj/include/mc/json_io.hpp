#pragma once

#include <string>

#include <json.hpp>

#include "mc/types.hpp"

// Canonical on-disk form for every type: one JSON object per line, field
// names are the snake_case of the struct fields, enums serialize as their
// literal strings.

namespace mc {

using Json = nlohmann::json;

Json to_json(const Query& v);
Json to_json(const EvaluatedResponse& v);
Json to_json(const CriteriaTree& v);
Json to_json(const CrucialInfo& v);
Json to_json(const Acu& v);
Json to_json(const AnalyticalCritique& v);
Json to_json(const MetaLabel& v);
Json to_json(const FinalCritique& v);
Json to_json(const PreferencePair& v);

Query query_from_json(const Json& j);
EvaluatedResponse response_from_json(const Json& j);
CriteriaTree criteria_tree_from_json(const Json& j);
CrucialInfo crucial_info_from_json(const Json& j);
Acu acu_from_json(const Json& j);
AnalyticalCritique critique_from_json(const Json& j);
MetaLabel meta_label_from_json(const Json& j);
FinalCritique final_critique_from_json(const Json& j);
PreferencePair preference_pair_from_json(const Json& j);

// Single-line dump used for every JSONL record the pipeline writes.
std::string to_jsonl_line(const Json& j);

Json parse_json(const std::string& text);

}  // namespace mc
