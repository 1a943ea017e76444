#include "mc/json_io.hpp"

#include "mc/common.hpp"

namespace mc {

namespace {

template <typename T, typename F>
Json array_of(const std::vector<T>& items, F&& f) {
    Json arr = Json::array();
    for (const auto& item : items) arr.push_back(f(item));
    return arr;
}

const Json& field(const Json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end())
        throw ParseError(std::string("missing field: ") + name + " in " + j.dump());
    return *it;
}

}  // namespace

Json to_json(const Query& v) {
    Json j;
    j["id"] = v.id;
    j["conversation"] = array_of(v.conversation, [](const Turn& t) {
        return Json{{"speaker", to_string(t.speaker)}, {"text", t.text}};
    });
    j["task_family"] = to_string(v.task_family);
    j["source_tag"] = v.source_tag;
    if (v.user_criteria) j["user_criteria"] = *v.user_criteria;
    if (v.gold_answer) j["gold_answer"] = *v.gold_answer;
    return j;
}

Query query_from_json(const Json& j) {
    Query q;
    q.id = field(j, "id").get<std::string>();
    for (const auto& t : field(j, "conversation")) {
        q.conversation.push_back({speaker_from_string(field(t, "speaker").get<std::string>()),
                                  field(t, "text").get<std::string>()});
    }
    q.task_family = task_family_from_string(field(j, "task_family").get<std::string>());
    q.source_tag = j.value("source_tag", std::string{});
    if (j.contains("user_criteria") && !j["user_criteria"].is_null())
        q.user_criteria = j["user_criteria"].get<std::string>();
    if (j.contains("gold_answer") && !j["gold_answer"].is_null())
        q.gold_answer = j["gold_answer"].get<std::string>();
    return q;
}

Json to_json(const EvaluatedResponse& v) {
    Json j;
    j["id"] = v.id;
    j["raw_text"] = v.raw_text;
    j["labeled_text"] = v.labeled_text;
    j["sentence_spans"] = array_of(v.sentence_spans, [](const SentenceSpan& s) {
        return Json{{"label", s.label}, {"begin", s.begin}, {"end", s.end}};
    });
    j["quality_tier"] = to_string(v.quality_tier);
    j["reward_score"] = v.reward_score;
    return j;
}

EvaluatedResponse response_from_json(const Json& j) {
    EvaluatedResponse r;
    r.id = field(j, "id").get<std::string>();
    r.raw_text = field(j, "raw_text").get<std::string>();
    r.labeled_text = field(j, "labeled_text").get<std::string>();
    for (const auto& s : field(j, "sentence_spans")) {
        r.sentence_spans.push_back({field(s, "label").get<int>(),
                                    field(s, "begin").get<std::size_t>(),
                                    field(s, "end").get<std::size_t>()});
    }
    r.quality_tier = quality_tier_from_string(field(j, "quality_tier").get<std::string>());
    r.reward_score = field(j, "reward_score").get<double>();
    return r;
}

Json to_json(const CriteriaTree& v) {
    Json j;
    j["primaries"] = array_of(v.primaries, [](const PrimaryCriterion& p) {
        Json pj;
        pj["name"] = p.name;
        pj["description"] = p.description;
        pj["fine_grained"] = array_of(p.fine_grained, [](const FineCriterion& f) {
            return Json{{"name", f.name}, {"description", f.description}, {"degree", f.degree}};
        });
        return pj;
    });
    return j;
}

CriteriaTree criteria_tree_from_json(const Json& j) {
    CriteriaTree tree;
    for (const auto& pj : field(j, "primaries")) {
        PrimaryCriterion p;
        p.name = field(pj, "name").get<std::string>();
        p.description = pj.value("description", std::string{});
        for (const auto& fj : field(pj, "fine_grained")) {
            p.fine_grained.push_back({field(fj, "name").get<std::string>(),
                                      fj.value("description", std::string{}),
                                      field(fj, "degree").get<std::string>()});
        }
        tree.primaries.push_back(std::move(p));
    }
    return tree;
}

Json to_json(const CrucialInfo& v) {
    return Json{{"task_description", v.task_description},
                {"criteria", to_json(v.criteria)},
                {"reference_response", v.reference_response}};
}

CrucialInfo crucial_info_from_json(const Json& j) {
    CrucialInfo ci;
    ci.task_description = field(j, "task_description").get<std::string>();
    ci.criteria = criteria_tree_from_json(field(j, "criteria"));
    ci.reference_response = field(j, "reference_response").get<std::string>();
    return ci;
}

Json to_json(const Acu& v) {
    Json j;
    j["citations"] = v.citations;
    j["description"] = v.description;
    j["criterion_name"] = v.criterion_name;
    j["severity"] = to_string(v.severity);
    j["suggestion"] = v.suggestion;
    return j;
}

Acu acu_from_json(const Json& j) {
    Acu a;
    a.citations = field(j, "citations").get<std::vector<int>>();
    a.description = field(j, "description").get<std::string>();
    a.criterion_name = field(j, "criterion_name").get<std::string>();
    a.severity = severity_from_string(field(j, "severity").get<std::string>());
    a.suggestion = field(j, "suggestion").get<std::string>();
    return a;
}

Json to_json(const AnalyticalCritique& v) {
    Json j;
    j["agent_id"] = v.agent_id;
    j["acus"] = array_of(v.acus, [](const Acu& a) { return to_json(a); });
    j["raw_markdown"] = v.raw_markdown;
    return j;
}

AnalyticalCritique critique_from_json(const Json& j) {
    AnalyticalCritique c;
    c.agent_id = field(j, "agent_id").get<std::string>();
    for (const auto& a : field(j, "acus")) c.acus.push_back(acu_from_json(a));
    c.raw_markdown = field(j, "raw_markdown").get<std::string>();
    return c;
}

Json to_json(const MetaLabel& v) {
    return Json{{"category", to_string(v.category)}, {"rationale", v.rationale}};
}

MetaLabel meta_label_from_json(const Json& j) {
    return {quality_category_from_string(field(j, "category").get<std::string>()),
            j.value("rationale", std::string{})};
}

Json to_json(const FinalCritique& v) {
    Json j;
    j["merged_acus"] = array_of(v.merged_acus, [](const Acu& a) { return to_json(a); });
    j["per_primary_summary"] = v.per_primary_summary;
    j["judgment_score"] = v.judgment_score;
    j["raw_markdown"] = v.raw_markdown;
    return j;
}

FinalCritique final_critique_from_json(const Json& j) {
    FinalCritique f;
    for (const auto& a : field(j, "merged_acus")) f.merged_acus.push_back(acu_from_json(a));
    f.per_primary_summary =
        field(j, "per_primary_summary").get<std::map<std::string, std::string>>();
    f.judgment_score = field(j, "judgment_score").get<double>();
    f.raw_markdown = field(j, "raw_markdown").get<std::string>();
    return f;
}

Json to_json(const PreferencePair& v) {
    Json j;
    j["sample_id"] = v.sample_id;
    j["chosen_id"] = v.chosen_id;
    j["rejected_id"] = v.rejected_id;
    j["chosen_text"] = v.chosen_text;
    j["rejected_text"] = v.rejected_text;
    j["chosen_severity"] = v.chosen_severity;
    j["rejected_severity"] = v.rejected_severity;
    j["mars_verdict"] = to_string(v.mars_verdict);
    j["mars_evidence"] =
        Json{{"chosen", v.mars_evidence.chosen}, {"rejected", v.mars_evidence.rejected}};
    return j;
}

PreferencePair preference_pair_from_json(const Json& j) {
    PreferencePair p;
    p.sample_id = field(j, "sample_id").get<std::string>();
    p.chosen_id = field(j, "chosen_id").get<std::string>();
    p.rejected_id = field(j, "rejected_id").get<std::string>();
    p.chosen_text = field(j, "chosen_text").get<std::string>();
    p.rejected_text = field(j, "rejected_text").get<std::string>();
    p.chosen_severity = field(j, "chosen_severity").get<int>();
    p.rejected_severity = field(j, "rejected_severity").get<int>();
    p.mars_verdict = mars_verdict_from_string(field(j, "mars_verdict").get<std::string>());
    const Json& ev = field(j, "mars_evidence");
    p.mars_evidence.chosen = field(ev, "chosen").get<std::vector<double>>();
    p.mars_evidence.rejected = field(ev, "rejected").get<std::vector<double>>();
    return p;
}

std::string to_jsonl_line(const Json& j) { return j.dump(); }

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace mc
