#include "mc/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mc/common.hpp"
#include "mc/critique.hpp"
#include "mc/meta.hpp"
#include "mc/metrics.hpp"
#include "mc/mock.hpp"
#include "mc/parsers.hpp"
#include "mc/preprocess.hpp"
#include "mc/validate.hpp"

namespace fs = std::filesystem;

namespace mc {

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::prepare: return "prepare";
        case Stage::crucial: return "crucial";
        case Stage::critique: return "critique";
        case Stage::meta: return "meta";
        case Stage::summarize: return "summarize";
        case Stage::pair: return "pair";
        case Stage::mars: return "mars";
        case Stage::emit: return "emit";
        case Stage::verify: return "verify";
    }
    return "prepare";
}

Stage stage_from_string(const std::string& s) {
    for (Stage stage : kStageOrder)
        if (s == to_string(stage)) return stage;
    throw ConfigError("unknown stage: " + s);
}

// ---- config ----

namespace {

Json agent_to_json(const AgentSpec& spec) {
    Json j;
    j["agent_id"] = spec.agent_id;
    j["endpoint"] = spec.endpoint;
    j["model_name"] = spec.model_name;
    j["temperature"] = spec.temperature;
    j["top_p"] = spec.top_p;
    if (spec.top_k) j["top_k"] = *spec.top_k;
    j["max_tokens"] = spec.max_tokens;
    j["role"] = to_string(spec.role);
    if (!spec.api_key_env.empty()) j["api_key_env"] = spec.api_key_env;
    return j;
}

AgentSpec agent_from_json(const Json& j, AgentRole role) {
    AgentSpec spec = AgentSpec::with_role_defaults(j.at("agent_id").get<std::string>(),
                                                   j.at("endpoint").get<std::string>(),
                                                   j.at("model_name").get<std::string>(), role);
    if (j.contains("temperature")) spec.temperature = j["temperature"].get<double>();
    if (j.contains("top_p")) spec.top_p = j["top_p"].get<double>();
    if (j.contains("top_k") && !j["top_k"].is_null()) spec.top_k = j["top_k"].get<int>();
    if (j.contains("max_tokens")) spec.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("api_key_env")) spec.api_key_env = j["api_key_env"].get<std::string>();
    return spec;
}

const char* extractor_to_string(ExtractorRule rule) {
    switch (rule) {
        case ExtractorRule::standard: return "standard";
        case ExtractorRule::boxed_only: return "boxed_only";
        case ExtractorRule::last_number: return "last_number";
    }
    return "standard";
}

}  // namespace

PipelineConfig config_from_json(const Json& j) {
    PipelineConfig c;
    c.run_dir = j.at("run_dir").get<std::string>();
    const Json& inputs = j.at("inputs");
    c.queries_path = inputs.at("queries").get<std::string>();
    c.candidates_path = inputs.value("candidates", std::string{});

    const Json& agents = j.at("agents");
    c.info_elicitor = agent_from_json(agents.at("info_elicitor"), AgentRole::info_elicitor);
    for (const auto& a : agents.at("critics")) c.critics.push_back(agent_from_json(a, AgentRole::critic));
    c.meta_judge = agent_from_json(agents.at("meta_judge"), AgentRole::meta_judge);
    c.summarizer = agent_from_json(agents.at("summarizer"), AgentRole::summarizer);
    for (const auto& a : agents.at("revisers"))
        c.revisers.push_back(agent_from_json(a, AgentRole::reviser));
    if (agents.contains("reward_oracle")) {
        const Json& oracle = agents["reward_oracle"];
        c.reward_oracle.kind = oracle.value("kind", std::string{"auto"});
        if (oracle.contains("agent"))
            c.reward_oracle.agent = agent_from_json(oracle["agent"], AgentRole::reviser);
        if (oracle.contains("extractor"))
            c.reward_oracle.extractor =
                extractor_rule_from_string(oracle["extractor"].get<std::string>());
    }

    if (j.contains("thresholds")) {
        const Json& t = j["thresholds"];
        c.pairing_threshold = t.value("pairing_threshold", c.pairing_threshold);
        c.min_gap = t.value("min_gap", c.min_gap);
        c.mars_k = t.value("mars_k", c.mars_k);
    }
    if (j.contains("rates")) {
        const Json& r = j["rates"];
        c.single_turn_rate = r.value("single_turn_rate", c.single_turn_rate);
        if (r.contains("masking"))
            c.masking = masking_mode_from_string(r["masking"].get<std::string>());
    }
    if (j.contains("pairing_policy"))
        c.pairing_policy = pairing_policy_from_string(j["pairing_policy"].get<std::string>());
    c.seed = j.value("seed", std::uint64_t{0});
    c.concurrency_limit = j.value("concurrency_limit", c.concurrency_limit);
    c.allow_non_faithful = j.value("allow_non_faithful", false);
    c.designated_generator = j.value("designated_generator", std::string{});
    if (j.contains("retry")) {
        const Json& r = j["retry"];
        c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
        if (r.contains("backoff_ms")) {
            c.retry.backoff.clear();
            for (const auto& ms : r["backoff_ms"])
                c.retry.backoff.emplace_back(ms.get<std::int64_t>());
        }
        c.retry.jitter = r.value("jitter", c.retry.jitter);
    }
    return c;
}

Json to_json(const PipelineConfig& c) {
    Json agents;
    agents["info_elicitor"] = agent_to_json(c.info_elicitor);
    agents["critics"] = Json::array();
    for (const auto& a : c.critics) agents["critics"].push_back(agent_to_json(a));
    agents["meta_judge"] = agent_to_json(c.meta_judge);
    agents["summarizer"] = agent_to_json(c.summarizer);
    agents["revisers"] = Json::array();
    for (const auto& a : c.revisers) agents["revisers"].push_back(agent_to_json(a));
    Json oracle;
    oracle["kind"] = c.reward_oracle.kind;
    if (c.reward_oracle.agent) oracle["agent"] = agent_to_json(*c.reward_oracle.agent);
    oracle["extractor"] = extractor_to_string(c.reward_oracle.extractor);
    agents["reward_oracle"] = std::move(oracle);

    Json j;
    j["run_dir"] = c.run_dir;
    j["inputs"] = Json{{"queries", c.queries_path}, {"candidates", c.candidates_path}};
    j["agents"] = std::move(agents);
    j["thresholds"] = Json{{"pairing_threshold", c.pairing_threshold},
                           {"min_gap", c.min_gap},
                           {"mars_k", c.mars_k}};
    j["rates"] =
        Json{{"single_turn_rate", c.single_turn_rate}, {"masking", to_string(c.masking)}};
    j["pairing_policy"] = to_string(c.pairing_policy);
    j["seed"] = c.seed;
    j["concurrency_limit"] = c.concurrency_limit;
    j["allow_non_faithful"] = c.allow_non_faithful;
    j["designated_generator"] = c.designated_generator;
    Json backoff = Json::array();
    for (const auto& ms : c.retry.backoff) backoff.push_back(ms.count());
    j["retry"] = Json{{"max_attempts", c.retry.max_attempts},
                      {"backoff_ms", std::move(backoff)},
                      {"jitter", c.retry.jitter}};
    return j;
}

PipelineConfig load_config(const std::string& path) {
    try {
        return config_from_json(parse_json(read_file(path)));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config ") + path + ": " + e.what());
    }
}

bool config_is_faithful(const PipelineConfig& c) {
    return c.critics.size() == 4 && c.revisers.size() == 4 &&
           c.pairing_threshold == kDefaultPairingThreshold && c.mars_k == kDefaultMarsRevisions &&
           c.single_turn_rate == kDefaultSingleTurnRate &&
           c.masking == MaskingMode::ci_once_per_2_epochs;
}

std::vector<std::string> validate_config(const PipelineConfig& c) {
    std::vector<std::string> errors;
    if (c.run_dir.empty()) errors.push_back("run_dir is empty");
    if (c.queries_path.empty()) errors.push_back("inputs.queries is empty");
    if (c.pairing_threshold < 0) errors.push_back("pairing_threshold must be >= 0");
    if (c.mars_k < 1) errors.push_back("mars_k must be >= 1");
    if (c.single_turn_rate < 0.0 || c.single_turn_rate > 1.0)
        errors.push_back("single_turn_rate must be in [0,1]");
    if (c.concurrency_limit < 1) errors.push_back("concurrency_limit must be >= 1");
    if (c.critics.size() < 2)
        errors.push_back("need at least 2 critics (quorum)");
    if (!c.allow_non_faithful && c.critics.size() != 4)
        errors.push_back("faithful mode requires exactly 4 critics (set allow_non_faithful to relax)");
    if (!c.allow_non_faithful && c.revisers.size() != 4)
        errors.push_back("faithful mode requires exactly 4 revisers (set allow_non_faithful to relax)");
    if (c.revisers.empty()) errors.push_back("need at least 1 reviser");
    if (c.reward_oracle.kind != "auto" && c.reward_oracle.kind != "model_scored" &&
        c.reward_oracle.kind != "exact_match")
        errors.push_back("reward_oracle.kind must be auto | model_scored | exact_match");
    if (c.reward_oracle.kind != "exact_match" && !c.reward_oracle.agent)
        errors.push_back("reward_oracle.agent is required unless kind is exact_match");

    std::set<std::string> ids;
    auto check_id = [&](const AgentSpec& spec, const char* slot) {
        if (spec.agent_id.empty()) errors.push_back(std::string(slot) + ": agent_id is empty");
        if (spec.agent_id == kSummaryEntryId)
            errors.push_back(std::string(slot) + ": agent_id \"summary\" is reserved");
        if (!ids.insert(spec.agent_id).second)
            errors.push_back("duplicate agent_id: " + spec.agent_id);
    };
    check_id(c.info_elicitor, "info_elicitor");
    for (const auto& a : c.critics) check_id(a, "critics");
    check_id(c.meta_judge, "meta_judge");
    check_id(c.summarizer, "summarizer");
    for (const auto& a : c.revisers) check_id(a, "revisers");
    return errors;
}

std::string config_digest(const PipelineConfig& config) {
    return to_hex16(fnv1a64(to_json(config).dump()));
}

// ---- runner ----

struct PipelineRunner::Impl {
    PipelineConfig config;
    RunManifest manifest;
    fs::path run_dir;
    int lock_fd = -1;

    fs::path state_dir() const { return run_dir / "state"; }
    fs::path raw_dir(const std::string& id) const { return run_dir / "raw" / id; }
    fs::path quarantine_dir() const { return run_dir / "quarantine"; }
    fs::path state_file(Stage stage, const std::string& id) const {
        return state_dir() / to_string(stage) / (id + ".json");
    }
    fs::path done_marker(Stage stage) const {
        return state_dir() / (std::string(to_string(stage)) + ".done");
    }
    fs::path manifest_path() const { return run_dir / "manifest.json"; }

    struct SampleRef {
        std::string sample_id;
        std::string query_id;
        std::string tier;
    };

    // -- small persistence helpers --

    void write_json(const fs::path& path, const Json& j) {
        write_file_atomic(path.string(), j.dump(2) + "\n");
    }

    Json read_json(const fs::path& path) { return parse_json(read_file(path.string())); }

    bool quarantined(const std::string& id) {
        return fs::exists(quarantine_dir() / (id + ".json"));
    }

    void quarantine(const std::string& id, Stage stage, const std::string& reason) {
        const fs::path path = quarantine_dir() / (id + ".json");
        const bool fresh = !fs::exists(path);  // reruns must not double-count
        write_json(path, Json{{"id", id}, {"stage", to_string(stage)}, {"reason", reason}});
        if (fresh) ++manifest.drop_report["quarantine:" + std::string(to_string(stage))];
    }

    bool sample_alive(const SampleRef& ref) {
        return !quarantined(ref.sample_id) && !quarantined(ref.query_id);
    }

    void save_manifest() { write_json(manifest_path(), to_json(manifest)); }

    void mark_done(Stage stage) {
        write_json(done_marker(stage), Json{{"stage", to_string(stage)}});
    }

    std::vector<SampleRef> load_index() {
        const fs::path path = state_dir() / "samples.json";
        if (!fs::exists(path)) throw StageError("missing prepare artifacts (state/samples.json)");
        std::vector<SampleRef> refs;
        const Json index = read_json(path);
        for (const auto& e : index) {
            refs.push_back({e.at("sample_id").get<std::string>(),
                            e.at("query_id").get<std::string>(),
                            e.at("tier").get<std::string>()});
        }
        return refs;
    }

    std::vector<std::string> alive_query_ids(const std::vector<SampleRef>& refs) {
        std::vector<std::string> qids;
        std::set<std::string> seen;
        for (const auto& ref : refs) {
            if (!seen.insert(ref.query_id).second) continue;
            if (!quarantined(ref.query_id)) qids.push_back(ref.query_id);
        }
        return qids;
    }

    Query load_query(const SampleRef& ref) {
        return query_from_json(read_json(state_file(Stage::prepare, ref.sample_id)).at("query"));
    }

    CrucialRaw load_crucial_raw(const std::string& query_id) {
        const Json j = read_json(state_file(Stage::crucial, query_id));
        return {j.at("raw").at("task").get<std::string>(),
                j.at("raw").at("criteria").get<std::string>(),
                j.at("raw").at("reference").get<std::string>()};
    }

    CritiqueSample load_sample(const SampleRef& ref, bool with_critiques) {
        const Json prep = read_json(state_file(Stage::prepare, ref.sample_id));
        CritiqueSample sample;
        sample.sample_id = ref.sample_id;
        sample.query = query_from_json(prep.at("query"));
        sample.response = response_from_json(prep.at("response"));
        sample.crucial_info =
            crucial_info_from_json(read_json(state_file(Stage::crucial, ref.query_id)).at("info"));
        if (with_critiques) {
            const Json crit = read_json(state_file(Stage::critique, ref.sample_id));
            for (const auto& cj : crit.at("critiques")) {
                AnalyticalCritique critique = critique_from_json(cj);
                sample.agent_critiques[critique.agent_id] = std::move(critique);
            }
        }
        return sample;
    }

    MetaOutcome load_meta(const std::string& sample_id, const CritiqueSample& sample) {
        const Json j = read_json(state_file(Stage::meta, sample_id));
        MetaOutcome meta;
        for (const auto& aj : j.at("annotated")) {
            MetaAnnotatedCritique annotated;
            const std::string agent_id = aj.at("agent_id").get<std::string>();
            annotated.base = sample.agent_critiques.at(agent_id);
            for (const auto& lj : aj.at("labels")) annotated.labels.push_back(meta_label_from_json(lj));
            annotated.accumulated_severity = aj.at("accumulated_severity").get<int>();
            meta.annotated.emplace(agent_id, std::move(annotated));
        }
        meta.unlabeled = j.value("unlabeled", std::vector<std::string>{});
        if (j.contains("raw"))
            for (const auto& [agent_id, md] : j["raw"].items())
                meta.raw[agent_id] = md.get<std::string>();
        return meta;
    }

    // -- stages --

    StageCounts do_prepare(Gateway&) {
        StageCounts counts;
        std::vector<Query> queries;
        std::set<std::string> seen_ids;
        for (const auto& line : split_lines(read_file(config.queries_path))) {
            if (trim(line).empty()) continue;
            queries.push_back(query_from_json(parse_json(line)));
        }
        std::map<std::string, std::vector<ScoredCandidate>> candidates;
        if (!config.candidates_path.empty()) {
            for (const auto& line : split_lines(read_file(config.candidates_path))) {
                if (trim(line).empty()) continue;
                const Json j = parse_json(line);
                candidates[j.at("query_id").get<std::string>()].push_back(
                    {j.at("text").get<std::string>(), j.at("generator_id").get<std::string>(),
                     j.at("reward_score").get<double>()});
            }
        }

        Json index = Json::array();
        for (const auto& query : queries) {
            ++counts.ingested;
            if (!seen_ids.insert(query.id).second) {
                quarantine(query.id + "#dup", Stage::prepare, "duplicate query id");
                ++counts.quarantined;
                continue;
            }
            ValidationResult valid = validate_query(query);
            if (!valid.ok()) {
                quarantine(query.id, Stage::prepare, valid.violations.front().detail);
                ++counts.quarantined;
                continue;
            }
            auto it = candidates.find(query.id);
            if (it == candidates.end()) {
                quarantine(query.id, Stage::prepare, "no candidate responses");
                ++counts.quarantined;
                continue;
            }
            const BinPolicy policy = query.task_family == TaskFamily::general
                                         ? BinPolicy::three_tier
                                         : BinPolicy::two_tier_reasoning;
            BinResult bins;
            try {
                bins = bin_responses(it->second, policy, config.min_gap,
                                     config.designated_generator);
            } catch (const Error& e) {
                quarantine(query.id, Stage::prepare, e.what());
                ++counts.quarantined;
                continue;
            }
            std::vector<std::pair<QualityTier, const ScoredCandidate*>> tiers;
            if (bins.triple) {
                tiers = {{QualityTier::low, &bins.triple->low},
                         {QualityTier::medium, &bins.triple->medium},
                         {QualityTier::high, &bins.triple->high}};
            } else {
                tiers = {{QualityTier::low, &bins.pair->low},
                         {QualityTier::high, &bins.pair->high}};
            }
            const LabelMode mode =
                query.task_family == TaskFamily::code ? LabelMode::code : LabelMode::prose;
            for (const auto& [tier, candidate] : tiers) {
                const std::string sample_id =
                    query.id + "__" + to_string(tier);
                EvaluatedResponse response;
                try {
                    LabeledText labeled = label_sentences(candidate->response_text, mode);
                    response.id = candidate->generator_id;
                    response.raw_text = candidate->response_text;
                    response.labeled_text = std::move(labeled.labeled_text);
                    response.sentence_spans = std::move(labeled.spans);
                    response.quality_tier = tier;
                    response.reward_score = candidate->reward_score;
                } catch (const Error& e) {
                    quarantine(sample_id, Stage::prepare, e.what());
                    continue;
                }
                ValidationResult check = validate_response(response);
                if (!check.ok()) {
                    quarantine(sample_id, Stage::prepare, check.violations.front().detail);
                    continue;
                }
                write_json(state_file(Stage::prepare, sample_id),
                           Json{{"sample_id", sample_id},
                                {"query", to_json(query)},
                                {"response", to_json(response)}});
                index.push_back(Json{{"sample_id", sample_id},
                                     {"query_id", query.id},
                                     {"tier", to_string(tier)}});
                ++counts.extra["samples"];
            }
            ++counts.emitted;
        }
        write_json(state_dir() / "samples.json", index);
        return counts;
    }

    StageCounts do_crucial(Gateway& gateway) {
        StageCounts counts;
        const auto refs = load_index();
        for (const auto& query_id : alive_query_ids(refs)) {
            ++counts.ingested;
            if (fs::exists(state_file(Stage::crucial, query_id))) {
                ++counts.resumed;
                ++counts.emitted;
                continue;
            }
            const SampleRef* first = nullptr;
            for (const auto& ref : refs)
                if (ref.query_id == query_id && !quarantined(ref.sample_id)) {
                    first = &ref;
                    break;
                }
            if (first == nullptr) {
                quarantine(query_id, Stage::crucial, "no live samples");
                ++counts.quarantined;
                continue;
            }
            const Query query = load_query(*first);
            try {
                CrucialOutcome outcome = generate_crucial_info(query, config.info_elicitor, gateway);
                const fs::path raw = raw_dir(query_id);
                write_file_atomic((raw / "task_description.md").string(),
                                  outcome.raw.task_markdown);
                write_file_atomic((raw / "criteria.md").string(), outcome.raw.criteria_markdown);
                write_file_atomic((raw / "reference.md").string(), outcome.raw.reference_markdown);
                write_json(state_file(Stage::crucial, query_id),
                           Json{{"query_id", query_id},
                                {"info", to_json(outcome.info)},
                                {"agent_calls", outcome.agent_calls},
                                {"raw", Json{{"task", outcome.raw.task_markdown},
                                             {"criteria", outcome.raw.criteria_markdown},
                                             {"reference", outcome.raw.reference_markdown}}}});
                ++counts.emitted;
            } catch (const StageError& e) {
                quarantine(query_id, Stage::crucial, e.what());
                ++counts.quarantined;
            }
        }
        return counts;
    }

    StageCounts do_critique(Gateway& gateway) {
        StageCounts counts;
        for (const auto& ref : load_index()) {
            if (!sample_alive(ref)) continue;
            ++counts.ingested;
            if (fs::exists(state_file(Stage::critique, ref.sample_id))) {
                ++counts.resumed;
                ++counts.emitted;
                continue;
            }
            CritiqueSample sample = load_sample(ref, false);
            CrucialRaw raw = load_crucial_raw(ref.query_id);
            try {
                CritiqueOutcome outcome = critique_with_agents(sample, raw, config.critics,
                                                               gateway, config.concurrency_limit);
                Json critiques = Json::array();
                for (const auto& [agent_id, critique] : outcome.critiques)
                    critiques.push_back(to_json(critique));
                Json failures = Json::object();
                for (const auto& [agent_id, reason] : outcome.failures) {
                    failures[agent_id] = reason;
                    ++counts.extra["agent_failures"];
                }
                for (const auto& [agent_id, md] : outcome.raw)
                    write_file_atomic((raw_dir(ref.sample_id) / ("critique_" + agent_id + ".md")).string(),
                                      md);
                counts.extra["dropped_acus"] += outcome.dropped_acus;
                write_json(state_file(Stage::critique, ref.sample_id),
                           Json{{"sample_id", ref.sample_id},
                                {"critiques", std::move(critiques)},
                                {"failures", std::move(failures)},
                                {"dropped_acus", outcome.dropped_acus}});
                ++counts.emitted;
            } catch (const StageError& e) {
                quarantine(ref.sample_id, Stage::critique, e.what());
                ++counts.quarantined;
            }
        }
        return counts;
    }

    StageCounts do_meta(Gateway& gateway) {
        StageCounts counts;
        for (const auto& ref : load_index()) {
            if (!sample_alive(ref) || !fs::exists(state_file(Stage::critique, ref.sample_id)))
                continue;
            ++counts.ingested;
            if (fs::exists(state_file(Stage::meta, ref.sample_id))) {
                ++counts.resumed;
                ++counts.emitted;
                continue;
            }
            CritiqueSample sample = load_sample(ref, true);
            CrucialRaw raw = load_crucial_raw(ref.query_id);
            try {
                MetaOutcome outcome = meta_classify(sample, raw, config.meta_judge, gateway);
                Json annotated = Json::array();
                for (const auto& [agent_id, a] : outcome.annotated) {
                    Json labels = Json::array();
                    for (const auto& label : a.labels) labels.push_back(to_json(label));
                    annotated.push_back(Json{{"agent_id", agent_id},
                                             {"labels", std::move(labels)},
                                             {"accumulated_severity", a.accumulated_severity}});
                }
                Json raw_md = Json::object();
                for (const auto& [agent_id, md] : outcome.raw) {
                    raw_md[agent_id] = md;
                    write_file_atomic((raw_dir(ref.sample_id) / ("meta_" + agent_id + ".md")).string(),
                                      md);
                }
                for (const auto& warning : outcome.warnings)
                    manifest.warnings.push_back(ref.sample_id + ": " + warning);
                counts.extra["unlabeled"] += static_cast<std::int64_t>(outcome.unlabeled.size());
                write_json(state_file(Stage::meta, ref.sample_id),
                           Json{{"sample_id", ref.sample_id},
                                {"annotated", std::move(annotated)},
                                {"unlabeled", outcome.unlabeled},
                                {"raw", std::move(raw_md)}});
                ++counts.emitted;
            } catch (const StageError& e) {
                quarantine(ref.sample_id, Stage::meta, e.what());
                ++counts.quarantined;
            }
        }
        write_severity_histogram();
        return counts;
    }

    void write_severity_histogram() {
        std::array<std::int64_t, 7> histogram{};
        for (const auto& ref : load_index()) {
            const fs::path path = state_file(Stage::meta, ref.sample_id);
            if (!fs::exists(path)) continue;
            const Json state = read_json(path);
            for (const auto& aj : state.at("annotated"))
                for (const auto& lj : aj.at("labels"))
                    ++histogram[static_cast<std::size_t>(
                        quality_category_from_string(lj.at("category").get<std::string>()))];
        }
        std::vector<std::string> lines;
        for (std::size_t i = 0; i < histogram.size(); ++i) {
            const auto category = static_cast<QualityCategory>(i);
            lines.push_back(to_jsonl_line(Json{{"category", to_string(category)},
                                               {"weight", severity_of(category)},
                                               {"count", histogram[i]}}));
        }
        emit_jsonl(lines, (state_dir() / "severity_histogram.jsonl").string());
    }

    StageCounts do_summarize(Gateway& gateway) {
        StageCounts counts;
        for (const auto& ref : load_index()) {
            if (!sample_alive(ref) || !fs::exists(state_file(Stage::meta, ref.sample_id)))
                continue;
            ++counts.ingested;
            if (fs::exists(state_file(Stage::summarize, ref.sample_id))) {
                ++counts.resumed;
                ++counts.emitted;
                continue;
            }
            CritiqueSample sample = load_sample(ref, true);
            CrucialRaw raw = load_crucial_raw(ref.query_id);
            MetaOutcome meta = load_meta(ref.sample_id, sample);
            try {
                SummarizeOutcome outcome = summarize(sample, raw, meta, config.summarizer, gateway);
                for (const auto& warning : outcome.warnings)
                    manifest.warnings.push_back(ref.sample_id + ": " + warning);
                write_file_atomic((raw_dir(ref.sample_id) / "summary.md").string(),
                                  outcome.final.raw_markdown);
                write_json(state_file(Stage::summarize, ref.sample_id), to_json(outcome.final));
                ++counts.emitted;
            } catch (const StageError& e) {
                quarantine(ref.sample_id, Stage::summarize, e.what());
                ++counts.quarantined;
            }
        }
        return counts;
    }

    StageCounts do_pair(Gateway&) {
        StageCounts counts;
        counts.extra["threshold"] = config.pairing_threshold;
        manifest.drop_report["no_pair"] = 0;  // recomputed wholesale each run
        for (const auto& ref : load_index()) {
            if (!sample_alive(ref) || !fs::exists(state_file(Stage::summarize, ref.sample_id)))
                continue;
            ++counts.ingested;
            CritiqueSample sample = load_sample(ref, true);
            MetaOutcome meta = load_meta(ref.sample_id, sample);
            FinalCritique final_critique =
                final_critique_from_json(read_json(state_file(Stage::summarize, ref.sample_id)));

            CandidatePool pool;
            pool.sample_id = ref.sample_id;
            pool.entries.push_back(
                {kSummaryEntryId, 0, serialize_acus(final_critique.merged_acus)});
            for (const auto& [agent_id, annotated] : meta.annotated)
                pool.entries.push_back({agent_id, annotated.accumulated_severity,
                                        serialize_acus(annotated.base.acus)});

            std::vector<DraftPair> drafts;
            if (pool.entries.size() >= 2)
                drafts = pair_candidates(pool, config.pairing_threshold, config.pairing_policy);
            if (drafts.empty()) ++manifest.drop_report["no_pair"];
            counts.extra["pairs_drafted"] += static_cast<std::int64_t>(drafts.size());

            Json drafts_json = Json::array();
            for (const auto& draft : drafts) {
                drafts_json.push_back(Json{{"chosen_id", draft.chosen.id},
                                           {"chosen_severity", draft.chosen.severity},
                                           {"chosen_text", draft.chosen.acu_markdown},
                                           {"rejected_id", draft.rejected.id},
                                           {"rejected_severity", draft.rejected.severity},
                                           {"rejected_text", draft.rejected.acu_markdown}});
            }
            write_json(state_file(Stage::pair, ref.sample_id),
                       Json{{"sample_id", ref.sample_id}, {"drafts", std::move(drafts_json)}});
            ++counts.emitted;
        }
        return counts;
    }

    std::unique_ptr<RewardOracle> oracle_for(const Query& query, Gateway& gateway) {
        const OracleConfig& oc = config.reward_oracle;
        const bool exact = oc.kind == "exact_match" ||
                           (oc.kind == "auto" && query.task_family == TaskFamily::math &&
                            query.gold_answer.has_value());
        if (exact) {
            if (!query.gold_answer || trim(*query.gold_answer).empty()) return nullptr;
            return std::make_unique<ExactMatchOracle>(*query.gold_answer, oc.extractor);
        }
        if (!oc.agent) return nullptr;
        return std::make_unique<ModelScoredOracle>(gateway, *oc.agent);
    }

    StageCounts do_mars(Gateway& gateway) {
        StageCounts counts;
        for (const auto& ref : load_index()) {
            if (!sample_alive(ref) || !fs::exists(state_file(Stage::pair, ref.sample_id)))
                continue;
            ++counts.ingested;
            if (fs::exists(state_file(Stage::mars, ref.sample_id))) {
                ++counts.resumed;
                ++counts.emitted;
                continue;
            }
            const Json pair_state = read_json(state_file(Stage::pair, ref.sample_id));
            CritiqueSample sample = load_sample(ref, false);
            auto oracle = oracle_for(sample.query, gateway);

            MarsInputs inputs;
            inputs.query = &sample.query;
            inputs.labeled_response = &sample.response.labeled_text;
            inputs.conversation = format_conversation(sample.query);

            Json pairs = Json::array();
            for (const auto& dj : pair_state.at("drafts")) {
                DraftPair draft;
                draft.chosen = {dj.at("chosen_id").get<std::string>(),
                                dj.at("chosen_severity").get<int>(),
                                dj.at("chosen_text").get<std::string>()};
                draft.rejected = {dj.at("rejected_id").get<std::string>(),
                                  dj.at("rejected_severity").get<int>(),
                                  dj.at("rejected_text").get<std::string>()};
                PreferencePair pair;
                if (oracle == nullptr) {
                    // No usable oracle for this sample (e.g. missing gold
                    // answer): the pair stays unevaluated.
                    pair.sample_id = ref.sample_id;
                    pair.chosen_id = draft.chosen.id;
                    pair.rejected_id = draft.rejected.id;
                    pair.chosen_text = draft.chosen.acu_markdown;
                    pair.rejected_text = draft.rejected.acu_markdown;
                    pair.chosen_severity = draft.chosen.severity;
                    pair.rejected_severity = draft.rejected.severity;
                    pair.mars_verdict = MarsVerdict::unevaluated;
                    ++manifest.drop_report["mars_no_oracle"];
                } else {
                    pair = mars_filter(draft, ref.sample_id, inputs, config.revisers,
                                       config.mars_k, *oracle, gateway, config.concurrency_limit);
                }
                pairs.push_back(to_json(pair));
            }
            write_json(state_file(Stage::mars, ref.sample_id),
                       Json{{"sample_id", ref.sample_id}, {"pairs", std::move(pairs)}});
            ++counts.emitted;
        }
        tally_mars_verdicts(counts);
        return counts;
    }

    void tally_mars_verdicts(StageCounts& counts) {
        std::int64_t kept = 0, dropped = 0, unevaluated = 0;
        for (const auto& ref : load_index()) {
            const fs::path path = state_file(Stage::mars, ref.sample_id);
            if (!fs::exists(path)) continue;
            const Json state = read_json(path);
            for (const auto& pj : state.at("pairs")) {
                switch (mars_verdict_from_string(pj.at("mars_verdict").get<std::string>())) {
                    case MarsVerdict::kept: ++kept; break;
                    case MarsVerdict::dropped: ++dropped; break;
                    case MarsVerdict::unevaluated: ++unevaluated; break;
                }
            }
        }
        counts.extra["pairs_kept"] = kept;
        counts.extra["pairs_dropped"] = dropped;
        counts.extra["pairs_unevaluated"] = unevaluated;
        manifest.drop_report["mars_dropped"] = dropped;
        manifest.drop_report["mars_unevaluated"] = unevaluated;
    }

    StageCounts do_emit(Gateway&) {
        StageCounts counts;
        // Samples that made it through summarization, in index order.
        std::vector<SampleRef> alive;
        for (const auto& ref : load_index())
            if (sample_alive(ref) && fs::exists(state_file(Stage::summarize, ref.sample_id)))
                alive.push_back(ref);
        counts.ingested = static_cast<std::int64_t>(alive.size());

        // One designated (response, epoch) slot per query.
        std::map<std::string, std::vector<std::size_t>> per_query;
        for (std::size_t i = 0; i < alive.size(); ++i)
            per_query[alive[i].query_id].push_back(i);
        std::map<std::string, std::pair<std::size_t, int>> designation;  // query -> (pos, epoch)
        for (const auto& [query_id, positions] : per_query) {
            Rng rng(derive_seed(config.seed, "ci-mask:" + query_id));
            const std::uint64_t slot = rng.bounded(positions.size() * kMaskEpochs);
            designation[query_id] = {positions[slot / kMaskEpochs],
                                     static_cast<int>(slot % kMaskEpochs)};
        }

        const auto modes =
            select_template_modes(alive.size(), config.single_turn_rate, config.seed);
        std::vector<std::string> sft_lines;
        for (std::size_t i = 0; i < alive.size(); ++i) {
            const SampleRef& ref = alive[i];
            CritiqueSample sample = load_sample(ref, false);
            CrucialRaw raw = load_crucial_raw(ref.query_id);
            FinalCritique final_critique =
                final_critique_from_json(read_json(state_file(Stage::summarize, ref.sample_id)));
            const auto& [pos, epoch] = designation.at(ref.query_id);
            MaskSlot slot{pos == i, epoch};
            SftRecord record = assemble_sft(sample, raw, final_critique, modes[i],
                                            config.masking, slot);
            sft_lines.push_back(to_jsonl_line(to_json(record)));
        }
        EmitResult sft = emit_jsonl(sft_lines, (run_dir / "sft.jsonl").string());
        manifest.output_digests["sft.jsonl"] = sft.digest;
        manifest.output_counts["sft.jsonl"] = static_cast<std::int64_t>(sft.count);
        counts.extra["sft_records"] = static_cast<std::int64_t>(sft.count);
        if (sft.skipped) counts.extra["sft_skipped_digest_match"] = 1;

        std::vector<std::string> rl_lines;
        for (const auto& ref : alive) {
            const fs::path path = state_file(Stage::mars, ref.sample_id);
            if (!fs::exists(path)) continue;
            const Json prep = read_json(state_file(Stage::prepare, ref.sample_id));
            const Json crucial = read_json(state_file(Stage::crucial, ref.query_id));
            const Json mars_state = read_json(path);
            for (const auto& pj : mars_state.at("pairs")) {
                PreferencePair pair = preference_pair_from_json(pj);
                if (pair.mars_verdict != MarsVerdict::kept) continue;
                Json record;
                record["schema_version"] = kSchemaVersion;
                record["sample_id"] = pair.sample_id;
                record["query"] = prep.at("query");
                record["response"] = prep.at("response");
                record["crucial_info"] = crucial.at("info");
                record["chosen_text"] = pair.chosen_text;
                record["rejected_text"] = pair.rejected_text;
                record["chosen_severity"] = pair.chosen_severity;
                record["rejected_severity"] = pair.rejected_severity;
                record["mars_evidence"] = Json{{"chosen", pair.mars_evidence.chosen},
                                               {"rejected", pair.mars_evidence.rejected}};
                record["verdict"] = to_string(pair.mars_verdict);
                rl_lines.push_back(to_jsonl_line(record));
            }
        }
        EmitResult rl = emit_jsonl(rl_lines, (run_dir / "rl.jsonl").string());
        manifest.output_digests["rl.jsonl"] = rl.digest;
        manifest.output_counts["rl.jsonl"] = static_cast<std::int64_t>(rl.count);
        counts.extra["rl_records"] = static_cast<std::int64_t>(rl.count);
        if (rl.skipped) counts.extra["rl_skipped_digest_match"] = 1;

        counts.emitted = counts.ingested;
        return counts;
    }

    StageCounts do_verify(Gateway&) {
        StageCounts counts;
        save_manifest();  // verify reads the manifest from disk
        VerifyReport report = verify_run(run_dir.string());
        Json checks = Json::array();
        for (const auto& check : report.checks) {
            checks.push_back(
                Json{{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
            ++counts.extra[check.pass ? "checks_passed" : "checks_failed"];
        }
        write_json(state_dir() / "verify_report.json", checks);
        counts.ingested = static_cast<std::int64_t>(report.checks.size());
        counts.emitted = counts.ingested;
        if (!report.ok()) {
            for (const auto& check : report.checks)
                if (!check.pass)
                    throw StageError("verification failed: " + check.name + " (" + check.detail +
                                     ")");
        }
        return counts;
    }
};

PipelineRunner::PipelineRunner(PipelineConfig config) {
    auto errors = validate_config(config);
    if (!errors.empty()) {
        std::string joined;
        for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
        throw ConfigError("invalid config: " + joined);
    }
    impl_ = std::make_unique<Impl>();
    impl_->config = config;
    impl_->run_dir = config.run_dir;

    gateway_ = std::make_unique<Gateway>(config.retry, config.seed);
    std::set<std::string> mock_endpoints;
    auto collect = [&](const AgentSpec& spec) {
        if (is_mock_endpoint(spec.endpoint)) mock_endpoints.insert(spec.endpoint);
    };
    collect(config.info_elicitor);
    for (const auto& a : config.critics) collect(a);
    collect(config.meta_judge);
    collect(config.summarizer);
    for (const auto& a : config.revisers) collect(a);
    if (config.reward_oracle.agent) collect(*config.reward_oracle.agent);
    for (const auto& endpoint : mock_endpoints)
        gateway_->register_mock(endpoint, make_mock_transport(endpoint, config.seed));
}

PipelineRunner::~PipelineRunner() {
    if (impl_ && impl_->lock_fd >= 0) {
        ::close(impl_->lock_fd);
        std::error_code ec;
        fs::remove(impl_->run_dir / ".lock", ec);
    }
}

RunManifest PipelineRunner::run(std::vector<Stage> stages) {
    Impl& impl = *impl_;
    if (stages.empty())
        stages.assign(kStageOrder.begin(), kStageOrder.end());
    std::sort(stages.begin(), stages.end(), [](Stage a, Stage b) {
        return static_cast<int>(a) < static_cast<int>(b);
    });
    stages.erase(std::unique(stages.begin(), stages.end()), stages.end());

    fs::create_directories(impl.run_dir);
    fs::create_directories(impl.state_dir());
    fs::create_directories(impl.quarantine_dir());
    for (Stage stage : kStageOrder) fs::create_directories(impl.state_dir() / to_string(stage));

    // One driver per run directory.
    const fs::path lock_path = impl.run_dir / ".lock";
    impl.lock_fd = ::open(lock_path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (impl.lock_fd < 0)
        throw LockError("run directory is locked (" + lock_path.string() +
                        " exists); another driver may be active");

    try {
        if (fs::exists(impl.manifest_path()))
            impl.manifest = manifest_from_json(impl.read_json(impl.manifest_path()));
        impl.manifest.run_id = impl.run_dir.filename().string();
        impl.manifest.config_digest = config_digest(impl.config);
        impl.manifest.seed = impl.config.seed;
        impl.manifest.tool_version = kToolVersion;
        impl.manifest.faithful = config_is_faithful(impl.config);

        std::set<Stage> requested(stages.begin(), stages.end());
        std::set<Stage> completed_now;
        for (Stage stage : kStageOrder) {
            if (!requested.count(stage)) continue;
            // Every earlier stage must have run before, or be about to run
            // in this same invocation.
            for (Stage prior : kStageOrder) {
                if (prior == stage) break;
                if (!completed_now.count(prior) && !fs::exists(impl.done_marker(prior)))
                    throw StageError("stage " + std::string(to_string(stage)) +
                                     " requires completed stage " + to_string(prior));
            }
            StageCounts counts;
            switch (stage) {
                case Stage::prepare: counts = impl.do_prepare(*gateway_); break;
                case Stage::crucial: counts = impl.do_crucial(*gateway_); break;
                case Stage::critique: counts = impl.do_critique(*gateway_); break;
                case Stage::meta: counts = impl.do_meta(*gateway_); break;
                case Stage::summarize: counts = impl.do_summarize(*gateway_); break;
                case Stage::pair: counts = impl.do_pair(*gateway_); break;
                case Stage::mars: counts = impl.do_mars(*gateway_); break;
                case Stage::emit: counts = impl.do_emit(*gateway_); break;
                case Stage::verify: counts = impl.do_verify(*gateway_); break;
            }
            impl.manifest.stages[to_string(stage)] = counts;
            impl.mark_done(stage);
            impl.save_manifest();
            completed_now.insert(stage);
        }
    } catch (...) {
        impl.save_manifest();
        ::close(impl.lock_fd);
        impl.lock_fd = -1;
        std::error_code ec;
        fs::remove(impl.run_dir / ".lock", ec);
        throw;
    }
    ::close(impl.lock_fd);
    impl.lock_fd = -1;
    std::error_code ec;
    fs::remove(impl.run_dir / ".lock", ec);
    return impl.manifest;
}

RunManifest PipelineRunner::run_all(PipelineConfig config) {
    PipelineRunner runner(std::move(config));
    return runner.run({});
}

// ---- report ----

std::string report_text(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw Error("no manifest in " + run_dir);
    RunManifest manifest;
    try {
        manifest = manifest_from_json(parse_json(read_file(manifest_path.string())));
    } catch (const std::exception& e) {
        throw Error("corrupt manifest: " + std::string(e.what()));
    }

    std::ostringstream out;
    out << "run " << manifest.run_id << "  (config " << manifest.config_digest << ", seed "
        << manifest.seed << ", tool " << manifest.tool_version << ", "
        << (manifest.faithful ? "faithful" : "NON-FAITHFUL") << ")\n\n";

    out << "stages:\n";
    for (Stage stage : kStageOrder) {
        auto it = manifest.stages.find(to_string(stage));
        if (it == manifest.stages.end()) continue;
        const StageCounts& c = it->second;
        out << "  " << to_string(stage) << ": ingested " << c.ingested << ", emitted "
            << c.emitted << ", quarantined " << c.quarantined;
        if (c.resumed > 0) out << ", resumed " << c.resumed;
        for (const auto& [key, value] : c.extra) out << ", " << key << " " << value;
        out << "\n";
    }

    if (!manifest.drop_report.empty()) {
        out << "\ndrop report:\n";
        for (const auto& [reason, count] : manifest.drop_report)
            out << "  " << reason << ": " << count << "\n";
    }

    const fs::path quarantine_dir = dir / "quarantine";
    std::vector<std::string> entries;
    if (fs::exists(quarantine_dir)) {
        for (const auto& entry : fs::directory_iterator(quarantine_dir)) {
            const Json j = parse_json(read_file(entry.path().string()));
            entries.push_back(j.at("id").get<std::string>() + " (" +
                              j.at("stage").get<std::string>() + "): " +
                              j.at("reason").get<std::string>());
        }
    }
    std::sort(entries.begin(), entries.end());
    if (!entries.empty()) {
        out << "\nquarantined (" << entries.size() << "):\n";
        for (const auto& entry : entries) out << "  " << entry << "\n";
    }

    if (!manifest.output_digests.empty()) {
        out << "\noutputs:\n";
        for (const auto& [name, digest] : manifest.output_digests) {
            out << "  " << name << ": " << manifest.output_counts[name] << " records, digest "
                << digest << "\n";
        }
    }
    if (!manifest.warnings.empty()) {
        out << "\nwarnings (" << manifest.warnings.size() << "):\n";
        for (const auto& warning : manifest.warnings) out << "  " << warning << "\n";
    }
    return out.str();
}

// ---- verify ----

namespace {

void add_check(VerifyReport& report, const std::string& name, bool pass,
               const std::string& detail) {
    report.checks.push_back({name, pass, detail});
}

}  // namespace

VerifyReport verify_run(const std::string& run_dir) {
    VerifyReport report;
    const fs::path dir(run_dir);

    RunManifest manifest;
    try {
        manifest = manifest_from_json(parse_json(read_file((dir / "manifest.json").string())));
        add_check(report, "manifest-parse", true, "");
    } catch (const std::exception& e) {
        add_check(report, "manifest-parse", false, e.what());
        return report;
    }

    const auto reconcile = manifest_reconciliation_errors(manifest);
    add_check(report, "counts-reconcile", reconcile.empty(),
              reconcile.empty() ? "" : reconcile.front());

    std::int64_t threshold = kDefaultPairingThreshold;
    if (auto it = manifest.stages.find("pair"); it != manifest.stages.end()) {
        if (auto t = it->second.extra.find("threshold"); t != it->second.extra.end())
            threshold = t->second;
    }

    for (const auto& name : {std::string("sft.jsonl"), std::string("rl.jsonl")}) {
        auto it = manifest.output_digests.find(name);
        if (it == manifest.output_digests.end()) continue;
        const fs::path path = dir / name;
        if (!fs::exists(path)) {
            add_check(report, name + "-digest", false, "file missing");
            continue;
        }
        const std::string digest = to_hex16(fnv1a64(read_file(path.string())));
        add_check(report, name + "-digest", digest == it->second,
                  digest == it->second ? "" : "digest drift: " + digest + " != " + it->second);
    }

    // SFT records re-parse and mask invariants hold.
    const fs::path sft_path = dir / "sft.jsonl";
    if (fs::exists(sft_path)) {
        std::size_t bad = 0, records = 0;
        std::string first_error;
        for (const auto& line : split_lines(read_file(sft_path.string()))) {
            if (trim(line).empty()) continue;
            ++records;
            try {
                SftRecord record = sft_record_from_json(parse_json(line));
                bool any_trainable = false;
                std::size_t assistant_turns = 0;
                for (const auto& msg : record.messages) {
                    if (msg.train_mask == 1) any_trainable = true;
                    if (msg.role == "assistant") ++assistant_turns;
                }
                if (!any_trainable) throw Error("no trainable message");
                if (record.epoch_mask_plan.size() != kMaskEpochs)
                    throw Error("bad epoch_mask_plan length");
                if (record.template_mode == TemplateMode::multi_turn && assistant_turns != 4)
                    throw Error("multi_turn record with " + std::to_string(assistant_turns) +
                                " assistant turns");
                if (record.template_mode == TemplateMode::single_turn && assistant_turns != 1)
                    throw Error("single_turn record with " + std::to_string(assistant_turns) +
                                " assistant turns");
            } catch (const std::exception& e) {
                if (bad == 0) first_error = e.what();
                ++bad;
            }
        }
        add_check(report, "sft-schema", bad == 0,
                  bad == 0 ? std::to_string(records) + " records"
                           : std::to_string(bad) + " bad records; first: " + first_error);
    }

    // RL records re-parse and both gates hold on every kept pair.
    const fs::path rl_path = dir / "rl.jsonl";
    if (fs::exists(rl_path)) {
        std::size_t bad = 0, records = 0;
        std::string first_error;
        std::vector<double> severity_gaps, mean_gaps;
        for (const auto& line : split_lines(read_file(rl_path.string()))) {
            if (trim(line).empty()) continue;
            ++records;
            try {
                const Json j = parse_json(line);
                query_from_json(j.at("query"));
                response_from_json(j.at("response"));
                crucial_info_from_json(j.at("crucial_info"));
                const auto verdict = mars_verdict_from_string(j.at("verdict").get<std::string>());
                if (verdict != MarsVerdict::kept) throw Error("non-kept pair emitted");
                const int chosen_severity = j.at("chosen_severity").get<int>();
                const int rejected_severity = j.at("rejected_severity").get<int>();
                if (rejected_severity - chosen_severity <= threshold)
                    throw Error("severity gap " +
                                std::to_string(rejected_severity - chosen_severity) +
                                " not above threshold " + std::to_string(threshold));
                const auto chosen = j.at("mars_evidence").at("chosen").get<std::vector<double>>();
                const auto rejected =
                    j.at("mars_evidence").at("rejected").get<std::vector<double>>();
                if (chosen.empty() || rejected.empty()) throw Error("missing mars evidence");
                double chosen_mean = 0.0, rejected_mean = 0.0;
                for (double v : chosen) chosen_mean += v;
                for (double v : rejected) rejected_mean += v;
                chosen_mean /= static_cast<double>(chosen.size());
                rejected_mean /= static_cast<double>(rejected.size());
                if (!(chosen_mean > rejected_mean)) throw Error("mean dominance violated");
                severity_gaps.push_back(rejected_severity - chosen_severity);
                mean_gaps.push_back(chosen_mean - rejected_mean);
            } catch (const std::exception& e) {
                if (bad == 0) first_error = e.what();
                ++bad;
            }
        }
        add_check(report, "rl-schema-and-gates", bad == 0,
                  bad == 0 ? std::to_string(records) + " pairs"
                           : std::to_string(bad) + " bad pairs; first: " + first_error);

        // Diagnostic only: rank agreement between the two quality signals.
        if (severity_gaps.size() >= 2) {
            try {
                const double rho = spearman(severity_gaps, mean_gaps);
                add_check(report, "diag-severity-vs-reward-spearman", true,
                          "rho=" + std::to_string(rho));
            } catch (const Error&) {
                add_check(report, "diag-severity-vs-reward-spearman", true, "undefined (ties)");
            }
        }
    }
    return report;
}

std::string verify_report_text(const VerifyReport& report) {
    std::ostringstream out;
    for (const auto& check : report.checks) {
        out << (check.pass ? "PASS  " : "FAIL  ") << check.name;
        if (!check.detail.empty()) out << "  (" << check.detail << ")";
        out << "\n";
    }
    out << (report.ok() ? "verification passed" : "verification FAILED") << "\n";
    return out.str();
}

}  // namespace mc
