#include "mc/emitter.hpp"

#include <cmath>

#include "mc/common.hpp"
#include "mc/prompts.hpp"

namespace mc {

const char* to_string(TemplateMode m) {
    return m == TemplateMode::single_turn ? "single_turn" : "multi_turn";
}

const char* to_string(MaskingMode m) {
    return m == MaskingMode::always ? "always" : "ci_once_per_2_epochs";
}

TemplateMode template_mode_from_string(const std::string& s) {
    if (s == "single_turn") return TemplateMode::single_turn;
    if (s == "multi_turn") return TemplateMode::multi_turn;
    throw ParseError("unknown template_mode: " + s);
}

MaskingMode masking_mode_from_string(const std::string& s) {
    if (s == "ci_once_per_2_epochs") return MaskingMode::ci_once_per_2_epochs;
    if (s == "always") return MaskingMode::always;
    throw ParseError("unknown masking mode: " + s);
}

std::vector<TemplateMode> select_template_modes(std::size_t n, double single_rate,
                                                std::uint64_t seed) {
    if (single_rate < 0.0 || single_rate > 1.0)
        throw ConfigError("single_rate must be in [0,1]");
    const auto singles = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * single_rate + 0.5));  // round half up
    std::vector<TemplateMode> modes(n, TemplateMode::multi_turn);
    for (std::size_t i = 0; i < singles && i < n; ++i) modes[i] = TemplateMode::single_turn;
    Rng rng(derive_seed(seed, "template-modes"));
    rng.shuffle(modes);
    return modes;
}

Json to_json(const SftRecord& record) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["sample_id"] = record.sample_id;
    j["template_mode"] = to_string(record.template_mode);
    Json msgs = Json::array();
    for (const auto& m : record.messages)
        msgs.push_back({{"role", m.role}, {"content", m.content}, {"train_mask", m.train_mask}});
    j["messages"] = std::move(msgs);
    j["epoch_mask_plan"] = record.epoch_mask_plan;
    return j;
}

SftRecord sft_record_from_json(const Json& j) {
    SftRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.template_mode = template_mode_from_string(j.at("template_mode").get<std::string>());
    for (const auto& m : j.at("messages")) {
        r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>(),
                              m.at("train_mask").get<int>()});
    }
    r.epoch_mask_plan = j.at("epoch_mask_plan").get<std::vector<int>>();
    return r;
}

SftRecord assemble_sft(const CritiqueSample& sample, const CrucialRaw& raw,
                       const FinalCritique& final_critique, TemplateMode mode,
                       MaskingMode masking, MaskSlot slot, int epochs) {
    if (!sample.crucial_info) throw StageError("assemble_sft: sample has no crucial info");

    SftRecord record;
    record.sample_id = sample.sample_id;
    record.template_mode = mode;

    const bool ci_trains = masking == MaskingMode::always || slot.designated;
    record.epoch_mask_plan.assign(static_cast<std::size_t>(epochs), 0);
    if (masking == MaskingMode::always) {
        record.epoch_mask_plan.assign(static_cast<std::size_t>(epochs), 1);
    } else if (slot.designated) {
        if (slot.epoch < 0 || slot.epoch >= epochs)
            throw StageError("assemble_sft: designated epoch out of range");
        record.epoch_mask_plan[static_cast<std::size_t>(slot.epoch)] = 1;
    }

    if (mode == TemplateMode::multi_turn) {
        const Bindings bindings =
            make_chain_bindings(sample.query, raw, sample.response.labeled_text);
        const auto chain = render_prompt(TemplateId::critique, bindings);
        // chain = [user task, asst task, user criteria, asst criteria,
        //          user reference, asst reference, user critique]
        for (const auto& msg : chain) {
            const bool is_ci_turn = msg.role == "assistant";
            record.messages.push_back(
                {msg.role, msg.content, is_ci_turn && ci_trains ? 1 : 0});
        }
        record.messages.push_back({"assistant", final_critique.raw_markdown, 1});
    } else {
        std::string user = "Critique the evaluated response below. First give a task "
                           "description, two-tier evaluation criteria, and a reference "
                           "response; then list each flaw as a feedback entry; then summarize "
                           "per primary criterion and give a final judgement score from 1 to "
                           "10.\n\n";
        user += "# Conversation History\n---\n" + format_conversation(sample.query) + "\n---\n\n";
        user += "# Evaluated Response\n---\n" + sample.response.labeled_text + "\n---";
        std::string target = raw.task_markdown + "\n\n" + raw.criteria_markdown;
        if (!sample.crucial_info->reference_response.empty())
            target += "\n\n# Reference Response\n" + sample.crucial_info->reference_response;
        target += "\n\n" + final_critique.raw_markdown;
        record.messages.push_back({"user", std::move(user), 0});
        record.messages.push_back({"assistant", std::move(target), 1});
    }
    return record;
}

EmitResult emit_jsonl(const std::vector<std::string>& lines, const std::string& path) {
    std::string content;
    std::size_t total = 0;
    for (const auto& line : lines) total += line.size() + 1;
    content.reserve(total);
    for (const auto& line : lines) {
        content += line;
        content += '\n';
    }
    EmitResult result;
    result.count = lines.size();
    result.digest = to_hex16(fnv1a64(content));
    if (file_exists(path) && read_file(path) == content) {
        result.skipped = true;
        return result;
    }
    write_file_atomic(path, content);
    return result;
}

Json to_json(const RunManifest& manifest) {
    Json j;
    j["run_id"] = manifest.run_id;
    j["config_digest"] = manifest.config_digest;
    j["seed"] = manifest.seed;
    j["tool_version"] = manifest.tool_version;
    j["faithful"] = manifest.faithful;
    Json stages = Json::object();
    for (const auto& [name, counts] : manifest.stages) {
        Json s{{"ingested", counts.ingested},
               {"emitted", counts.emitted},
               {"quarantined", counts.quarantined},
               {"resumed", counts.resumed}};
        if (!counts.extra.empty()) s["extra"] = counts.extra;
        stages[name] = std::move(s);
    }
    j["stages"] = std::move(stages);
    j["drop_report"] = manifest.drop_report;
    j["output_digests"] = manifest.output_digests;
    j["output_counts"] = manifest.output_counts;
    j["warnings"] = manifest.warnings;
    return j;
}

RunManifest manifest_from_json(const Json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.faithful = j.at("faithful").get<bool>();
    for (const auto& [name, s] : j.at("stages").items()) {
        StageCounts counts;
        counts.ingested = s.at("ingested").get<std::int64_t>();
        counts.emitted = s.at("emitted").get<std::int64_t>();
        counts.quarantined = s.at("quarantined").get<std::int64_t>();
        counts.resumed = s.value("resumed", std::int64_t{0});
        if (s.contains("extra"))
            counts.extra = s["extra"].get<std::map<std::string, std::int64_t>>();
        m.stages[name] = std::move(counts);
    }
    m.drop_report = j.value("drop_report", std::map<std::string, std::int64_t>{});
    m.output_digests = j.value("output_digests", std::map<std::string, std::string>{});
    m.output_counts = j.value("output_counts", std::map<std::string, std::int64_t>{});
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
}

std::vector<std::string> manifest_reconciliation_errors(const RunManifest& manifest) {
    std::vector<std::string> errors;
    for (const auto& [name, counts] : manifest.stages) {
        if (counts.ingested != counts.emitted + counts.quarantined) {
            errors.push_back("stage " + name + ": ingested " + std::to_string(counts.ingested) +
                             " != emitted " + std::to_string(counts.emitted) + " + quarantined " +
                             std::to_string(counts.quarantined));
        }
    }
    return errors;
}

}  // namespace mc
