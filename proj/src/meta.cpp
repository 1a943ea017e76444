#include "mc/meta.hpp"

#include "mc/common.hpp"
#include "mc/parsers.hpp"

namespace mc {

int accumulate_severity(const std::vector<MetaLabel>& labels) {
    int total = 0;
    for (const auto& label : labels) total += severity_of(label.category);
    return total;
}

namespace {

std::vector<std::pair<std::string, std::string>> critique_blocks(const CritiqueSample& sample) {
    std::vector<std::pair<std::string, std::string>> blocks;
    for (const auto& [agent_id, critique] : sample.agent_critiques)
        blocks.emplace_back(agent_id, critique.raw_markdown);
    return blocks;
}

}  // namespace

MetaOutcome meta_classify(const CritiqueSample& sample, const CrucialRaw& raw,
                          const AgentSpec& judge, Gateway& gateway) {
    if (sample.agent_critiques.size() < 2)
        throw StageError("meta_classify: need at least 2 agent critiques");
    if (!sample.crucial_info) throw StageError("meta_classify: sample has no crucial info");

    Bindings bindings = make_chain_bindings(sample.query, raw, sample.response.labeled_text);
    bindings["all_critiques"] = render_critiques_block(critique_blocks(sample));

    MetaOutcome out;
    for (const auto& [agent_id, critique] : sample.agent_critiques) {
        bindings["target_agent_id"] = agent_id;
        const auto messages = render_prompt(TemplateId::meta_critique, bindings);

        std::vector<MetaLabel> labels;
        bool aligned = false;
        for (int attempt = 0; attempt < 2 && !aligned; ++attempt) {
            ChatRequest request;
            request.template_id = TemplateId::meta_critique;
            request.messages = messages;
            ChatResult result = gateway.complete(judge, std::move(request));
            if (!result.ok()) {
                out.warnings.push_back("meta call failed for " + agent_id + ": " + result.error);
                continue;
            }
            out.raw[agent_id] = result.response.content;
            try {
                labels = parse_meta_labels(result.response.content);
            } catch (const ParseError& e) {
                out.warnings.push_back("meta parse failed for " + agent_id + ": " + e.what());
                continue;
            }
            if (labels.size() == critique.acus.size()) {
                aligned = true;
            } else if (labels.size() == critique.acus.size() + 1) {
                // The one observed repairable mismatch: a duplicated tail.
                labels.pop_back();
                out.warnings.push_back("dropped extra trailing analysis entry for " + agent_id);
                aligned = true;
            }
        }
        if (!aligned) {
            out.unlabeled.push_back(agent_id);
            continue;
        }
        MetaAnnotatedCritique annotated{critique, std::move(labels), 0};
        annotated.accumulated_severity = accumulate_severity(annotated.labels);
        out.annotated.emplace(agent_id, std::move(annotated));
    }
    return out;
}

SummarizeOutcome summarize(const CritiqueSample& sample, const CrucialRaw& raw,
                           const MetaOutcome& meta, const AgentSpec& summarizer,
                           Gateway& gateway) {
    if (!sample.crucial_info) throw StageError("summarize: sample has no crucial info");
    Bindings bindings = make_chain_bindings(sample.query, raw, sample.response.labeled_text);
    bindings["all_critiques"] = render_critiques_block(critique_blocks(sample));

    std::vector<std::pair<std::string, std::string>> analyses;
    for (const auto& [agent_id, markdown] : meta.raw) analyses.emplace_back(agent_id, markdown);
    bindings["all_meta"] = render_meta_block(analyses);

    const auto messages = render_prompt(TemplateId::summarize, bindings);
    SummarizeOutcome out;
    std::string last_error;
    bool parsed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        ChatRequest request;
        request.template_id = TemplateId::summarize;
        request.messages = messages;
        ChatResult result = gateway.complete(summarizer, std::move(request));
        if (!result.ok()) {
            last_error = result.error;
            continue;
        }
        try {
            out.final = parse_final_critique(result.response.content, sample.response,
                                             sample.crucial_info->criteria);
            parsed = true;
        } catch (const ParseError& e) {
            last_error = e.what();
        }
    }
    if (!parsed) throw StageError("summarize failed after retry: " + last_error);

    // Flag merged ACUs the judge had marked as false negatives (L1).
    for (const auto& merged : out.final.merged_acus) {
        for (const auto& [agent_id, annotated] : meta.annotated) {
            for (std::size_t i = 0; i < annotated.base.acus.size(); ++i) {
                const Acu& context_acu = annotated.base.acus[i];
                if (context_acu.citations != merged.citations) continue;
                if (normalize_name(context_acu.criterion_name) !=
                    normalize_name(merged.criterion_name))
                    continue;
                if (annotated.labels[i].category == QualityCategory::L1) {
                    out.warnings.push_back("retained-flagged-ACU: " + merged.criterion_name +
                                           " cited by " + agent_id);
                }
            }
        }
    }
    return out;
}

}  // namespace mc
