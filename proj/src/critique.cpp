#include "mc/critique.hpp"

#include "mc/common.hpp"
#include "mc/parsers.hpp"
#include "mc/validate.hpp"

namespace mc {

namespace {

std::string call_or_throw(Gateway& gateway, const AgentSpec& spec, TemplateId id,
                          const Bindings& bindings, const char* stage) {
    ChatRequest request;
    request.template_id = id;
    request.messages = render_prompt(id, bindings);
    ChatResult result = gateway.complete(spec, std::move(request));
    if (!result.ok())
        throw StageError(std::string(stage) + " call failed: " + result.error);
    return result.response.content;
}

}  // namespace

CrucialOutcome generate_crucial_info(const Query& query, const AgentSpec& elicitor,
                                     Gateway& gateway) {
    CrucialOutcome out;
    const std::string conversation = format_conversation(query);
    const std::string user_criteria = query.user_criteria.value_or("");

    Bindings bindings{{"conversation", conversation}};
    out.raw.task_markdown =
        call_or_throw(gateway, elicitor, TemplateId::task_description, bindings, "task-description");
    ++out.agent_calls;
    try {
        out.info.task_description = parse_task_description(out.raw.task_markdown);
    } catch (const ParseError& e) {
        throw StageError(std::string("task-description parse failed: ") + e.what());
    }

    bindings["task_description_output"] = out.raw.task_markdown;
    bindings["user_pre_defined_criteria"] = user_criteria;
    for (int attempt = 0;; ++attempt) {
        out.raw.criteria_markdown =
            call_or_throw(gateway, elicitor, TemplateId::criteria, bindings, "criteria");
        ++out.agent_calls;
        try {
            out.info.criteria = parse_criteria(out.raw.criteria_markdown);
        } catch (const ParseError& e) {
            if (attempt == 0) continue;  // retry once
            throw StageError(std::string("criteria parse failed: ") + e.what());
        }
        ValidationResult check = validate_criteria(out.info.criteria);
        if (check.ok()) break;
        if (attempt > 0)
            throw StageError("criteria failed validation after retry: " +
                             check.violations.front().detail);
    }

    if (query.task_family == TaskFamily::general) {
        bindings["criteria_output"] = out.raw.criteria_markdown;
        out.raw.reference_markdown =
            call_or_throw(gateway, elicitor, TemplateId::reference, bindings, "reference");
        ++out.agent_calls;
        out.info.reference_response = trim(out.raw.reference_markdown);
        if (out.info.reference_response.empty())
            throw StageError("reference call returned empty text");
    } else {
        // Math and code skip the reference call; critics get the empty string.
        out.info.reference_response.clear();
        out.raw.reference_markdown.clear();
    }
    return out;
}

Bindings make_chain_bindings(const Query& query, const CrucialRaw& raw,
                             const std::string& labeled_response) {
    return {
        {"conversation", format_conversation(query)},
        {"task_description_output", raw.task_markdown},
        {"user_pre_defined_criteria", query.user_criteria.value_or("")},
        {"criteria_output", raw.criteria_markdown},
        {"reference_output", raw.reference_markdown},
        {"evaluated_response", labeled_response},
    };
}

CritiqueOutcome critique_with_agents(const CritiqueSample& sample, const CrucialRaw& raw,
                                     const std::vector<AgentSpec>& critics, Gateway& gateway,
                                     int limit) {
    if (!sample.crucial_info)
        throw StageError("critique_with_agents: sample has no crucial info");
    const Bindings bindings =
        make_chain_bindings(sample.query, raw, sample.response.labeled_text);
    const auto messages = render_prompt(TemplateId::critique, bindings);

    std::vector<Gateway::Job> jobs;
    jobs.reserve(critics.size());
    for (const auto& critic : critics) {
        ChatRequest request;
        request.template_id = TemplateId::critique;
        request.messages = messages;
        jobs.push_back({critic, std::move(request)});
    }
    const auto results = gateway.complete_many(std::move(jobs), limit);

    CritiqueOutcome out;
    for (std::size_t i = 0; i < critics.size(); ++i) {
        const std::string& agent_id = critics[i].agent_id;
        if (!results[i].ok()) {
            out.failures[agent_id] = results[i].error;
            continue;
        }
        const std::string& markdown = results[i].response.content;
        out.raw[agent_id] = markdown;
        try {
            ParsedAcus parsed =
                parse_acus(markdown, sample.response, sample.crucial_info->criteria);
            out.dropped_acus += parsed.dropped;
            out.critiques[agent_id] = {agent_id, std::move(parsed.acus), markdown};
        } catch (const EmptyCritiqueError& e) {
            out.failures[agent_id] = e.what();
        }
    }
    if (out.critiques.size() < kCritiqueQuorum)
        throw StageError("only " + std::to_string(out.critiques.size()) +
                         " critiques parsed; quorum is " + std::to_string(kCritiqueQuorum));
    return out;
}

}  // namespace mc
