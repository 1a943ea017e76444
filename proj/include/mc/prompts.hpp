#pragma once

#include <map>
#include <string>
#include <vector>

namespace mc {

enum class TemplateId {
    task_description,
    criteria,
    reference,
    critique,
    meta_critique,
    summarize,
    revise,
    reward_score,
};

const char* to_string(TemplateId id);
TemplateId template_id_from_string(const std::string& s);

struct Message {
    std::string role;  // system | user | assistant
    std::string content;
};

using Bindings = std::map<std::string, std::string>;

// Builds the chat messages for one stage call. The elicitation templates
// form a running conversation: each stage appends the prior stages' prompts
// and outputs as context turns, so the required bindings grow along the
// chain (task_description_output, criteria_output, ...).
//
// Placeholders use single braces ("{evaluated_response}"); literal "{{...}}"
// sequences inside the templates are instructions to the agent and pass
// through untouched. Missing bindings raise an error listing every missing
// key.
std::vector<Message> render_prompt(TemplateId id, const Bindings& bindings);

// Required binding keys per template, in render order.
const std::vector<std::string>& required_bindings(TemplateId id);

// Joined block of all agents' critiques, used as chain context for the
// meta-judge and the summarizer.
std::string render_critiques_block(const std::vector<std::pair<std::string, std::string>>& critiques);

// Joined block of per-agent meta analyses for the summarizer context.
std::string render_meta_block(const std::vector<std::pair<std::string, std::string>>& analyses);

}  // namespace mc
