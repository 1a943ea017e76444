#include "mc/prompts.hpp"

#include "mc/common.hpp"

namespace mc {

namespace {

// Stage prompt texts. These are the operational templates the agents run
// against; parsers in parsers.cpp mirror their output sections.

constexpr const char* kTaskDescription =
    R"(Now, you are a helpful assistant aiming to provide valuable critiques and analysis for the previous conversation history, thereby assisting in the analysis of the quality of subsequent responses in relation to this conversation history history.

# Your Tasks
Analyze and describe the primary purpose of user's query in conversation history. Do NOT generate very lengthy description, keep it concise and precise.
If the conversation history contains multiple turns between assistant and human, MUST analyze the main purpose of the user's last query by considering the previous conversation history.

# Output Template
Generate the task description in following Markdown template. Do NOT add comment (//) in the template.
---
// a string for task description
# Task Description
A string analyze the attribute of the task
---)";

constexpr const char* kCriteria =
    R"(Now, you are a helpful assistant aiming to provide valuable critiques and analysis for the previous conversation history, thereby assisting in the analysis of the quality of subsequent responses in relation to this conversation history history.
Now, we have provided our criteria list (maybe empty) for you from different evaluation perspectives as below.
---
# Our Provided Criteria List
{user_pre_defined_criteria}
---

# Your Tasks
## Supplement and Decompose the Criteria
Generate the criteria list of the two-tier structure:
(1) The first-tier structure consists of primary criteria, i.e., the evaluation dimensions broadly conceptualized and distinct based on conversation history;
(2) The second-tier structure decomposes these primary evaluation dimensions into several fine-grained and precise criteria based on the information in conversation history.
Note that our provided criteria list are only the primary criteria list (first-tier) without the fine-grained criteria definition (second-tier).

### 2.1 If our provided criteria list is EMPTY

Please directly generate this two-tier criteria structure from scratch.
Do NOT generate redundant criteria; keep the final criteria precise, helpful, and concise.

### 2.2 If our provided criteria list is NOT EMPTY

Firstly, you should keep all our provided criteria as the primary criteria in your final output. You could expand other primary criteria not considered in our provided criteria but are essential for analyzing flaws in responses for previous conversation history.
1. But NEVER expand primary criteria that conflict with our provided criteria.
2. NEVER generate criteria that are redundant with our provided criteria.
3. Do NOT miss any criteria that exists in our provided criteria list.
Secondly, you should decompose these primary criteria into several fine-grained and precise criteria by considering the conversation history.

### 2.3 NOTICE!!!
Keep the number of all fine-grained criteria within 15, and each primary criterion includes no more than 3 fine-grained criteria.

# Output Template
Generate the task description in following Markdown template. Do NOT add comment (//) in the template.
---
# Two-tier Structure of Criteria
// a block for one primary criteria consisting of no more than 3 fine-grained criteria. Keep output following structure in order. Variable in `{{}}` should be replaced.
## {{Name of First Primary Criteria}}
// a string of the description and details of this first-tier primary criteria
Description: {{description}}

### {{Name of Fine-grained Criteria}}
// a string of the description and details of this second-tier fine-grained criteria
Description: {{description}}
// a word reflects the significance of fine-grained criteria, select degree from three types (least to most significance): (1) normal; (2) medium; (3) important
Degree: {{degree}}
...
---)";

constexpr const char* kReference =
    R"(# Task Goal
Good! Your task is to generate a high-quality response for the conversation history (before we provided the criteria list), which perfectly satisfies all the generated first-tier and second-tier criteria in last turn.

# NOTICE!!!
1. The conversation history here represents the conversations before we provided the criteria list. Do NOT respond to the last utterance.
2. Do NOT generate any explanation or analysis about your generated response.)";

constexpr const char* kCritique =
    R"(# Task Input
We provide the evaluated response that responds to the conversation history as below.
---
{evaluated_response}
---

## NOTICE!!!
1. The conversation history represents the conversations before we provided the criteria list.
2. The evaluated response contains citation symbols, like [S1] and [S2] ([S1] means sentence 1), which represent the ID of their preceding sentences and are helpful for our following analysis.
3. Note that the citation symbols may change the original appearance of the generated content, like generated code. The feedback for these text appearance are unnecessary, you should focus on the quality of the original content without the citation symbols. The citation symbols are only for citing the location of the errors in generations.

# Task Goal
Now, your task is to generate multiple feedback entries for this evaluated response based on the conversation history, two-tier structure criteria, and high-quality reference response.
Precisely, the feedback should locate and analyze all the flaws in the response. Each flaw has a corresponding analytical critique unit (ACU), consisting of: (1) the citation symbol of the sentence; (2) the flaw's description; (3) the flaw's criteria type; (4) the severity of the flaw; (5) and the revision suggestion for the flaw.

## Please Strictly Abide by Following Rules:
(1) Please Do NOT critique and analyze these citation symbols, like [S1] and [S2], since they only highlight its preceding sentence in the response;
(2) Do NOT critique and analyze the sentences that are free from any flaws;
(3) Each feedback entry contains only one criteria. **Do NOT add multiple criteria in one feedback entry. If you think the sentence have multiple flaws, please list them into multiple feedback entries.
(4) Each flaw in the feedback entry should follow one fine-grained second-tier criterion. Only select the primary first-tier criteria when all its second-tier fine-grained criteria are inappropriate.

# Output Format
Please answer in following Markdown format template. Do NOT add comment (//) in the template.
---
// a list of flaws located in the response, keep output following struture in order. Replace `{{}}` with your generations.
# List of Flaws in Response

## Feedback Entry 1
// Mark the location of the sentences that contain flaws with their corresponding citation symbols (like [S1] and [S2]). If the error spans multiple sentences, please output their related multiple citation symbols sequentially, like "[S1] [S2] [S3]".
Citation Symbol: {{citation_symbol}}
// a string describes the flaws
Description: {{description}}
// a string reflects the criteria for this flaw, which should be selected from the criteria defined above. Note that only one criteria is allowed for each feedback entry. Do NOT add multiple criteria in one feedback entry.
Belong to Criteria: {{criteria_name}}
// a string reflects the severity of this flaw. Select the severity of flaws from four types (least to most severe): (1) Negligible; (2) Minor; (3) Moderate; (4) Severe.
Severity: {{severity}}
// a revision suggestion for this flaw
Suggestion: {{suggestion}}
...
---)";

constexpr const char* kMetaCritique =
    R"(Good! Now, I want you to carefully re-check (meta-evaluation) each feedback entry generated by these models.

## Categories of Errors in Feedback Entries
Please carefully analyze each feedback entry in this list sequentially and categorize them into the following error types based on their errors:
E0. the feedback entry is helpful, perfect, and satisfying and accurately points out the flaw in the response, providing helpful suggestions for improvement.
E1. the cited sentence in the feedback entry is good without any flaws belonging to the mentioned criteria, and it should not be critiqued for the mentioned criteria.
E2. the cited sentence in the feedback entry has flaws belonging to the mentioned criteria, but the type of criteria is misclassified or does not exist in the previous criteria list.
E3. the severity of this flaw is misclassified.
E4. the description of this flaw is unreasonable and inaccurate.
E5. the suggestions for revising this flaw are unreasonable or introduce new problems.
E6. although revision suggestions for the flaw are reasonable without any problems, revision with suggestions will not necessarily improve the quality of the response.

## NOTICE!!!
1. Ensure the number of the generated analysis entries equals the number of feedback entries generated by the corresponding model. Do NOT miss any feedback entries for analysis.
2. If one feedback entry is similar to or the same as some analyzed feedback entries, Do NOT regard it as a redundant feedback entry (redundant error). Please evaluate this feedback entry by focusing on analyzing errors (E0 to E6) in the feedback entry content.

Please analyze each feedback entry one by one and sequentially, which will be used to summarize the final feedback generation.)";

// The meta prompt leaves the output shape open; this trailing block pins it
// down so the analyses can be parsed and aligned.
constexpr const char* kMetaOutputFormat =
    R"(The corresponding model to analyze now is: {target_agent_id}.

# Output Format
Please answer in following Markdown format template. Do NOT add comment (//) in the template.
---
# List of Analyses for Model {target_agent_id}

## Analysis Entry 1
// the error type of the corresponding feedback entry, one of E0 to E6
Category: {{category}}
// a string explaining this classification
Rationale: {{rationale}}
...
---)";

constexpr const char* kSummarize =
    R"(# Task Goal
Your goal is to summarize your final feedback entry list based on your meta-evaluation decisions. In your meta-evaluation decision, you have carefully analyzed all the feedback generated by various models and decided which feedback entries should be included in your final feedback entry list in the last conversation turn.

# Your Task
## 1. Reorganize the Helpful Feedback Entry List
Now, please reorganize the previous output and strictly abide by the following notes:
(1) Include all the feedback entries from all the models you think are helpful and have been considered "Yes" for inclusion. Do NOT miss any helpful and essential feedback entries;
(2) Appropriately summarize and consolidate multiple feedback entries with the same cited sentences from different models into one feedback entry. Ensure the summarized descriptions and suggestions contain helpful details in these multiple feedback entries. Also, ensure that the final feedback entry list does not have numerous feedback entries with duplicate content;
(3) If a flaw is labeled as E6 (not helpful for improvement) and the meta-evaluation acknowledges it, it is optional whether to remove this feedback entry based on your preference. Always remember your goal is to generate "helpful and valuable" feedback entries that are beneficial for refinement;
(4) If some problematic feedback entries (not labeled as E0 or the consideration is "No") could become more reasonable and valid after being revised according to your meta-evaluation description, and these feedback entries have not been considered in other helpful feedback entries, please also revise these feedback entries and supplement them to your final output;
(5) Each feedback entry contains only one criteria. Do NOT assign multiple criteria to one feedback entry. If the sentence has numerous flaws, please list them in multiple feedback entries.

## 2. Summarize
### 2.1 Summarize Your Analysis
Please summarize and describe the performance of evaluated response on each first-tier primary criteria.
### 2.2 Generate Your Judgements
In the end, you should provide your final judgement score, ranging from 1 to 10. The score ranges and definitions are shown as follows:
1. 1 <= x < 3: The quality is very low, containing numerous severe flaws; there are also other flaws, with Important error criteria.
2. 3 <= x < 5: The quality is low, making it difficult to fulfill user query; There are many flaws, and a small number of severe flaws may be included.
3. 5 <= x < 7: The quality is moderate, somewhat addressing the user query; There are a few errors, and a small number of severe errors may be included.
4. 7 <= x < 9: The quality is approximately the same as the reference response (with the reference response scoring around 8). The response effectively answers user query.
5. 9 <= x < 10: The quality is better than the reference, perfectly answering the user query in the conversation history.

## NOTICE!!!
1. Quality scores (1-10) can be expressed as floating-point numbers.
2. Within specific score ranges, the more flaws there are, the lower quality score, and vice versa.
3. You should compare the evaluated response the reference before giving your quality score. Please follow the important guideline as follows: if evaluated response is worse than the reference, its score should be lower.

# Output Format
Please answer in following Markdown format template. Do NOT add comment (//) in the template.
---
# The List of ACUs

## Feedback Entry 1
Citation Symbol: {{citation_symbol}}
Description: {{description}}
Belong to Criteria: {{criteria_name}}
Severity: {{severity}}
Suggestion: {{suggestion}}
...

# Summarization
**1. {{Name of First Primary Criteria}}** {{summary paragraph}}
...

# Final Judgement
Score: {{score}}
---)";

constexpr const char* kRevise =
    R"(# Task Input
We provide the original response to the conversation history, and one critique of that response.
---
# Original Response
{evaluated_response}
---
# Critique
{critique}
---

# Task Goal
Revise the original response so that every flaw identified in the critique is fixed. Apply each suggestion faithfully while preserving the parts of the response that were not criticized.

## NOTICE!!!
1. Output ONLY the revised response. Do NOT include any analysis, preamble, or the critique itself.
2. The original response contains citation symbols, like [S1] and [S2], which locate the flaws cited by the critique. Do NOT include citation symbols in the revised response.)";

constexpr const char* kRewardScore =
    R"(You are a reward model. Given the conversation history and a candidate response, output ONLY a single real-valued score reflecting the quality of the candidate response. Higher is better. Do NOT output any explanation.

# Conversation History
---
{conversation}
---

# Candidate Response
---
{revision}
---

Score:)";

std::string conversation_block(const std::string& conversation) {
    return "# Conversation History\n---\n" + conversation + "\n---\n\n";
}

std::string subst(std::string text, const Bindings& bindings) {
    for (const auto& [key, value] : bindings) {
        const std::string placeholder = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = text.find(placeholder, pos)) != std::string::npos) {
            text.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return text;
}

const std::string& binding(const Bindings& bindings, const std::string& key) {
    auto it = bindings.find(key);
    if (it == bindings.end()) throw Error("missing: " + key);
    return it->second;
}

// Chain through the crucial-information stages; each caller extends it.
void append_chain(std::vector<Message>& msgs, TemplateId upto, const Bindings& b) {
    msgs.push_back({"user", conversation_block(binding(b, "conversation")) + kTaskDescription});
    if (upto == TemplateId::task_description) return;
    msgs.push_back({"assistant", binding(b, "task_description_output")});
    msgs.push_back({"user", subst(kCriteria, b)});
    if (upto == TemplateId::criteria) return;
    msgs.push_back({"assistant", binding(b, "criteria_output")});
    msgs.push_back({"user", kReference});
    if (upto == TemplateId::reference) return;
    msgs.push_back({"assistant", binding(b, "reference_output")});
    msgs.push_back({"user", subst(kCritique, b)});
}

}  // namespace

const char* to_string(TemplateId id) {
    switch (id) {
        case TemplateId::task_description: return "task_description";
        case TemplateId::criteria: return "criteria";
        case TemplateId::reference: return "reference";
        case TemplateId::critique: return "critique";
        case TemplateId::meta_critique: return "meta_critique";
        case TemplateId::summarize: return "summarize";
        case TemplateId::revise: return "revise";
        case TemplateId::reward_score: return "reward_score";
    }
    return "task_description";
}

TemplateId template_id_from_string(const std::string& s) {
    if (s == "task_description") return TemplateId::task_description;
    if (s == "criteria") return TemplateId::criteria;
    if (s == "reference") return TemplateId::reference;
    if (s == "critique") return TemplateId::critique;
    if (s == "meta_critique") return TemplateId::meta_critique;
    if (s == "summarize") return TemplateId::summarize;
    if (s == "revise") return TemplateId::revise;
    if (s == "reward_score") return TemplateId::reward_score;
    throw Error("unknown template_id: " + s);
}

const std::vector<std::string>& required_bindings(TemplateId id) {
    static const std::vector<std::string> task = {"conversation"};
    static const std::vector<std::string> crit = {"conversation", "task_description_output",
                                                  "user_pre_defined_criteria"};
    static const std::vector<std::string> ref = {"conversation", "task_description_output",
                                                 "user_pre_defined_criteria", "criteria_output"};
    static const std::vector<std::string> critique = {
        "conversation", "task_description_output", "user_pre_defined_criteria",
        "criteria_output", "reference_output", "evaluated_response"};
    static const std::vector<std::string> meta = {
        "conversation",     "task_description_output", "user_pre_defined_criteria",
        "criteria_output",  "reference_output",        "evaluated_response",
        "all_critiques",    "target_agent_id"};
    static const std::vector<std::string> summ = {
        "conversation",    "task_description_output", "user_pre_defined_criteria",
        "criteria_output", "reference_output",        "evaluated_response",
        "all_critiques",   "all_meta"};
    static const std::vector<std::string> revise = {"conversation", "evaluated_response",
                                                    "critique"};
    static const std::vector<std::string> reward = {"conversation", "revision"};
    switch (id) {
        case TemplateId::task_description: return task;
        case TemplateId::criteria: return crit;
        case TemplateId::reference: return ref;
        case TemplateId::critique: return critique;
        case TemplateId::meta_critique: return meta;
        case TemplateId::summarize: return summ;
        case TemplateId::revise: return revise;
        case TemplateId::reward_score: return reward;
    }
    return task;
}

std::vector<Message> render_prompt(TemplateId id, const Bindings& bindings) {
    std::string missing;
    for (const auto& key : required_bindings(id)) {
        if (!bindings.count(key)) {
            if (!missing.empty()) missing += ", ";
            missing += key;
        }
    }
    if (!missing.empty()) throw Error("missing: " + missing);

    std::vector<Message> msgs;
    switch (id) {
        case TemplateId::task_description:
        case TemplateId::criteria:
        case TemplateId::reference:
        case TemplateId::critique:
            append_chain(msgs, id, bindings);
            break;
        case TemplateId::meta_critique:
            append_chain(msgs, TemplateId::critique, bindings);
            msgs.push_back({"assistant", binding(bindings, "all_critiques")});
            msgs.push_back({"user", std::string(kMetaCritique) + "\n\n" +
                                        subst(kMetaOutputFormat, bindings)});
            break;
        case TemplateId::summarize:
            append_chain(msgs, TemplateId::critique, bindings);
            msgs.push_back({"assistant", binding(bindings, "all_critiques")});
            msgs.push_back({"user", kMetaCritique});
            msgs.push_back({"assistant", binding(bindings, "all_meta")});
            msgs.push_back({"user", kSummarize});
            break;
        case TemplateId::revise:
            msgs.push_back(
                {"user", conversation_block(binding(bindings, "conversation")) + subst(kRevise, bindings)});
            break;
        case TemplateId::reward_score:
            msgs.push_back({"user", subst(kRewardScore, bindings)});
            break;
    }
    return msgs;
}

std::string render_critiques_block(
    const std::vector<std::pair<std::string, std::string>>& critiques) {
    std::string out = "# Critiques From Models\n";
    for (const auto& [agent_id, markdown] : critiques) {
        out += "\n## Critique From Model " + agent_id + "\n" + markdown + "\n";
    }
    return out;
}

std::string render_meta_block(const std::vector<std::pair<std::string, std::string>>& analyses) {
    std::string out = "# Meta-Evaluation Analyses\n";
    for (const auto& [agent_id, markdown] : analyses) {
        out += "\n## Analyses for Model " + agent_id + "\n" + markdown + "\n";
    }
    return out;
}

}  // namespace mc
