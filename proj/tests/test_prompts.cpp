#include <doctest.h>

#include "mc/common.hpp"
#include "mc/prompts.hpp"

using namespace mc;

namespace {

Bindings chain_bindings() {
    return {
        {"conversation", "[user]: hello"},
        {"task_description_output", "# Task Description\nA greeting."},
        {"user_pre_defined_criteria", ""},
        {"criteria_output", "# Two-tier Structure of Criteria\n## Accuracy\n..."},
        {"reference_output", "Hello there."},
        {"evaluated_response", "Hi [S1]!"},
    };
}

}  // namespace

TEST_CASE("task description template carries the task instruction and conversation") {
    auto msgs = render_prompt(TemplateId::task_description, {{"conversation", "[user]: hi"}});
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0].role == "user");
    CHECK(msgs[0].content.find("Analyze and describe the primary purpose") != std::string::npos);
    CHECK(msgs[0].content.find("[user]: hi") != std::string::npos);
}

TEST_CASE("criteria template substitutes the user-provided criteria body") {
    auto msgs = render_prompt(TemplateId::criteria,
                              {{"conversation", "[user]: hi"},
                               {"task_description_output", "# Task Description\nGreeting."},
                               {"user_pre_defined_criteria", ""}});
    REQUIRE(msgs.size() == 3);
    CHECK(msgs[1].role == "assistant");
    const std::string& prompt = msgs[2].content;
    CHECK(prompt.find("# Our Provided Criteria List\n\n---") != std::string::npos);
    CHECK(prompt.find("Keep the number of all fine-grained criteria within 15") !=
          std::string::npos);
    // literal {{...}} template markers survive substitution
    CHECK(prompt.find("{{Name of First Primary Criteria}}") != std::string::npos);

    auto with_user = render_prompt(TemplateId::criteria,
                                   {{"conversation", "[user]: hi"},
                                    {"task_description_output", "t"},
                                    {"user_pre_defined_criteria", "Style\nBrevity"}});
    CHECK(with_user[2].content.find("Style\nBrevity") != std::string::npos);
}

TEST_CASE("missing bindings are reported by name") {
    CHECK_THROWS_WITH_AS(
        render_prompt(TemplateId::critique,
                      {{"conversation", "x"},
                       {"task_description_output", "t"},
                       {"user_pre_defined_criteria", ""},
                       {"criteria_output", "c"},
                       {"reference_output", "r"}}),
        "missing: evaluated_response", Error);

    CHECK_THROWS_AS(render_prompt(TemplateId::task_description, {}), Error);
}

TEST_CASE("the stage chain appends prior outputs as assistant turns") {
    auto bindings = chain_bindings();
    auto critique = render_prompt(TemplateId::critique, bindings);
    REQUIRE(critique.size() == 7);
    CHECK(critique[0].role == "user");
    CHECK(critique[1].role == "assistant");
    CHECK(critique[1].content == bindings["task_description_output"]);
    CHECK(critique[3].content == bindings["criteria_output"]);
    CHECK(critique[5].content == bindings["reference_output"]);
    CHECK(critique[6].content.find("Hi [S1]!") != std::string::npos);
    CHECK(critique[6].content.find("(1) Negligible; (2) Minor; (3) Moderate; (4) Severe") !=
          std::string::npos);

    bindings["all_critiques"] = "# Critiques From Models\n\n## Critique From Model a\n...";
    bindings["target_agent_id"] = "critic-a";
    auto meta = render_prompt(TemplateId::meta_critique, bindings);
    REQUIRE(meta.size() == 9);
    CHECK(meta[7].content == bindings["all_critiques"]);
    CHECK(meta[8].content.find("E6.") != std::string::npos);
    CHECK(meta[8].content.find("critic-a") != std::string::npos);

    bindings["all_meta"] = "# Meta-Evaluation Analyses\n...";
    auto summarize = render_prompt(TemplateId::summarize, bindings);
    REQUIRE(summarize.size() == 11);
    CHECK(summarize[9].content == bindings["all_meta"]);
    CHECK(summarize[10].content.find("ranging from 1 to 10") != std::string::npos);
}

TEST_CASE("reviser prompt forbids citation symbols in the output") {
    auto msgs = render_prompt(TemplateId::revise, {{"conversation", "[user]: hi"},
                                                   {"evaluated_response", "Hi [S1]!"},
                                                   {"critique", "# List of Flaws in Response"}});
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0].content.find("Do NOT include citation symbols") != std::string::npos);
}
