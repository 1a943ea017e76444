#include <doctest.h>

#include "fixtures.hpp"
#include "mc/common.hpp"
#include "mc/json_io.hpp"
#include "mc/types.hpp"
#include "mc/validate.hpp"

using namespace mc;

namespace {

CriteriaTree grid_tree(int primaries, int fine_per_primary) {
    CriteriaTree tree;
    for (int p = 0; p < primaries; ++p) {
        PrimaryCriterion primary;
        primary.name = "Primary " + std::to_string(p);
        for (int f = 0; f < fine_per_primary; ++f) {
            primary.fine_grained.push_back(
                {"Fine " + std::to_string(p) + "-" + std::to_string(f), "d", "normal"});
        }
        tree.primaries.push_back(std::move(primary));
    }
    return tree;
}

bool has_rule(const ValidationResult& result, const std::string& rule) {
    for (const auto& v : result.violations)
        if (v.rule == rule) return true;
    return false;
}

}  // namespace

TEST_CASE("severity weight map is total and fixed") {
    CHECK(severity_of(QualityCategory::L0) == 0);
    CHECK(severity_of(QualityCategory::L1) == 5);
    CHECK(severity_of(QualityCategory::L2) == 2);
    CHECK(severity_of(QualityCategory::L3) == 1);
    CHECK(severity_of(QualityCategory::L4) == 4);
    CHECK(severity_of(QualityCategory::L5) == 4);
    CHECK(severity_of(QualityCategory::L6) == 1);
    int sum = 0;
    for (int c = 0; c < 7; ++c) sum += severity_of(static_cast<QualityCategory>(c));
    CHECK(sum == 17);
}

TEST_CASE("validate_criteria accepts a 2x3 grid") {
    CHECK(validate_criteria(grid_tree(2, 3)).ok());
}

TEST_CASE("validate_criteria rejects 18 fine-grained criteria") {
    auto result = validate_criteria(grid_tree(6, 3));
    CHECK_FALSE(result.ok());
    REQUIRE(has_rule(result, "fine-count"));
    for (const auto& v : result.violations)
        if (v.rule == "fine-count") CHECK(v.detail == "fine-grained count 18 > 15");
}

TEST_CASE("validate_criteria rejects an unknown degree") {
    auto tree = grid_tree(2, 2);
    tree.primaries[1].fine_grained[0].degree = "critical";
    auto result = validate_criteria(tree);
    CHECK_FALSE(result.ok());
    CHECK(has_rule(result, "unknown-degree"));
}

TEST_CASE("validate_criteria flags empty trees, duplicates, and oversized primaries") {
    CHECK(has_rule(validate_criteria(CriteriaTree{}), "empty-tree"));

    auto dup = grid_tree(2, 1);
    dup.primaries[1].name = dup.primaries[0].name;
    CHECK(has_rule(validate_criteria(dup), "duplicate-name"));

    CHECK(has_rule(validate_criteria(grid_tree(1, 4)), "fine-per-primary"));
}

TEST_CASE("validate_acu resolves citations and criterion names") {
    const auto response = fixtures::viking_response();
    const auto tree = fixtures::viking_tree();

    Acu acu{{2}, "lacks depth", "Information Richness", Severity::Moderate, "add context"};
    auto result = validate_acu(acu, response, tree);
    CHECK(result.ok());
    // names a primary, which is allowed but soft-flagged
    CHECK(has_rule(result, "primary-criterion"));

    Acu fine_acu{{2}, "lacks steps", "detailed  steps", Severity::Minor, "add steps"};
    auto fine_result = validate_acu(fine_acu, response, tree);
    CHECK(fine_result.ok());
    CHECK(fine_result.violations.empty());  // case/whitespace-insensitive fine match

    Acu dangling{{9}, "out of range", "Accuracy", Severity::Severe, "fix"};
    auto bad = validate_acu(dangling, response, tree);
    CHECK_FALSE(bad.ok());
    CHECK(has_rule(bad, "dangling-citation"));

    Acu unknown{{1}, "style issue", "Style", Severity::Minor, "fix"};
    auto soft = validate_acu(unknown, response, tree);
    CHECK(soft.ok());
    CHECK(has_rule(soft, "unknown-criterion"));

    Acu no_cite{{}, "nothing cited", "Accuracy", Severity::Minor, "fix"};
    CHECK_FALSE(validate_acu(no_cite, response, tree).ok());
}

TEST_CASE("validate_query enforces conversation shape") {
    Query query = fixtures::viking_query();
    CHECK(validate_query(query).ok());

    Query empty = query;
    empty.conversation.clear();
    CHECK_FALSE(validate_query(empty).ok());

    Query wrong_tail = query;
    wrong_tail.conversation.push_back({Speaker::assistant, "I am Bjorn."});
    CHECK_FALSE(validate_query(wrong_tail).ok());
}

TEST_CASE("validate_response checks labels strip back to the raw text") {
    auto response = fixtures::viking_response();
    CHECK(validate_response(response).ok());

    auto tampered = response;
    tampered.raw_text += " extra";
    CHECK(has_rule(validate_response(tampered), "label-strip-mismatch"));

    auto gap = response;
    gap.sentence_spans[1].label = 5;
    CHECK(has_rule(validate_response(gap), "label-gap"));
}

TEST_CASE("JSONL round-trip is semantically stable for every core type") {
    auto dump = [](const Json& j) { return j.dump(); };

    Query query = fixtures::viking_query();
    query.user_criteria = "Style";
    query.gold_answer = "42";
    CHECK(dump(to_json(query_from_json(to_json(query)))) == dump(to_json(query)));

    const auto response = fixtures::viking_response();
    CHECK(dump(to_json(response_from_json(to_json(response)))) == dump(to_json(response)));

    const auto tree = fixtures::viking_tree();
    CHECK(dump(to_json(criteria_tree_from_json(to_json(tree)))) == dump(to_json(tree)));

    CrucialInfo info{"Roleplay as a viking.", tree, "A reference response."};
    CHECK(dump(to_json(crucial_info_from_json(to_json(info)))) == dump(to_json(info)));

    AnalyticalCritique critique{
        "critic-a",
        {{{2, 3}, "desc", "Information Richness", Severity::Moderate, "sugg"}},
        "# List of Flaws in Response\n..."};
    CHECK(dump(to_json(critique_from_json(to_json(critique)))) == dump(to_json(critique)));

    MetaLabel label{QualityCategory::L4, "wrong description"};
    CHECK(dump(to_json(meta_label_from_json(to_json(label)))) == dump(to_json(label)));

    FinalCritique final_critique;
    final_critique.merged_acus = critique.acus;
    final_critique.per_primary_summary = {{"Accuracy", "fine"}};
    final_critique.judgment_score = 6.2;
    final_critique.raw_markdown = "# The List of ACUs\n...";
    CHECK(dump(to_json(final_critique_from_json(to_json(final_critique)))) ==
          dump(to_json(final_critique)));

    PreferencePair pair;
    pair.sample_id = "viking__high";
    pair.chosen_id = "summary";
    pair.rejected_id = "critic-a";
    pair.chosen_text = "# List of Flaws in Response\n";
    pair.rejected_text = "# List of Flaws in Response\n";
    pair.chosen_severity = 0;
    pair.rejected_severity = 12;
    pair.mars_verdict = MarsVerdict::kept;
    pair.mars_evidence = {{1.0, 2.0}, {0.0, 1.0}};
    CHECK(dump(to_json(preference_pair_from_json(to_json(pair)))) == dump(to_json(pair)));
}

TEST_CASE("enum strings reject out-of-set values") {
    CHECK_THROWS_AS(severity_from_string("Critical"), ParseError);
    CHECK_THROWS_AS(quality_category_from_string("L7"), ParseError);
    CHECK_THROWS_AS(task_family_from_string("reasoning"), ParseError);
    CHECK(severity_from_string("moderate") == Severity::Moderate);
    CHECK(quality_category_from_string("L6") == QualityCategory::L6);
}
