#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "mc/emitter.hpp"
#include "mc/parsers.hpp"

using namespace mc;

namespace {

std::size_t count_single(const std::vector<TemplateMode>& modes) {
    std::size_t n = 0;
    for (auto mode : modes)
        if (mode == TemplateMode::single_turn) ++n;
    return n;
}

CritiqueSample make_sample() {
    CritiqueSample sample;
    sample.sample_id = "viking__medium";
    sample.query = fixtures::viking_query();
    sample.response = fixtures::viking_response();
    sample.crucial_info =
        CrucialInfo{"A roleplay task.", fixtures::viking_tree(), "a reference response"};
    return sample;
}

CrucialRaw make_raw() {
    return {"# Task Description\nA roleplay task.", fixtures::kCriteriaCase,
            "a reference response"};
}

FinalCritique make_final() {
    FinalCritique final_critique;
    final_critique.merged_acus = {
        {{2}, "lacks depth", "Information Richness", Severity::Moderate, "add detail"}};
    final_critique.per_primary_summary = {{"Information Richness", "thin"}};
    final_critique.judgment_score = 6.2;
    final_critique.raw_markdown =
        "# The List of ACUs\n\n## Feedback Entry 1\nCitation Symbol: [S2]\nDescription: lacks "
        "depth\nBelong to Criteria: Information Richness\nSeverity: Moderate\nSuggestion: add "
        "detail\n\n# Summarization\n**1. Information Richness** thin\n\n# Final "
        "Judgement\nScore: 6.2";
    return final_critique;
}

}  // namespace

TEST_CASE("select_template_modes applies round-half-up counts") {
    CHECK(count_single(select_template_modes(100, 0.05, 1)) == 5);
    CHECK(count_single(select_template_modes(100, 0.0, 1)) == 0);
    CHECK(count_single(select_template_modes(7, 0.05, 1)) == 0);   // round(0.35) = 0
    CHECK(count_single(select_template_modes(10, 0.05, 1)) == 1);  // round(0.5) rounds up
    CHECK(count_single(select_template_modes(1020, 0.05, 1)) == 51);
    CHECK(select_template_modes(0, 0.05, 1).empty());
    CHECK_THROWS_AS(select_template_modes(10, 1.5, 1), ConfigError);
}

TEST_CASE("select_template_modes placement is deterministic per seed") {
    auto a = select_template_modes(200, 0.05, 42);
    auto b = select_template_modes(200, 0.05, 42);
    CHECK(a == b);
    auto c = select_template_modes(200, 0.05, 43);
    CHECK(count_single(c) == count_single(a));
    CHECK(a != c);  // same count, different placement
}

TEST_CASE("multi-turn records carry the four assistant turns in order") {
    SftRecord record = assemble_sft(make_sample(), make_raw(), make_final(),
                                    TemplateMode::multi_turn, MaskingMode::always, {});
    std::vector<const SftMessage*> assistant;
    for (const auto& msg : record.messages)
        if (msg.role == "assistant") assistant.push_back(&msg);
    REQUIRE(assistant.size() == 4);
    CHECK(assistant[0]->content.find("# Task Description") != std::string::npos);
    CHECK(assistant[1]->content.find("# Two-tier Structure of Criteria") != std::string::npos);
    CHECK(assistant[2]->content == "a reference response");
    CHECK(assistant[3]->content.find("Score: 6.2") != std::string::npos);
    CHECK(assistant[3]->train_mask == 1);
    for (const auto& msg : record.messages)
        if (msg.role == "user") CHECK(msg.train_mask == 0);
    CHECK(record.epoch_mask_plan == std::vector<int>{1, 1});  // masking always
}

TEST_CASE("single-turn records pack everything into one trainable message") {
    SftRecord record =
        assemble_sft(make_sample(), make_raw(), make_final(), TemplateMode::single_turn,
                     MaskingMode::always, {});
    std::size_t assistants = 0;
    for (const auto& msg : record.messages)
        if (msg.role == "assistant") {
            ++assistants;
            CHECK(msg.train_mask == 1);
            CHECK(msg.content.find("# Task Description") != std::string::npos);
            CHECK(msg.content.find("Score: 6.2") != std::string::npos);
        }
    CHECK(assistants == 1);
    CHECK(record.messages.size() == 2);
}

TEST_CASE("ci_once_per_2_epochs masks crucial info except the designated slot") {
    // designated record: CI turns trainable, plan selects one epoch
    SftRecord designated =
        assemble_sft(make_sample(), make_raw(), make_final(), TemplateMode::multi_turn,
                     MaskingMode::ci_once_per_2_epochs, {true, 1});
    CHECK(designated.epoch_mask_plan == std::vector<int>{0, 1});
    std::vector<int> assistant_masks;
    for (const auto& msg : designated.messages)
        if (msg.role == "assistant") assistant_masks.push_back(msg.train_mask);
    CHECK(assistant_masks == std::vector<int>{1, 1, 1, 1});

    // non-designated record: CI turns never train, critique still does
    SftRecord other =
        assemble_sft(make_sample(), make_raw(), make_final(), TemplateMode::multi_turn,
                     MaskingMode::ci_once_per_2_epochs, {false, 0});
    CHECK(other.epoch_mask_plan == std::vector<int>{0, 0});
    assistant_masks.clear();
    for (const auto& msg : other.messages)
        if (msg.role == "assistant") assistant_masks.push_back(msg.train_mask);
    CHECK(assistant_masks == std::vector<int>{0, 0, 0, 1});

    bool any_trainable = false;
    for (const auto& msg : other.messages) any_trainable |= msg.train_mask == 1;
    CHECK(any_trainable);

    CHECK_THROWS_AS(assemble_sft(make_sample(), make_raw(), make_final(),
                                 TemplateMode::multi_turn, MaskingMode::ci_once_per_2_epochs,
                                 {true, 7}),
                    StageError);
}

TEST_CASE("sft records survive the JSONL round trip") {
    SftRecord record = assemble_sft(make_sample(), make_raw(), make_final(),
                                    TemplateMode::multi_turn,
                                    MaskingMode::ci_once_per_2_epochs, {true, 0});
    const Json j = to_json(record);
    CHECK(j.at("schema_version") == kSchemaVersion);
    SftRecord reparsed = sft_record_from_json(j);
    CHECK(to_json(reparsed).dump() == j.dump());
}

TEST_CASE("assemble_sft requires crucial info") {
    CritiqueSample sample = make_sample();
    sample.crucial_info.reset();
    CHECK_THROWS_AS(assemble_sft(sample, make_raw(), make_final(), TemplateMode::multi_turn,
                                 MaskingMode::always, {}),
                    StageError);
}

TEST_CASE("emit_jsonl writes atomically and skips identical rewrites") {
    const auto dir = std::filesystem::temp_directory_path() / "mc_emit_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "out.jsonl").string();

    std::vector<std::string> lines;
    for (int i = 0; i < 30; ++i) lines.push_back("{\"n\":" + std::to_string(i) + "}");
    EmitResult first = emit_jsonl(lines, path);
    CHECK(first.count == 30);
    CHECK_FALSE(first.skipped);
    CHECK(split_lines(read_file(path)).size() == 31);  // 30 lines + trailing newline split

    EmitResult rerun = emit_jsonl(lines, path);
    CHECK(rerun.skipped);
    CHECK(rerun.digest == first.digest);

    lines[7] = "{\"n\":700}";
    EmitResult changed = emit_jsonl(lines, path);
    CHECK_FALSE(changed.skipped);
    CHECK(changed.digest != first.digest);

    std::filesystem::remove_all(dir);
}

TEST_CASE("manifest counts must reconcile") {
    RunManifest manifest;
    manifest.run_id = "r";
    manifest.stages["critique"] = {30, 28, 2, 0, {}};
    CHECK(manifest_reconciliation_errors(manifest).empty());
    manifest.stages["meta"] = {28, 27, 0, 0, {}};
    auto errors = manifest_reconciliation_errors(manifest);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("meta") != std::string::npos);

    manifest.stages["meta"].quarantined = 1;
    CHECK(manifest_reconciliation_errors(manifest).empty());
    CHECK(to_json(manifest_from_json(to_json(manifest))).dump() == to_json(manifest).dump());
}
