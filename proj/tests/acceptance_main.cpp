// Acceptance suite: one check per release criterion, each with a pinned
// tolerance and time budget. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mc/common.hpp"
#include "mc/emitter.hpp"
#include "mc/json_io.hpp"
#include "mc/metrics.hpp"
#include "mc/mock.hpp"
#include "mc/parsers.hpp"
#include "mc/pipeline.hpp"
#include "mc/preference.hpp"
#include "mc/preprocess.hpp"
#include "mc/validate.hpp"

namespace fs = std::filesystem;
using namespace mc;

namespace {

struct Failure {
    std::string message;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw Failure{message};
}

void require_close(double actual, double expected, double tolerance, const std::string& what) {
    if (!(std::fabs(actual - expected) <= tolerance))
        throw Failure{what + ": got " + std::to_string(actual) + ", want " +
                      std::to_string(expected) + " +- " + std::to_string(tolerance)};
}

// ---- criterion 1: severity table fidelity ----

void check_severity_table() {
    const int expected[7] = {0, 5, 2, 1, 4, 4, 1};
    int sum = 0;
    for (int c = 0; c < 7; ++c) {
        const auto category = static_cast<QualityCategory>(c);
        require(severity_of(category) == expected[c],
                std::string("severity_of(") + to_string(category) + ") != " +
                    std::to_string(expected[c]));
        sum += severity_of(category);
    }
    require(sum == 17, "severity weights must sum to 17");
}

// ---- criterion 2: pairing oracle equivalence ----

void check_pairing_oracle() {
    Rng rng(0xACCE57);
    for (int trial = 0; trial < 1000; ++trial) {
        CandidatePool pool;
        pool.sample_id = "t";
        const std::size_t entries = 2 + rng.bounded(4);
        for (std::size_t i = 0; i < entries; ++i)
            pool.entries.push_back({"e" + std::to_string(i),
                                    static_cast<int>(rng.bounded(31)), ""});

        std::set<std::pair<std::string, std::string>> expected;
        for (const auto& a : pool.entries)
            for (const auto& b : pool.entries)
                if (a.id != b.id && b.severity - a.severity > 5) expected.insert({a.id, b.id});

        std::set<std::pair<std::string, std::string>> got;
        for (const auto& draft : pair_candidates(pool, 5, PairingPolicy::all_pairs))
            got.insert({draft.chosen.id, draft.rejected.id});
        require(got == expected,
                "pair_candidates disagrees with brute force on trial " + std::to_string(trial));
    }
}

// ---- criterion 3: focal loss closed forms ----

void check_focal_loss() {
    require_close(focal_ranking_loss(0.0, 0.0), std::log(2.0), 1e-9, "loss at zero gap");
    require_close(focal_ranking_loss(std::log(3.0), 0.0), -0.25 * std::log(0.75), 1e-9,
                  "loss at gap ln 3");
    require_close(focal_ranking_loss(-std::log(3.0), 0.0), -std::log(0.25), 1e-9,
                  "loss at gap -ln 3");

    double prev = focal_ranking_loss(-5.0, 0.0);
    for (double gap = -4.9; gap <= 5.0001; gap += 0.1) {
        const double loss = focal_ranking_loss(gap, 0.0);
        require(loss < prev, "loss not strictly decreasing at gap " + std::to_string(gap));
        prev = loss;
    }
    require(focal_ranking_loss(20.0, 0.0) < 1e-8, "loss at gap 20 should vanish");

    const double h = 1e-6;
    for (double gap : {-2.0, -0.5, 0.5, 2.0}) {
        const double central =
            (focal_ranking_loss(gap + h, 0.0) - focal_ranking_loss(gap - h, 0.0)) / (2.0 * h);
        require_close(focal_ranking_loss_grad_plus(gap, 0.0), central, 1e-6,
                      "gradient vs central difference at gap " + std::to_string(gap));
    }
    // the coefficient kink sits at gap 0; the gradient takes the
    // inactive-coefficient branch there, so check one-sided
    const double left = (focal_ranking_loss(0.0, 0.0) - focal_ranking_loss(-h, 0.0)) / h;
    require_close(focal_ranking_loss_grad_plus(0.0, 0.0), left, 1e-6,
                  "gradient vs left difference at gap 0");
}

// ---- criterion 4: parser fixtures ----

void check_parser_fixtures() {
    CriteriaTree tree = parse_criteria(fixtures::kCriteriaCase);
    require(tree.primaries.size() == 3, "criteria fixture: expected 3 primaries");
    require(tree.primaries[0].name == "Completeness of Instruction Following",
            "criteria fixture: first primary name");
    require(tree.primaries[0].fine_grained.size() == 3 &&
                tree.primaries[0].fine_grained[0].name == "Immediate Action" &&
                tree.primaries[0].fine_grained[0].degree == "important",
            "criteria fixture: Immediate Action/important expected");
    require(tree.fine_count() == 8, "criteria fixture: expected 8 fine-grained criteria");
    require(validate_criteria(tree).ok(), "criteria fixture must validate");
    require(to_json(criteria_tree_from_json(to_json(tree))).dump() == to_json(tree).dump(),
            "criteria fixture must round-trip");

    LabeledText labeled = label_sentences(fixtures::kVikingRaw, LabelMode::prose);
    require(labeled.labeled_text == fixtures::kVikingLabeled,
            "labeling must reproduce the worked example byte for byte");

    EvaluatedResponse response = fixtures::viking_response();
    FinalCritique final_critique =
        parse_final_critique(fixtures::kVikingSummary, response, CriteriaTree{});
    require(final_critique.judgment_score == 6.2, "judgment score must be exactly 6.2");
    require(final_critique.merged_acus.size() == 2, "summary fixture: expected 2 ACUs");
    require(final_critique.merged_acus[0].citations == std::vector<int>{2} &&
                final_critique.merged_acus[0].criterion_name == "Information Richness" &&
                final_critique.merged_acus[0].severity == Severity::Moderate,
            "summary fixture: first ACU fields");
    require(final_critique.merged_acus[1].citations == std::vector<int>{2, 3},
            "summary fixture: range citation [S2] - [S3]");
    require(final_critique.per_primary_summary.size() == 8,
            "summary fixture: 8 per-primary sections");
    require(to_json(final_critique_from_json(to_json(final_critique))).dump() ==
                to_json(final_critique).dump(),
            "final critique must round-trip");
}

// ---- criterion 5: MARS arithmetic ----

void check_mars_arithmetic() {
    require(mars_verdict({{1.0, 2.0}, {0.0, 1.0}}, 1) == MarsVerdict::kept,
            "means 1.5 > 0.5 must keep");
    require(mars_verdict({{0.7, 0.7}, {0.7, 0.7}}, 1) == MarsVerdict::dropped,
            "equal means must drop (strict inequality)");

    MarsEvidence counting;
    counting.chosen.assign(32, 0.0);
    counting.rejected.assign(32, 0.0);
    for (int i = 0; i < 6; ++i) counting.chosen[static_cast<std::size_t>(i)] = 1.0;
    for (int i = 0; i < 3; ++i) counting.rejected[static_cast<std::size_t>(i)] = 1.0;
    require(mars_verdict(counting, 8) == MarsVerdict::kept,
            "6/32 vs 3/32 exact matches must keep");

    MarsEvidence thin;
    thin.chosen.assign(15, 1.0);
    thin.rejected.assign(32, 0.0);
    require(mars_verdict(thin, 8) == MarsVerdict::unevaluated,
            "fewer than 2k scores must leave the pair unevaluated");

    require(exact_match("the answer is 42.0", "42").matched == 1,
            "numeric normalization must equate 42.0 and 42");
}

// ---- criterion 6: end-to-end determinism at desk scale ----

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig desk_config(const fs::path& input, const fs::path& run_dir, std::uint64_t seed) {
    PipelineConfig config;
    config.run_dir = run_dir.string();
    config.queries_path = (input / "queries.jsonl").string();
    config.candidates_path = (input / "candidates.jsonl").string();
    config.info_elicitor = AgentSpec::with_role_defaults("elicitor", "mock:synthetic",
                                                         "elicitor-model",
                                                         AgentRole::info_elicitor);
    for (int i = 0; i < 4; ++i)
        config.critics.push_back(AgentSpec::with_role_defaults(
            "critic-" + std::to_string(i), "mock:synthetic",
            "critic-model-" + std::to_string(i), AgentRole::critic));
    config.meta_judge = AgentSpec::with_role_defaults("judge", "mock:synthetic", "judge-model",
                                                      AgentRole::meta_judge);
    config.summarizer = AgentSpec::with_role_defaults("summ", "mock:synthetic", "summ-model",
                                                      AgentRole::summarizer);
    for (int i = 0; i < 4; ++i)
        config.revisers.push_back(AgentSpec::with_role_defaults(
            "reviser-" + std::to_string(i), "mock:synthetic",
            "reviser-model-" + std::to_string(i), AgentRole::reviser));
    config.reward_oracle.kind = "model_scored";
    config.reward_oracle.agent = AgentSpec::with_role_defaults(
        "oracle", "mock:synthetic", "oracle-model", AgentRole::reviser);
    config.seed = seed;
    config.concurrency_limit = 8;
    return config;
}

void check_end_to_end() {
    const fs::path input = scratch("mc_acc_inputs");
    std::string queries, candidates;
    for (int q = 0; q < 10; ++q) {
        const std::string id = "q" + std::to_string(q);
        Query query;
        query.id = id;
        query.conversation = {
            {Speaker::user, "Please write a plan for weekend project number " +
                                std::to_string(q) + " with clear steps."}};
        query.task_family = TaskFamily::general;
        query.source_tag = "acceptance";
        queries += to_jsonl_line(to_json(query)) + "\n";
        const double scores[] = {-1.41, -0.3, 0.70, 1.69};
        for (int c = 0; c < 4; ++c) {
            Json cand;
            cand["query_id"] = id;
            cand["generator_id"] = "gen-" + std::to_string(c);
            cand["text"] = "Attempt " + std::to_string(c) + " for " + id +
                           ". It starts with an outline of the work. It adds one concrete "
                           "detail per step. It finishes by checking the steps against the "
                           "request.";
            cand["reward_score"] = scores[c];
            candidates += to_jsonl_line(cand) + "\n";
        }
    }
    write_file_atomic((input / "queries.jsonl").string(), queries);
    write_file_atomic((input / "candidates.jsonl").string(), candidates);

    const fs::path run_a = scratch("mc_acc_run_a");
    const fs::path run_b = scratch("mc_acc_run_b");
    RunManifest manifest = PipelineRunner::run_all(desk_config(input, run_a, 2024));
    PipelineRunner::run_all(desk_config(input, run_b, 2024));

    require(manifest.faithful, "desk-scale config must be paper-faithful");
    require(manifest.output_counts.at("sft.jsonl") == 30,
            "10 queries x 3 responses must emit exactly 30 SFT records, got " +
                std::to_string(manifest.output_counts.at("sft.jsonl")));
    require(manifest_reconciliation_errors(manifest).empty(), "manifest counts must reconcile");

    int samples = 0;
    for (const auto& entry : fs::directory_iterator(run_a / "state" / "critique")) {
        const Json j = parse_json(read_file(entry.path().string()));
        require(j.at("critiques").size() == 4, "every sample needs 4 parsed critiques");
        ++samples;
    }
    require(samples == 30, "expected critique state for all 30 samples");

    std::size_t kept_pairs = 0;
    for (const auto& line : split_lines(read_file((run_a / "rl.jsonl").string()))) {
        if (trim(line).empty()) continue;
        const Json j = parse_json(line);
        require(j.at("verdict") == "kept", "only kept pairs may be emitted");
        require(j.at("rejected_severity").get<int>() - j.at("chosen_severity").get<int>() > 5,
                "severity gate violated in rl.jsonl");
        const auto chosen = j.at("mars_evidence").at("chosen").get<std::vector<double>>();
        const auto rejected = j.at("mars_evidence").at("rejected").get<std::vector<double>>();
        require(chosen.size() == 32 && rejected.size() == 32,
                "faithful runs collect 4x8 revisions per side");
        double chosen_mean = 0, rejected_mean = 0;
        for (double v : chosen) chosen_mean += v;
        for (double v : rejected) rejected_mean += v;
        require(chosen_mean / 32.0 > rejected_mean / 32.0, "mean gate violated in rl.jsonl");
        ++kept_pairs;
    }
    require(kept_pairs > 0, "desk-scale run produced no kept preference pairs");

    require(read_file((run_a / "sft.jsonl").string()) ==
                read_file((run_b / "sft.jsonl").string()),
            "sft.jsonl must be byte-identical across seeded runs");
    require(read_file((run_a / "rl.jsonl").string()) == read_file((run_b / "rl.jsonl").string()),
            "rl.jsonl must be byte-identical across seeded runs");

    require(verify_run(run_a.string()).ok(), "verify stage must pass on the emitted run");
}

// ---- criterion 7: template mix and mask volume ----

void check_template_mix_and_masks() {
    const std::size_t n_queries = 340;
    const std::size_t records = n_queries * 3;  // 1020, over 1,000
    const auto modes = select_template_modes(records, 0.05, 99);
    std::size_t singles = 0;
    for (auto mode : modes)
        if (mode == TemplateMode::single_turn) ++singles;
    require(singles == 51, "single-turn count must be round(1020 * 0.05) = 51, got " +
                               std::to_string(singles));
    require(std::fabs(static_cast<double>(singles) / static_cast<double>(records) - 0.05) <
                0.0001,
            "single-turn share must be 5.0%");

    // Designate one (response, epoch) slot per query; the trainable share of
    // crucial-info slots is then queries / (records * epochs) = 1/6 exactly.
    const CritiqueSample sample = [] {
        CritiqueSample s;
        s.sample_id = "mask-sample";
        s.query = fixtures::viking_query();
        s.response = fixtures::viking_response();
        s.crucial_info = CrucialInfo{"task", fixtures::viking_tree(), "ref"};
        return s;
    }();
    const CrucialRaw raw{"# Task Description\ntask", fixtures::kCriteriaCase, "ref"};
    FinalCritique final_critique;
    final_critique.merged_acus = {
        {{1}, "d", "Information Richness", Severity::Minor, "s"}};
    final_critique.judgment_score = 5.0;
    final_critique.raw_markdown = "# The List of ACUs\nNo flaws found.\n# Final Judgement\nScore: 5.0";

    std::int64_t trainable_slots = 0;
    std::int64_t total_slots = 0;
    std::size_t record_index = 0;
    Rng rng(4242);
    for (std::size_t q = 0; q < n_queries; ++q) {
        const std::uint64_t designated = rng.bounded(3 * kMaskEpochs);
        for (int response = 0; response < 3; ++response) {
            MaskSlot slot{static_cast<std::uint64_t>(response) == designated / kMaskEpochs,
                          static_cast<int>(designated % kMaskEpochs)};
            SftRecord record =
                assemble_sft(sample, raw, final_critique, modes[record_index++],
                             MaskingMode::ci_once_per_2_epochs, slot);
            for (int epoch_mask : record.epoch_mask_plan) trainable_slots += epoch_mask;
            total_slots += static_cast<std::int64_t>(record.epoch_mask_plan.size());
            bool any = false;
            for (const auto& msg : record.messages) any |= msg.train_mask == 1;
            require(any, "every record must keep at least one trainable message");
        }
    }
    require(total_slots == static_cast<std::int64_t>(records * kMaskEpochs),
            "slot accounting is off");
    require(trainable_slots * 6 == total_slots,
            "crucial-info trainable-slot share must be exactly 1/6, got " +
                std::to_string(trainable_slots) + "/" + std::to_string(total_slots));
}

// ---- criterion 8: metrics kernels ----

void check_metrics() {
    require_close(spearman({1, 2, 3}, {10, 20, 30}), 1.0, 1e-12, "spearman monotone");
    require_close(spearman({1, 2, 3}, {3, 2, 1}), -1.0, 1e-12, "spearman reversal");
    require_close(spearman({1, 2, 3, 4}, {2, 1, 4, 3}), 0.6, 1e-12, "spearman 0.6 case");

    const F1Result f1 = f1_thresholded({8, 6, 9, 3}, {true, true, false, false}, 7.0);
    require(f1.f1.has_value(), "F1 defined on the stated confusion case");
    require_close(*f1.f1, 0.5, 1e-12, "F1 confusion case");

    const F1Result edge = f1_thresholded({7.0}, {true}, 7.0);
    require(edge.f1.has_value() && *edge.f1 == 1.0, "threshold 7 must be inclusive");
}

// ---- criterion 9: concurrency contract ----

void check_concurrency() {
    auto transport = std::make_shared<SyntheticTransport>(17, 1);
    RetryPolicy retry;
    retry.backoff = {std::chrono::milliseconds(1)};
    Gateway gateway(retry);
    gateway.register_mock("mock:synthetic", transport);

    Rng rng(31337);
    std::vector<Gateway::Job> jobs;
    std::vector<std::string> expected;
    Gateway reference(retry);
    reference.register_mock("mock:synthetic", std::make_shared<SyntheticTransport>(17));
    const TemplateId templates[] = {TemplateId::revise, TemplateId::reference,
                                    TemplateId::reward_score, TemplateId::task_description};
    for (int i = 0; i < 1000; ++i) {
        AgentSpec spec = AgentSpec::with_role_defaults(
            "agent", "mock:synthetic", "model-" + std::to_string(rng.bounded(20)),
            AgentRole::reviser);
        ChatRequest request;
        request.template_id = templates[rng.bounded(4)];
        request.messages = {{"user", "payload " + std::to_string(rng.next_u64())}};
        expected.push_back(reference.complete(spec, request).response.content);
        jobs.push_back({std::move(spec), std::move(request)});
    }

    const int limit = 16;
    auto results = gateway.complete_many(jobs, limit);
    require(results.size() == 1000, "result count mismatch");
    require(transport->stats().max_in_flight() <= limit,
            "in-flight peak " + std::to_string(transport->stats().max_in_flight()) +
                " exceeds limit " + std::to_string(limit));
    for (std::size_t i = 0; i < results.size(); ++i) {
        require(results[i].ok(), "job " + std::to_string(i) + " failed");
        require(results[i].response.content == expected[i],
                "order not preserved at slot " + std::to_string(i));
    }
}

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<void()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1. severity-table-fidelity", 1.0, check_severity_table},
        {"2. pairing-oracle-equivalence", 5.0, check_pairing_oracle},
        {"3. focal-loss-closed-forms", 1.0, check_focal_loss},
        {"4. parser-fixtures", 1.0, check_parser_fixtures},
        {"5. mars-arithmetic", 1.0, check_mars_arithmetic},
        {"6. end-to-end-determinism", 60.0, check_end_to_end},
        {"7. template-mix-and-mask-volume", 5.0, check_template_mix_and_masks},
        {"8. metrics-kernels", 1.0, check_metrics},
        {"9. concurrency-contract", 10.0, check_concurrency},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            criterion.check();
        } catch (const Failure& f) {
            error = f.message;
        } catch (const std::exception& e) {
            error = std::string("unexpected exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > criterion.budget_seconds)
            error = "exceeded time budget: " + std::to_string(elapsed) + "s > " +
                    std::to_string(criterion.budget_seconds) + "s";
        if (error.empty()) {
            std::printf("PASS  %-34s (%.2fs)\n", criterion.name.c_str(), elapsed);
        } else {
            std::printf("FAIL  %-34s (%.2fs)  %s\n", criterion.name.c_str(), elapsed,
                        error.c_str());
            ++failures;
        }
    }
    std::printf("%zu criteria: %zu passed, %d failed\n", criteria.size(),
                criteria.size() - static_cast<std::size_t>(failures), failures);
    return failures == 0 ? 0 : 1;
}
