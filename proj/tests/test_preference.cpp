#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "mc/common.hpp"
#include "mc/mock.hpp"
#include "mc/preference.hpp"

using namespace mc;

namespace {

CandidatePool pool_from(std::initializer_list<std::pair<const char*, int>> entries) {
    CandidatePool pool;
    pool.sample_id = "s";
    for (const auto& [id, severity] : entries)
        pool.entries.push_back({id, severity, std::string("# List of Flaws in Response ") + id});
    return pool;
}

// Independent oracle: exhaustive enumeration of strict-gap ordered pairs.
std::set<std::pair<std::string, std::string>> brute_force_pairs(const CandidatePool& pool,
                                                                int threshold) {
    std::set<std::pair<std::string, std::string>> expected;
    for (const auto& a : pool.entries)
        for (const auto& b : pool.entries)
            if (a.id != b.id && b.severity - a.severity > threshold)
                expected.insert({a.id, b.id});
    return expected;
}

std::set<std::pair<std::string, std::string>> as_set(const std::vector<DraftPair>& drafts) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& d : drafts) out.insert({d.chosen.id, d.rejected.id});
    return out;
}

}  // namespace

TEST_CASE("pair_candidates matches the enumerated example pool") {
    auto pool = pool_from({{"summary", 0}, {"A", 3}, {"B", 8}, {"C", 10}, {"D", 20}});

    auto all = pair_candidates(pool, 5, PairingPolicy::all_pairs);
    auto got = as_set(all);
    std::set<std::pair<std::string, std::string>> expected = {
        {"summary", "B"}, {"summary", "C"}, {"summary", "D"}, {"A", "C"},
        {"A", "D"},       {"B", "D"},       {"C", "D"},
    };
    CHECK(got == expected);          // 7 pairs; (A,B) at gap exactly 5 is excluded
    CHECK(all.size() == 7);

    auto top = pair_candidates(pool, 5, PairingPolicy::max_gap_one_pair);
    REQUIRE(top.size() == 1);
    CHECK(top[0].chosen.id == "summary");
    CHECK(top[0].rejected.id == "D");
    CHECK(top[0].gap() == 20);
}

TEST_CASE("pair_candidates below-threshold pools produce nothing") {
    CHECK(pair_candidates(pool_from({{"summary", 0}, {"A", 4}}), 5,
                          PairingPolicy::all_pairs)
              .empty());
    CHECK(pair_candidates(pool_from({{"summary", 0}, {"A", 5}}), 5,
                          PairingPolicy::all_pairs)
              .empty());  // strict >
}

TEST_CASE("pair_candidates equals brute force on 1000 random pools") {
    Rng rng(20240817);
    for (int trial = 0; trial < 1000; ++trial) {
        CandidatePool pool;
        pool.sample_id = "s";
        const std::size_t entries = 2 + rng.bounded(4);  // 2..5
        pool.entries.push_back({"summary", 0, ""});
        for (std::size_t i = 1; i < entries; ++i)
            pool.entries.push_back(
                {"agent-" + std::to_string(i), static_cast<int>(rng.bounded(31)), ""});
        const int threshold = 5;

        auto got = as_set(pair_candidates(pool, threshold, PairingPolicy::all_pairs));
        CHECK(got == brute_force_pairs(pool, threshold));

        // antisymmetry
        for (const auto& [chosen, rejected] : got) CHECK(got.count({rejected, chosen}) == 0);

        // the one-pair policy picks a maximal-gap element of the full set
        auto top = pair_candidates(pool, threshold, PairingPolicy::max_gap_one_pair);
        if (got.empty()) {
            CHECK(top.empty());
        } else {
            REQUIRE(top.size() == 1);
            CHECK(got.count({top[0].chosen.id, top[0].rejected.id}) == 1);
            int max_gap = 0;
            for (const auto& d : pair_candidates(pool, threshold, PairingPolicy::all_pairs))
                max_gap = std::max(max_gap, d.gap());
            CHECK(top[0].gap() == max_gap);
        }
    }
}

TEST_CASE("max-gap ties prefer the summary as chosen, then lexicographic ids") {
    auto summary_tie = pool_from({{"summary", 0}, {"A", 0}, {"B", 10}});
    auto top = pair_candidates(summary_tie, 5, PairingPolicy::max_gap_one_pair);
    REQUIRE(top.size() == 1);
    CHECK(top[0].chosen.id == "summary");

    auto lexicographic = pool_from({{"a", 1}, {"b", 1}, {"z", 10}});
    auto lex = pair_candidates(lexicographic, 5, PairingPolicy::max_gap_one_pair);
    REQUIRE(lex.size() == 1);
    CHECK(lex[0].chosen.id == "a");
}

TEST_CASE("mars verdict arithmetic") {
    // toy k: strict mean comparison
    CHECK(mars_verdict({{1.0, 2.0}, {0.0, 1.0}}, 1) == MarsVerdict::kept);
    CHECK(mars_verdict({{0.7, 0.7}, {0.7, 0.7}}, 1) == MarsVerdict::dropped);  // tie drops
    CHECK(mars_verdict({{0.0, 1.0}, {1.0, 2.0}}, 1) == MarsVerdict::dropped);

    // exact-match oracle counts: 6/32 vs 3/32 matches
    MarsEvidence counting;
    counting.chosen.assign(32, 0.0);
    counting.rejected.assign(32, 0.0);
    for (int i = 0; i < 6; ++i) counting.chosen[static_cast<std::size_t>(i * 5)] = 1.0;
    for (int i = 0; i < 3; ++i) counting.rejected[static_cast<std::size_t>(i * 7)] = 1.0;
    CHECK(mars_verdict(counting, 8) == MarsVerdict::kept);  // 0.1875 > 0.09375

    // fewer than 2k scores on either side -> unevaluated
    MarsEvidence thin;
    thin.chosen.assign(15, 1.0);
    thin.rejected.assign(32, 0.0);
    CHECK(mars_verdict(thin, 8) == MarsVerdict::unevaluated);
}

TEST_CASE("mars monotonicity: shifting both sides apart never flips kept to dropped") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        MarsEvidence evidence;
        for (int i = 0; i < 8; ++i) {
            evidence.chosen.push_back(rng.unit() * 4.0 - 2.0);
            evidence.rejected.push_back(rng.unit() * 4.0 - 2.0);
        }
        if (mars_verdict(evidence, 4) != MarsVerdict::kept) continue;
        const double shift = rng.unit() * 3.0;
        MarsEvidence shifted = evidence;
        for (double& v : shifted.chosen) v += shift;
        for (double& v : shifted.rejected) v -= shift;
        CHECK(mars_verdict(shifted, 4) == MarsVerdict::kept);
    }
}

TEST_CASE("exact_match normalizes numbers and tallies missing extractions") {
    CHECK(exact_match("after some work, the answer is 42.", "42").matched == 1);
    CHECK(exact_match("so the answer is 42.0", "42").matched == 1);
    CHECK(exact_match("thus \\boxed{42}", "42").matched == 1);
    CHECK(exact_match("the answer is +42", "42").matched == 1);
    CHECK(exact_match("the answer is 41", "42").matched == 0);
    CHECK(exact_match("Answer: Paris", "paris").matched == 1);

    auto missing = exact_match("no numeric span at all", "7");
    CHECK(missing.matched == 0);
    CHECK_FALSE(missing.extracted);

    // last-number fallback
    CHECK(exact_match("first 3 then 7", "7").matched == 1);
    CHECK(exact_match("value -1.50 found", "-1.5").matched == 1);

    CHECK_THROWS_AS(exact_match("anything", ""), Error);
}

TEST_CASE("exact-match oracle accumulates a no-answer tally") {
    ExactMatchOracle oracle("42");
    Query query = fixtures::viking_query();
    CHECK(oracle.score(query, "the answer is 42") == 1.0);
    CHECK(oracle.score(query, "the answer is 41") == 0.0);
    CHECK(oracle.score(query, "nothing here") == 0.0);
    CHECK(oracle.no_answer_tally() == 1);
}

TEST_CASE("mars_filter collects 2 * revisers * k scored revisions per pair") {
    Gateway gateway;
    gateway.register_mock("mock:synthetic", std::make_shared<SyntheticTransport>(5));

    std::vector<AgentSpec> revisers;
    for (int i = 0; i < 4; ++i)
        revisers.push_back(AgentSpec::with_role_defaults("reviser-" + std::to_string(i),
                                                         "mock:synthetic",
                                                         "rev-model-" + std::to_string(i),
                                                         AgentRole::reviser));
    AgentSpec oracle_agent = AgentSpec::with_role_defaults("oracle", "mock:synthetic",
                                                           "oracle-model", AgentRole::reviser);
    ModelScoredOracle oracle(gateway, oracle_agent);

    Query query = fixtures::viking_query();
    const std::string labeled = fixtures::kVikingLabeled;
    MarsInputs inputs{&query, &labeled, format_conversation(query)};

    DraftPair draft;
    draft.chosen = {"summary", 0, "# List of Flaws in Response\nchosen"};
    draft.rejected = {"critic-a", 12, "# List of Flaws in Response\nrejected"};

    const int k = 2;
    PreferencePair pair = mars_filter(draft, "viking__high", inputs, revisers, k, oracle,
                                      gateway, 4);
    CHECK(pair.mars_evidence.chosen.size() == revisers.size() * k);
    CHECK(pair.mars_evidence.rejected.size() == revisers.size() * k);
    CHECK(pair.mars_verdict != MarsVerdict::unevaluated);
    CHECK(pair.chosen_severity == 0);
    CHECK(pair.rejected_severity == 12);

    // deterministic evidence for identical inputs
    PreferencePair again = mars_filter(draft, "viking__high", inputs, revisers, k, oracle,
                                       gateway, 4);
    CHECK(again.mars_evidence.chosen == pair.mars_evidence.chosen);
    CHECK(again.mars_verdict == pair.mars_verdict);
}

TEST_CASE("mars_filter marks pairs unevaluated when a side loses too many revisions") {
    // Every revise call fails; reward calls would succeed but never happen.
    auto transport = std::make_shared<CallbackTransport>(
        [](const AgentSpec&, const ChatRequest& request) {
            TransportReply reply;
            if (request.template_id == TemplateId::revise) {
                reply.status = ChatStatus::transport_error;
                reply.error = "reviser down";
            } else {
                reply.content = "0.5";
            }
            return reply;
        });
    RetryPolicy retry;
    retry.max_attempts = 1;
    Gateway gateway(retry);
    gateway.register_mock("mock:synthetic", transport);

    std::vector<AgentSpec> revisers = {AgentSpec::with_role_defaults(
        "reviser-0", "mock:synthetic", "rev-model", AgentRole::reviser)};
    AgentSpec oracle_agent = AgentSpec::with_role_defaults("oracle", "mock:synthetic",
                                                           "oracle-model", AgentRole::reviser);
    ModelScoredOracle oracle(gateway, oracle_agent);

    Query query = fixtures::viking_query();
    const std::string labeled = fixtures::kVikingLabeled;
    MarsInputs inputs{&query, &labeled, format_conversation(query)};
    DraftPair draft;
    draft.chosen = {"summary", 0, "chosen text"};
    draft.rejected = {"critic-a", 9, "rejected text"};

    PreferencePair pair =
        mars_filter(draft, "viking__high", inputs, revisers, 4, oracle, gateway, 2);
    CHECK(pair.mars_verdict == MarsVerdict::unevaluated);
    CHECK(pair.mars_evidence.chosen.empty());
}
