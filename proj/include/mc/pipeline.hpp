#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/emitter.hpp"
#include "mc/gateway.hpp"
#include "mc/preference.hpp"

namespace mc {

class LockError : public Error {
public:
    explicit LockError(const std::string& what) : Error(what) {}
};

enum class Stage { prepare, crucial, critique, meta, summarize, pair, mars, emit, verify };

inline constexpr std::array<Stage, 9> kStageOrder = {
    Stage::prepare, Stage::crucial, Stage::critique, Stage::meta, Stage::summarize,
    Stage::pair,    Stage::mars,    Stage::emit,     Stage::verify};

const char* to_string(Stage stage);
Stage stage_from_string(const std::string& s);

struct OracleConfig {
    // "model_scored", "exact_match", or "auto" (exact match for math queries
    // carrying a gold answer, model scoring otherwise).
    std::string kind = "auto";
    std::optional<AgentSpec> agent;  // required unless kind == "exact_match"
    ExtractorRule extractor = ExtractorRule::standard;
};

struct PipelineConfig {
    std::string run_dir;
    std::string queries_path;
    std::string candidates_path;

    AgentSpec info_elicitor;
    std::vector<AgentSpec> critics;   // exactly 4 unless allow_non_faithful
    AgentSpec meta_judge;
    AgentSpec summarizer;
    std::vector<AgentSpec> revisers;  // exactly 4 unless allow_non_faithful
    OracleConfig reward_oracle;

    int pairing_threshold = kDefaultPairingThreshold;
    double min_gap = 0.5;
    int mars_k = kDefaultMarsRevisions;
    PairingPolicy pairing_policy = PairingPolicy::max_gap_one_pair;

    double single_turn_rate = kDefaultSingleTurnRate;
    MaskingMode masking = MaskingMode::ci_once_per_2_epochs;

    std::uint64_t seed = 0;
    int concurrency_limit = 4;
    bool allow_non_faithful = false;
    std::string designated_generator;  // two-tier binning for math/code queries

    RetryPolicy retry;
};

PipelineConfig config_from_json(const Json& j);
Json to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::string& path);
std::vector<std::string> validate_config(const PipelineConfig& config);
bool config_is_faithful(const PipelineConfig& config);
std::string config_digest(const PipelineConfig& config);

// Stage-oriented driver. State lives under run_dir:
//   state/<stage>/<id>.json  per-sample records (resumable)
//   state/<stage>.done       completion markers
//   raw/<id>/*.md            raw agent markdown
//   quarantine/<id>.json     excluded samples with reasons
//   sft.jsonl, rl.jsonl, manifest.json
class PipelineRunner {
public:
    explicit PipelineRunner(PipelineConfig config);
    ~PipelineRunner();

    // Executes the requested stages in fixed order; holds the run-dir lock
    // for the duration. Missing prerequisite artifacts raise StageError.
    RunManifest run(std::vector<Stage> stages);

    static RunManifest run_all(PipelineConfig config);

    Gateway& gateway() { return *gateway_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::unique_ptr<Gateway> gateway_;
};

// ---- reporting & verification ----

std::string report_text(const std::string& run_dir);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Ad-hoc checks over the emitted datasets: schema re-parse, pairing gates,
// manifest reconciliation, digest match, plus diagnostic statistics.
VerifyReport verify_run(const std::string& run_dir);

std::string verify_report_text(const VerifyReport& report);

}  // namespace mc
