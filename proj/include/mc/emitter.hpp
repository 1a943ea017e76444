#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mc/critique.hpp"
#include "mc/json_io.hpp"
#include "mc/types.hpp"

namespace mc {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultSingleTurnRate = 0.05;
inline constexpr int kMaskEpochs = 2;

enum class TemplateMode { single_turn, multi_turn };
enum class MaskingMode { ci_once_per_2_epochs, always };

const char* to_string(TemplateMode m);
const char* to_string(MaskingMode m);
TemplateMode template_mode_from_string(const std::string& s);
MaskingMode masking_mode_from_string(const std::string& s);

// Exactly round(n * single_rate) single-turn slots (round half up), placed
// by a seeded shuffle. Deterministic given the seed.
std::vector<TemplateMode> select_template_modes(std::size_t n, double single_rate,
                                                std::uint64_t seed);

struct SftMessage {
    std::string role;
    std::string content;
    int train_mask = 0;
};

struct SftRecord {
    std::string sample_id;
    TemplateMode template_mode = TemplateMode::multi_turn;
    std::vector<SftMessage> messages;
    // Per-epoch override for the crucial-information segments (the assistant
    // turns before the final critique turn in multi-turn records, the
    // pre-critique prefix in single-turn ones). Critique content always
    // trains; its mask is carried on the message itself.
    std::vector<int> epoch_mask_plan;
};

Json to_json(const SftRecord& record);
SftRecord sft_record_from_json(const Json& j);

// Designation of the one (response, epoch) slot per query whose
// crucial-information segments train under ci_once_per_2_epochs.
struct MaskSlot {
    bool designated = false;
    int epoch = 0;
};

// Multi-turn records replay the elicitation chain: the four assistant turns
// are task description, criteria, reference, and critique+summary+score, in
// order. Single-turn records pack crucial info and critique into one
// assistant target.
SftRecord assemble_sft(const CritiqueSample& sample, const CrucialRaw& raw,
                       const FinalCritique& final_critique, TemplateMode mode,
                       MaskingMode masking, MaskSlot slot, int epochs = kMaskEpochs);

struct EmitResult {
    std::size_t count = 0;
    std::string digest;  // 16-hex digest of the file content
    bool skipped = false;  // digest matched an existing identical file
};

// Atomic JSONL write (temp file + rename); rewriting identical content is a
// no-op reported via `skipped`.
EmitResult emit_jsonl(const std::vector<std::string>& lines, const std::string& path);

// ---- run manifest ----

struct StageCounts {
    std::int64_t ingested = 0;
    std::int64_t emitted = 0;
    std::int64_t quarantined = 0;
    std::int64_t resumed = 0;
    std::map<std::string, std::int64_t> extra;
};

struct RunManifest {
    std::string run_id;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    bool faithful = true;
    std::map<std::string, StageCounts> stages;
    std::map<std::string, std::int64_t> drop_report;
    std::map<std::string, std::string> output_digests;
    std::map<std::string, std::int64_t> output_counts;
    std::vector<std::string> warnings;
};

Json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& j);

// ingested = emitted + quarantined must hold for every stage.
std::vector<std::string> manifest_reconciliation_errors(const RunManifest& manifest);

}  // namespace mc
