#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mc {

// ---- enums ----

enum class Speaker { user, assistant };
enum class TaskFamily { general, math, code };
enum class QualityTier { low, medium, high };
enum class Severity { Negligible, Minor, Moderate, Severe };
enum class QualityCategory { L0, L1, L2, L3, L4, L5, L6 };
enum class MarsVerdict { kept, dropped, unevaluated };

const char* to_string(Speaker v);
const char* to_string(TaskFamily v);
const char* to_string(QualityTier v);
const char* to_string(Severity v);
const char* to_string(QualityCategory v);
const char* to_string(MarsVerdict v);

Speaker speaker_from_string(const std::string& s);
TaskFamily task_family_from_string(const std::string& s);
QualityTier quality_tier_from_string(const std::string& s);
Severity severity_from_string(const std::string& s);
QualityCategory quality_category_from_string(const std::string& s);
MarsVerdict mars_verdict_from_string(const std::string& s);

// Per-category severity weights. These are fixed constants: changing them
// silently changes dataset semantics, so they are not configurable.
inline constexpr std::array<int, 7> kCategorySeverity{0, 5, 2, 1, 4, 4, 1};

constexpr int severity_of(QualityCategory c) {
    return kCategorySeverity[static_cast<std::size_t>(c)];
}

// ---- conversation & queries ----

struct Turn {
    Speaker speaker = Speaker::user;
    std::string text;
};

struct Query {
    std::string id;
    std::vector<Turn> conversation;  // non-empty, last turn is user
    TaskFamily task_family = TaskFamily::general;
    std::string source_tag;
    std::optional<std::string> user_criteria;  // optional pre-defined primaries
    std::optional<std::string> gold_answer;    // exact-match oracle target
};

// ---- evaluated responses ----

struct SentenceSpan {
    int label = 0;       // 1-based, contiguous
    std::size_t begin = 0;  // character range into raw_text
    std::size_t end = 0;
};

struct EvaluatedResponse {
    std::string id;
    std::string raw_text;
    std::string labeled_text;  // raw_text with " [Sk]" citation markers
    std::vector<SentenceSpan> sentence_spans;
    QualityTier quality_tier = QualityTier::low;
    double reward_score = 0.0;
};

// ---- criteria ----

struct FineCriterion {
    std::string name;
    std::string description;
    // Kept as the literal word so ingested data with an out-of-set degree
    // reaches validate_criteria instead of failing at construction.
    std::string degree;  // normal | medium | important
};

struct PrimaryCriterion {
    std::string name;
    std::string description;
    std::vector<FineCriterion> fine_grained;  // at most 3
};

struct CriteriaTree {
    std::vector<PrimaryCriterion> primaries;

    std::size_t fine_count() const {
        std::size_t n = 0;
        for (const auto& p : primaries) n += p.fine_grained.size();
        return n;
    }
};

inline const std::array<const char*, 3> kDegreeWords{"normal", "medium", "important"};
bool is_valid_degree(const std::string& word);

struct CrucialInfo {
    std::string task_description;
    CriteriaTree criteria;
    std::string reference_response;  // empty iff task_family is math/code
};

// ---- critiques ----

struct Acu {
    std::vector<int> citations;  // non-empty label indices
    std::string description;
    std::string criterion_name;  // exactly one criterion per ACU
    Severity severity = Severity::Negligible;
    std::string suggestion;
};

struct AnalyticalCritique {
    std::string agent_id;
    std::vector<Acu> acus;
    std::string raw_markdown;
};

struct MetaLabel {
    QualityCategory category = QualityCategory::L0;
    std::string rationale;
};

struct FinalCritique {
    std::vector<Acu> merged_acus;
    std::map<std::string, std::string> per_primary_summary;
    double judgment_score = 0.0;  // in [1, 10], fractional allowed
    std::string raw_markdown;
};

struct MarsEvidence {
    std::vector<double> chosen;
    std::vector<double> rejected;
};

struct PreferencePair {
    std::string sample_id;
    std::string chosen_id;
    std::string rejected_id;
    std::string chosen_text;   // ACU-list markdown fed to revisers
    std::string rejected_text;
    int chosen_severity = 0;
    int rejected_severity = 0;
    MarsVerdict mars_verdict = MarsVerdict::unevaluated;
    MarsEvidence mars_evidence;
};

// ---- helpers ----

// "[user]: ...\n[assistant]: ..." rendition used inside prompts.
std::string format_conversation(const Query& query);

}  // namespace mc
