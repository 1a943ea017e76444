#include "mc/types.hpp"

#include <algorithm>

#include "mc/common.hpp"

namespace mc {

const char* to_string(Speaker v) {
    switch (v) {
        case Speaker::user: return "user";
        case Speaker::assistant: return "assistant";
    }
    return "user";
}

const char* to_string(TaskFamily v) {
    switch (v) {
        case TaskFamily::general: return "general";
        case TaskFamily::math: return "math";
        case TaskFamily::code: return "code";
    }
    return "general";
}

const char* to_string(QualityTier v) {
    switch (v) {
        case QualityTier::low: return "low";
        case QualityTier::medium: return "medium";
        case QualityTier::high: return "high";
    }
    return "low";
}

const char* to_string(Severity v) {
    switch (v) {
        case Severity::Negligible: return "Negligible";
        case Severity::Minor: return "Minor";
        case Severity::Moderate: return "Moderate";
        case Severity::Severe: return "Severe";
    }
    return "Negligible";
}

const char* to_string(QualityCategory v) {
    static const char* names[] = {"L0", "L1", "L2", "L3", "L4", "L5", "L6"};
    return names[static_cast<std::size_t>(v)];
}

const char* to_string(MarsVerdict v) {
    switch (v) {
        case MarsVerdict::kept: return "kept";
        case MarsVerdict::dropped: return "dropped";
        case MarsVerdict::unevaluated: return "unevaluated";
    }
    return "unevaluated";
}

Speaker speaker_from_string(const std::string& s) {
    if (s == "user") return Speaker::user;
    if (s == "assistant") return Speaker::assistant;
    throw ParseError("unknown speaker: " + s);
}

TaskFamily task_family_from_string(const std::string& s) {
    if (s == "general") return TaskFamily::general;
    if (s == "math") return TaskFamily::math;
    if (s == "code") return TaskFamily::code;
    throw ParseError("unknown task_family: " + s);
}

QualityTier quality_tier_from_string(const std::string& s) {
    if (s == "low") return QualityTier::low;
    if (s == "medium") return QualityTier::medium;
    if (s == "high") return QualityTier::high;
    throw ParseError("unknown quality_tier: " + s);
}

Severity severity_from_string(const std::string& s) {
    std::string w = to_lower(trim(s));
    if (w == "negligible") return Severity::Negligible;
    if (w == "minor") return Severity::Minor;
    if (w == "moderate") return Severity::Moderate;
    if (w == "severe") return Severity::Severe;
    throw ParseError("unknown severity: " + s);
}

QualityCategory quality_category_from_string(const std::string& s) {
    std::string w = trim(s);
    if (w.size() == 2 && (w[0] == 'L' || w[0] == 'l') && w[1] >= '0' && w[1] <= '6')
        return static_cast<QualityCategory>(w[1] - '0');
    throw ParseError("unknown quality category: " + s);
}

MarsVerdict mars_verdict_from_string(const std::string& s) {
    if (s == "kept") return MarsVerdict::kept;
    if (s == "dropped") return MarsVerdict::dropped;
    if (s == "unevaluated") return MarsVerdict::unevaluated;
    throw ParseError("unknown mars verdict: " + s);
}

bool is_valid_degree(const std::string& word) {
    return std::any_of(kDegreeWords.begin(), kDegreeWords.end(),
                       [&](const char* w) { return word == w; });
}

std::string format_conversation(const Query& query) {
    std::string out;
    for (const auto& turn : query.conversation) {
        out += '[';
        out += to_string(turn.speaker);
        out += "]: ";
        out += turn.text;
        out += '\n';
    }
    if (!out.empty()) out.pop_back();
    return out;
}

}  // namespace mc
