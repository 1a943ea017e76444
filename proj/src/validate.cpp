#include "mc/validate.hpp"

#include <set>
#include <string>

#include "mc/common.hpp"

namespace mc {

ValidationResult validate_criteria(const CriteriaTree& tree) {
    ValidationResult result;
    if (tree.primaries.empty()) {
        result.violations.push_back({"empty-tree", "", "criteria tree has no primaries", false});
        return result;
    }
    std::size_t total = tree.fine_count();
    if (total > 15) {
        result.violations.push_back(
            {"fine-count", "", "fine-grained count " + std::to_string(total) + " > 15", false});
    }
    std::set<std::string> seen;
    for (const auto& primary : tree.primaries) {
        if (trim(primary.name).empty()) {
            result.violations.push_back({"empty-name", primary.name, "primary with empty name", false});
        }
        if (!seen.insert(normalize_name(primary.name)).second) {
            result.violations.push_back(
                {"duplicate-name", primary.name, "name appears more than once in tree", false});
        }
        if (primary.fine_grained.size() > 3) {
            result.violations.push_back(
                {"fine-per-primary", primary.name,
                 "primary has " + std::to_string(primary.fine_grained.size()) +
                     " fine-grained criteria > 3",
                 false});
        }
        for (const auto& fine : primary.fine_grained) {
            if (trim(fine.name).empty()) {
                result.violations.push_back(
                    {"empty-name", primary.name, "fine-grained criterion with empty name", false});
            }
            if (!seen.insert(normalize_name(fine.name)).second) {
                result.violations.push_back(
                    {"duplicate-name", fine.name, "name appears more than once in tree", false});
            }
            if (!is_valid_degree(fine.degree)) {
                result.violations.push_back(
                    {"unknown-degree", fine.name, "unknown degree \"" + fine.degree + "\"", false});
            }
        }
    }
    return result;
}

ValidationResult validate_acu(const Acu& acu, const EvaluatedResponse& response,
                              const CriteriaTree& tree) {
    ValidationResult result;
    if (acu.citations.empty()) {
        result.violations.push_back({"no-citation", acu.criterion_name, "ACU cites no sentence", false});
    }
    const int max_label = static_cast<int>(response.sentence_spans.size());
    for (int citation : acu.citations) {
        if (citation < 1 || citation > max_label) {
            result.violations.push_back(
                {"dangling-citation", "[S" + std::to_string(citation) + "]",
                 "citation outside 1.." + std::to_string(max_label), false});
        }
    }
    const std::string wanted = normalize_name(acu.criterion_name);
    bool fine_match = false;
    bool primary_match = false;
    for (const auto& primary : tree.primaries) {
        if (normalize_name(primary.name) == wanted) primary_match = true;
        for (const auto& fine : primary.fine_grained) {
            if (normalize_name(fine.name) == wanted) fine_match = true;
        }
    }
    if (!fine_match) {
        if (primary_match) {
            // Allowed, but the fine-grained tier is preferred.
            result.violations.push_back(
                {"primary-criterion", acu.criterion_name,
                 "ACU names a primary criterion instead of a fine-grained one", true});
        } else {
            result.violations.push_back(
                {"unknown-criterion", acu.criterion_name,
                 "criterion not found in tree", true});
        }
    }
    return result;
}

ValidationResult validate_query(const Query& query) {
    ValidationResult result;
    if (trim(query.id).empty())
        result.violations.push_back({"empty-id", "", "query id is empty", false});
    if (query.conversation.empty()) {
        result.violations.push_back({"empty-conversation", query.id, "conversation is empty", false});
    } else if (query.conversation.back().speaker != Speaker::user) {
        result.violations.push_back(
            {"last-turn-not-user", query.id, "conversation must end with a user turn", false});
    }
    return result;
}

ValidationResult validate_response(const EvaluatedResponse& response) {
    ValidationResult result;
    int expected = 1;
    std::size_t prev_end = 0;
    bool first = true;
    for (const auto& span : response.sentence_spans) {
        if (span.label != expected) {
            result.violations.push_back(
                {"label-gap", "[S" + std::to_string(span.label) + "]",
                 "labels must be 1..K contiguous", false});
        }
        ++expected;
        if (span.end <= span.begin || span.end > response.raw_text.size()) {
            result.violations.push_back(
                {"bad-span", "[S" + std::to_string(span.label) + "]",
                 "span empty or out of range", false});
        }
        if (!first && span.begin < prev_end) {
            result.violations.push_back(
                {"overlapping-span", "[S" + std::to_string(span.label) + "]",
                 "spans must not overlap", false});
        }
        prev_end = span.end;
        first = false;
    }
    if (strip_sentence_labels(response.labeled_text) != response.raw_text) {
        result.violations.push_back(
            {"label-strip-mismatch", response.id,
             "labeled_text does not strip back to raw_text", false});
    }
    return result;
}

std::string strip_sentence_labels(const std::string& labeled_text) {
    std::string out;
    out.reserve(labeled_text.size());
    std::size_t i = 0;
    const std::size_t n = labeled_text.size();
    while (i < n) {
        if (labeled_text[i] == ' ' && i + 3 < n && labeled_text[i + 1] == '[' &&
            labeled_text[i + 2] == 'S') {
            std::size_t j = i + 3;
            while (j < n && std::isdigit(static_cast<unsigned char>(labeled_text[j]))) ++j;
            if (j > i + 3 && j < n && labeled_text[j] == ']') {
                i = j + 1;  // skip " [Sk]"
                continue;
            }
        }
        out.push_back(labeled_text[i]);
        ++i;
    }
    return out;
}

}  // namespace mc
