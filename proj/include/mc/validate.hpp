#pragma once

#include <string>
#include <vector>

#include "mc/types.hpp"

namespace mc {

// Validation findings are data, not faults. Hard violations reject the
// value; soft ones are recorded and carried along.
struct Violation {
    std::string rule;  // short machine-readable rule id
    std::string node;  // offending node (criterion name, citation, ...)
    std::string detail;
    bool soft = false;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const {
        for (const auto& v : violations)
            if (!v.soft) return false;
        return true;
    }
    bool has_soft() const {
        for (const auto& v : violations)
            if (v.soft) return true;
        return false;
    }
};

// Structural rules: non-empty tree, fine-grained total <= 15, <= 3 per
// primary, unique names across both tiers, degree in {normal,medium,important}.
ValidationResult validate_criteria(const CriteriaTree& tree);

// Citations must resolve against the response's sentence spans; the
// criterion name should match a tree node. A primary-tier or unknown
// criterion name is a soft violation, not a rejection.
ValidationResult validate_acu(const Acu& acu, const EvaluatedResponse& response,
                              const CriteriaTree& tree);

ValidationResult validate_query(const Query& query);

// Checks label contiguity, span sanity, and that stripping the inserted
// "[Sk]" markers reproduces raw_text byte for byte.
ValidationResult validate_response(const EvaluatedResponse& response);

// Removes every " [Sk]" marker (token plus the one inserted space).
std::string strip_sentence_labels(const std::string& labeled_text);

}  // namespace mc
