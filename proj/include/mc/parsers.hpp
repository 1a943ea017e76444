#pragma once

#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/types.hpp"

namespace mc {

// All parsers take raw agent markdown. Hard structural problems raise
// ParseError; per-entry problems inside a critique drop the entry and are
// counted instead.

// Body text under "# Task Description".
std::string parse_task_description(const std::string& markdown);

// "## " headings become primaries, "### " fine-grained; "Description:" and
// "Degree:" lines are captured. Degree outside {normal, medium, important}
// or a missing Degree is a parse error naming the heading.
CriteriaTree parse_criteria(const std::string& markdown);

struct ParsedAcus {
    std::vector<Acu> acus;
    int dropped = 0;  // entries failing hard validation rules
};

// Raised when a critique contains no parseable feedback entries and does not
// state that the response is flaw-free.
class EmptyCritiqueError : public Error {
public:
    explicit EmptyCritiqueError(const std::string& what) : Error(what) {}
};

// Feedback entries split at "## Feedback Entry" headings (bare
// "Citation Symbol:" groups are accepted too). Citation forms: "[S2]",
// "[S2] - [S4]" (inclusive range), "[S1] [S2] [S3]". Entries with dangling
// citations or other hard violations are dropped and counted.
ParsedAcus parse_acus(const std::string& markdown, const EvaluatedResponse& response,
                      const CriteriaTree& tree);

// Critique markdown for an ACU list, in the same shape parse_acus reads.
// parse_acus(serialize_acus(x)) == x for valid lists.
std::string serialize_acus(const std::vector<Acu>& acus);

// Meta-judge analyses: "## Analysis Entry k" blocks with "Category: E<d>"
// mapped positionally onto L0..L6.
std::vector<MetaLabel> parse_meta_labels(const std::string& markdown);

// Summarizer output: merged ACU list, per-primary summary paragraphs, and
// the "Score: x" judgment. Scores outside [1,10] are hard parse errors.
FinalCritique parse_final_critique(const std::string& markdown,
                                   const EvaluatedResponse& response,
                                   const CriteriaTree& tree);

}  // namespace mc
