#include "mc/parsers.hpp"

#include <cctype>
#include <cstdlib>

#include "mc/common.hpp"
#include "mc/validate.hpp"

namespace mc {

namespace {

// Matches "Key:" at the start of a line, tolerating markdown bold around the
// key. Returns the value after the colon, or nullopt.
std::optional<std::string> field_value(const std::string& line, const std::string& key) {
    std::string t = trim(line);
    if (starts_with(t, "**")) t = t.substr(2);
    if (!starts_with(to_lower(t), to_lower(key))) return std::nullopt;
    std::string rest = t.substr(key.size());
    rest = trim(rest);
    if (starts_with(rest, "**")) rest = trim(rest.substr(2));
    if (rest.empty() || rest[0] != ':') return std::nullopt;
    return trim(rest.substr(1));
}

bool is_ellipsis(const std::string& line) {
    const std::string t = trim(line);
    return t == "..." || t == "…";
}

struct CitationToken {
    int label;
    std::size_t begin;
    std::size_t end;
};

std::vector<CitationToken> citation_tokens(const std::string& text) {
    std::vector<CitationToken> tokens;
    std::size_t pos = 0;
    while ((pos = text.find("[S", pos)) != std::string::npos) {
        std::size_t j = pos + 2;
        int value = 0;
        bool any = false;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
            value = value * 10 + (text[j] - '0');
            ++j;
            any = true;
        }
        if (any && j < text.size() && text[j] == ']') {
            tokens.push_back({value, pos, j + 1});
            pos = j + 1;
        } else {
            pos += 2;
        }
    }
    return tokens;
}

// "[S2]" | "[S2] - [S4]" (inclusive, expanded) | "[S1] [S2] [S3]".
std::vector<int> parse_citations(const std::string& text) {
    const auto tokens = citation_tokens(text);
    if (tokens.empty()) return {};
    if (tokens.size() == 2) {
        std::string between = trim(text.substr(tokens[0].end, tokens[1].begin - tokens[0].end));
        if (between == "-" || between == "\xe2\x80\x93") {  // hyphen or en dash
            if (tokens[1].label < tokens[0].label) return {};
            std::vector<int> out;
            for (int k = tokens[0].label; k <= tokens[1].label; ++k) out.push_back(k);
            return out;
        }
    }
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.label);
    return out;
}

std::string normalize_degree(const std::string& value) {
    std::string w = to_lower(trim(value));
    while (!w.empty() && (w.back() == '.' || w.back() == ',')) w.pop_back();
    return w;
}

void append_text(std::string& target, const std::string& line) {
    const std::string t = trim(line);
    if (t.empty()) return;
    if (!target.empty()) target += ' ';
    target += t;
}

}  // namespace

std::string parse_task_description(const std::string& markdown) {
    const auto lines = split_lines(markdown);
    std::string body;
    bool in_section = false;
    for (const auto& line : lines) {
        const std::string t = trim(line);
        if (to_lower(t) == "# task description") {
            in_section = true;
            continue;
        }
        if (in_section) {
            if (starts_with(t, "# ")) break;
            if (t == "---") continue;
            append_text(body, line);
        }
    }
    if (!in_section) throw ParseError("no \"# Task Description\" heading found");
    if (body.empty()) throw ParseError("task description is empty");
    return body;
}

CriteriaTree parse_criteria(const std::string& markdown) {
    CriteriaTree tree;
    PrimaryCriterion* primary = nullptr;
    FineCriterion* fine = nullptr;
    bool fine_has_degree = true;

    auto close_fine = [&] {
        if (fine != nullptr && !fine_has_degree)
            throw ParseError("missing Degree for fine-grained criterion \"" + fine->name + "\"");
        fine = nullptr;
    };

    for (const auto& raw_line : split_lines(markdown)) {
        const std::string line = trim(raw_line);
        if (line.empty() || line == "---" || is_ellipsis(line)) continue;
        if (starts_with(line, "### ")) {
            close_fine();
            if (primary == nullptr)
                throw ParseError("fine-grained criterion before any primary: " + line);
            primary->fine_grained.push_back({trim(line.substr(4)), "", ""});
            fine = &primary->fine_grained.back();
            fine_has_degree = false;
            continue;
        }
        if (starts_with(line, "## ")) {
            close_fine();
            tree.primaries.push_back({trim(line.substr(3)), "", {}});
            primary = &tree.primaries.back();
            // Re-seat the fine pointer invalidated by vector growth.
            fine = nullptr;
            continue;
        }
        if (starts_with(line, "# ")) continue;  // section title
        if (auto value = field_value(line, "Description")) {
            if (fine != nullptr)
                append_text(fine->description, *value);
            else if (primary != nullptr)
                append_text(primary->description, *value);
            continue;
        }
        if (auto value = field_value(line, "Degree")) {
            if (fine == nullptr)
                throw ParseError("Degree line outside a fine-grained criterion: " + line);
            const std::string word = normalize_degree(*value);
            if (!is_valid_degree(word)) throw ParseError("unknown degree \"" + *value +
                                                         "\" for \"" + fine->name + "\"");
            fine->degree = word;
            fine_has_degree = true;
            continue;
        }
        // Loose prose between nodes extends the current description.
        if (fine != nullptr)
            append_text(fine->description, line);
        else if (primary != nullptr)
            append_text(primary->description, line);
    }
    close_fine();
    return tree;
}

namespace {

std::vector<std::vector<std::string>> split_entry_blocks(const std::vector<std::string>& lines) {
    std::vector<std::vector<std::string>> blocks;
    bool numbered_headings = false;
    for (const auto& line : lines)
        if (starts_with(trim(line), "## Feedback Entry")) numbered_headings = true;

    std::vector<std::string> current;
    bool in_block = false;
    auto flush = [&] {
        if (in_block && !current.empty()) blocks.push_back(current);
        current.clear();
    };
    for (const auto& line : lines) {
        const std::string t = trim(line);
        const bool opens = numbered_headings ? starts_with(t, "## Feedback Entry")
                                             : field_value(line, "Citation Symbol").has_value();
        if (opens) {
            flush();
            in_block = true;
            if (!numbered_headings) current.push_back(line);
            continue;
        }
        if (in_block) {
            if (starts_with(t, "# ") || starts_with(t, "## ")) {
                flush();
                in_block = false;
                continue;
            }
            current.push_back(line);
        }
    }
    flush();
    return blocks;
}

std::optional<Acu> parse_acu_block(const std::vector<std::string>& lines) {
    Acu acu;
    bool have_citation = false, have_severity = false, have_criterion = false;
    std::string* continuation = nullptr;
    for (const auto& line : lines) {
        if (is_ellipsis(line)) continue;
        if (auto v = field_value(line, "Citation Symbol")) {
            acu.citations = parse_citations(*v);
            have_citation = true;
            continuation = nullptr;
            continue;
        }
        if (auto v = field_value(line, "Belong to Criteria")) {
            acu.criterion_name = *v;
            have_criterion = true;
            continuation = nullptr;
            continue;
        }
        if (auto v = field_value(line, "Description")) {
            acu.description = *v;
            continuation = &acu.description;
            continue;
        }
        if (auto v = field_value(line, "Severity")) {
            try {
                acu.severity = severity_from_string(*v);
            } catch (const ParseError&) {
                return std::nullopt;
            }
            have_severity = true;
            continuation = nullptr;
            continue;
        }
        if (auto v = field_value(line, "Suggestion")) {
            acu.suggestion = *v;
            continuation = &acu.suggestion;
            continue;
        }
        if (continuation != nullptr) append_text(*continuation, line);
    }
    if (!have_citation || !have_severity || !have_criterion || acu.citations.empty())
        return std::nullopt;
    return acu;
}

bool states_no_flaws(const std::string& markdown) {
    const std::string lower = to_lower(markdown);
    return lower.find("no flaw") != std::string::npos ||
           lower.find("free from any flaws") != std::string::npos ||
           lower.find("no issues found") != std::string::npos;
}

ParsedAcus parse_acu_section(const std::string& markdown, const EvaluatedResponse& response,
                             const CriteriaTree& tree) {
    ParsedAcus out;
    for (const auto& block : split_entry_blocks(split_lines(markdown))) {
        auto acu = parse_acu_block(block);
        if (!acu) {
            ++out.dropped;
            continue;
        }
        ValidationResult check = validate_acu(*acu, response, tree);
        if (!check.ok()) {
            ++out.dropped;
            continue;
        }
        out.acus.push_back(std::move(*acu));
    }
    return out;
}

}  // namespace

ParsedAcus parse_acus(const std::string& markdown, const EvaluatedResponse& response,
                      const CriteriaTree& tree) {
    ParsedAcus out = parse_acu_section(markdown, response, tree);
    if (out.acus.empty() && !states_no_flaws(markdown))
        throw EmptyCritiqueError("no parseable feedback entries (" +
                                 std::to_string(out.dropped) + " dropped)");
    return out;
}

std::string serialize_acus(const std::vector<Acu>& acus) {
    std::string out = "# List of Flaws in Response\n";
    int entry = 1;
    for (const auto& acu : acus) {
        out += "\n## Feedback Entry " + std::to_string(entry++) + "\n";
        out += "Citation Symbol: ";
        bool contiguous_run = acu.citations.size() >= 3;
        for (std::size_t i = 1; i < acu.citations.size() && contiguous_run; ++i)
            contiguous_run = acu.citations[i] == acu.citations[i - 1] + 1;
        if (contiguous_run) {
            out += "[S" + std::to_string(acu.citations.front()) + "] - [S" +
                   std::to_string(acu.citations.back()) + "]";
        } else {
            for (std::size_t i = 0; i < acu.citations.size(); ++i) {
                if (i) out += ' ';
                out += "[S" + std::to_string(acu.citations[i]) + "]";
            }
        }
        out += '\n';
        out += "Description: " + acu.description + '\n';
        out += "Belong to Criteria: " + acu.criterion_name + '\n';
        out += "Severity: " + std::string(to_string(acu.severity)) + '\n';
        out += "Suggestion: " + acu.suggestion + '\n';
    }
    return out;
}

std::vector<MetaLabel> parse_meta_labels(const std::string& markdown) {
    std::vector<MetaLabel> labels;
    bool in_entry = false;
    MetaLabel current;
    bool have_category = false;
    std::string* continuation = nullptr;
    auto flush = [&] {
        if (in_entry) {
            if (!have_category) throw ParseError("analysis entry without Category line");
            labels.push_back(current);
        }
        current = {};
        have_category = false;
        continuation = nullptr;
    };
    for (const auto& line : split_lines(markdown)) {
        const std::string t = trim(line);
        if (starts_with(t, "## Analysis Entry")) {
            flush();
            in_entry = true;
            continue;
        }
        if (!in_entry) continue;
        if (starts_with(t, "# ")) {
            flush();
            in_entry = false;
            continue;
        }
        if (auto v = field_value(line, "Category")) {
            std::string code = trim(*v);
            while (!code.empty() && (code.back() == '.' || code.back() == ','))
                code.pop_back();
            if (code.size() != 2 || (code[0] != 'E' && code[0] != 'e') || code[1] < '0' ||
                code[1] > '6')
                throw ParseError("unknown analysis category \"" + *v + "\"");
            current.category = static_cast<QualityCategory>(code[1] - '0');
            have_category = true;
            continuation = nullptr;
            continue;
        }
        if (auto v = field_value(line, "Rationale")) {
            current.rationale = *v;
            continuation = &current.rationale;
            continue;
        }
        if (continuation != nullptr) append_text(*continuation, line);
    }
    flush();
    if (labels.empty()) throw ParseError("no analysis entries found");
    return labels;
}

namespace {

// Section body between a "# Heading" line and the next "# " line.
std::string section_body(const std::vector<std::string>& lines, const std::string& heading,
                         bool* found = nullptr) {
    std::string body;
    bool in_section = false;
    for (const auto& line : lines) {
        const std::string t = trim(line);
        if (starts_with(t, "# ") && !starts_with(t, "## ")) {
            const std::string name = to_lower(trim(t.substr(2)));
            if (in_section) break;
            in_section = name == to_lower(heading);
            if (in_section && found != nullptr) *found = true;
            continue;
        }
        if (in_section) {
            body += line;
            body += '\n';
        }
    }
    return body;
}

}  // namespace

FinalCritique parse_final_critique(const std::string& markdown,
                                   const EvaluatedResponse& response,
                                   const CriteriaTree& tree) {
    FinalCritique out;
    out.raw_markdown = markdown;
    const auto lines = split_lines(markdown);

    // An empty merged list is legitimate here: a flawless response keeps no
    // feedback entries.
    const std::string acu_body = section_body(lines, "The List of ACUs");
    ParsedAcus parsed = parse_acu_section(acu_body, response, tree);
    out.merged_acus = std::move(parsed.acus);

    const std::string summary_body = section_body(lines, "Summarization");
    std::string current_name;
    std::string current_text;
    auto flush = [&] {
        if (!current_name.empty()) out.per_primary_summary[current_name] = trim(current_text);
        current_name.clear();
        current_text.clear();
    };
    for (const auto& line : split_lines(summary_body)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        bool opened = false;
        if (starts_with(t, "**")) {
            const auto close = t.find("**", 2);
            if (close != std::string::npos) {
                std::string head = trim(t.substr(2, close - 2));
                // strip "N." prefix
                std::size_t i = 0;
                while (i < head.size() && std::isdigit(static_cast<unsigned char>(head[i]))) ++i;
                if (i > 0 && i < head.size() && head[i] == '.') {
                    flush();
                    current_name = trim(head.substr(i + 1));
                    current_text = trim(t.substr(close + 2));
                    opened = true;
                }
            }
        } else {
            std::size_t i = 0;
            while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
            if (i > 0 && i < t.size() && t[i] == '.') {
                flush();
                current_name = trim(t.substr(i + 1));
                current_text.clear();
                opened = true;
            }
        }
        if (!opened && !current_name.empty()) append_text(current_text, t);
    }
    flush();

    bool judgement_found = false;
    std::string judgement_body = section_body(lines, "Final Judgement", &judgement_found);
    if (!judgement_found) judgement_body = section_body(lines, "Final Judgment", &judgement_found);
    std::optional<double> score;
    const auto score_lines = judgement_found ? split_lines(judgement_body) : lines;
    for (const auto& line : score_lines) {
        if (auto v = field_value(line, "Score")) {
            const char* start = v->c_str();
            char* end = nullptr;
            const double value = std::strtod(start, &end);
            if (end == start) throw ParseError("unparseable judgment score: \"" + *v + "\"");
            score = value;
            break;
        }
    }
    if (!score) throw ParseError("no \"Score:\" line in summarizer output");
    if (*score < 1.0 || *score > 10.0)
        throw ParseError("judgment score " + std::to_string(*score) + " outside [1,10]");
    out.judgment_score = *score;
    return out;
}

}  // namespace mc
