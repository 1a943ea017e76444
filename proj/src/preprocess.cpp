#include "mc/preprocess.hpp"

#include <algorithm>
#include <cctype>

#include "mc/common.hpp"

namespace mc {

namespace {

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?' || c == ';'; }

// Byte length of a closing quote/bracket at position i, or 0. Covers the
// ASCII closers plus the common UTF-8 curly quotes and guillemet.
std::size_t closer_len(const std::string& t, std::size_t i) {
    if (i >= t.size()) return 0;
    char c = t[i];
    if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
    if (i + 3 <= t.size()) {
        unsigned char a = t[i], b = t[i + 1], d = t[i + 2];
        if (a == 0xe2 && b == 0x80 && (d == 0x9d || d == 0x99)) return 3;  // curly ” ’
    }
    if (i + 2 <= t.size()) {
        unsigned char a = t[i], b = t[i + 1];
        if (a == 0xc2 && b == 0xbb) return 2;  // »
    }
    return 0;
}

bool has_content(const std::string& t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
        if (!std::isspace(static_cast<unsigned char>(t[i]))) return true;
    return false;
}

std::size_t first_nonspace(const std::string& t, std::size_t b, std::size_t e) {
    while (b < e && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
    return b;
}

std::size_t last_nonspace_end(const std::string& t, std::size_t b, std::size_t e) {
    while (e > b && std::isspace(static_cast<unsigned char>(t[e - 1]))) --e;
    return e;
}

std::string marker(int k) { return " [S" + std::to_string(k) + "]"; }

LabeledText label_prose(const std::string& text) {
    LabeledText out;
    out.labeled_text.reserve(text.size() + text.size() / 8);
    int k = 1;
    std::size_t seg_start = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_terminal(text[i])) {
            ++i;
            continue;
        }
        const std::size_t punct_start = i;
        while (i < n && is_terminal(text[i])) ++i;
        for (std::size_t len = closer_len(text, i); len != 0; len = closer_len(text, i)) i += len;
        const std::size_t sent_end = i;
        if (has_content(text, seg_start, punct_start)) {
            out.labeled_text.append(text, seg_start, punct_start - seg_start);
            out.labeled_text += marker(k);
            out.labeled_text.append(text, punct_start, sent_end - punct_start);
            out.spans.push_back({k, first_nonspace(text, seg_start, punct_start), sent_end});
            ++k;
        } else {
            // Stray punctuation with no sentence content gets no label.
            out.labeled_text.append(text, seg_start, sent_end - seg_start);
        }
        seg_start = sent_end;
    }
    if (has_content(text, seg_start, n)) {
        // Trailing fragment without terminal punctuation.
        out.labeled_text.append(text, seg_start, n - seg_start);
        out.labeled_text += marker(k);
        out.spans.push_back({k, first_nonspace(text, seg_start, n), n});
    } else {
        out.labeled_text.append(text, seg_start, n - seg_start);
    }
    return out;
}

LabeledText label_code(const std::string& text) {
    LabeledText out;
    out.labeled_text.reserve(text.size() + text.size() / 8);
    int k = 1;
    std::size_t pos = 0;
    const std::size_t n = text.size();
    while (pos <= n) {
        std::size_t nl = text.find('\n', pos);
        const std::size_t line_end = (nl == std::string::npos) ? n : nl;
        if (has_content(text, pos, line_end)) {
            out.labeled_text.append(text, pos, line_end - pos);
            out.labeled_text += marker(k);
            out.spans.push_back({k, first_nonspace(text, pos, line_end),
                                 last_nonspace_end(text, pos, line_end)});
            ++k;
        } else {
            out.labeled_text.append(text, pos, line_end - pos);
        }
        if (nl == std::string::npos) break;
        out.labeled_text += '\n';
        pos = nl + 1;
    }
    return out;
}

}  // namespace

LabeledText label_sentences(const std::string& text, LabelMode mode) {
    if (trim(text).empty()) throw Error("empty response");
    LabeledText out = (mode == LabelMode::code) ? label_code(text) : label_prose(text);
    if (out.spans.empty()) throw Error("empty response");
    return out;
}

BinResult bin_responses(const std::vector<ScoredCandidate>& candidates, BinPolicy policy,
                        double min_gap, const std::string& designated_generator) {
    auto by_score = [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.reward_score != b.reward_score) return a.reward_score < b.reward_score;
        if (a.generator_id != b.generator_id) return a.generator_id < b.generator_id;
        return a.response_text < b.response_text;
    };

    BinResult result;
    result.policy = policy;

    if (policy == BinPolicy::three_tier) {
        if (candidates.size() < 3)
            throw Error("bin_responses: need at least 3 candidates, got " +
                        std::to_string(candidates.size()));
        std::vector<ScoredCandidate> sorted = candidates;
        std::sort(sorted.begin(), sorted.end(), by_score);
        const ScoredCandidate& low = sorted.front();
        const ScoredCandidate& medium = sorted[(sorted.size() - 1) / 2];  // lower middle on ties
        const ScoredCandidate& high = sorted.back();
        const double lo_gap = medium.reward_score - low.reward_score;
        const double hi_gap = high.reward_score - medium.reward_score;
        if (lo_gap < min_gap || hi_gap < min_gap || lo_gap <= 0.0 || hi_gap <= 0.0)
            throw Error("no significant gap");
        result.triple = QualityTriple{low, medium, high};
        return result;
    }

    if (designated_generator.empty())
        throw Error("two_tier_reasoning requires a designated high-quality generator");
    std::vector<ScoredCandidate> designated, others;
    for (const auto& c : candidates) {
        (c.generator_id == designated_generator ? designated : others).push_back(c);
    }
    if (designated.empty() || others.empty())
        throw Error("bin_responses: two_tier_reasoning needs a designated candidate and at least one other");
    const ScoredCandidate high = *std::max_element(designated.begin(), designated.end(), by_score);
    const ScoredCandidate low = *std::min_element(others.begin(), others.end(), by_score);
    if (high.reward_score - low.reward_score < min_gap)
        throw Error("no significant gap");
    result.pair = QualityPair{low, high};
    return result;
}

}  // namespace mc
