#include "mc/mock.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <set>
#include <thread>

#include "mc/common.hpp"

namespace mc {

void MockInstrumentation::begin(const AgentSpec& spec, const ChatRequest& request,
                                const std::string& digest) {
    std::lock_guard<std::mutex> lock(mutex_);
    ++in_flight_;
    max_in_flight_ = std::max(max_in_flight_, in_flight_);
    ++total_calls_;
    ++attempts_[digest];
    transcript_.push_back(
        {to_string(request.template_id), digest, spec.model_name, request.request_id,
         request.messages});
}

void MockInstrumentation::end() {
    std::lock_guard<std::mutex> lock(mutex_);
    --in_flight_;
}

int MockInstrumentation::max_in_flight() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return max_in_flight_;
}

std::uint64_t MockInstrumentation::total_calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return total_calls_;
}

int MockInstrumentation::attempts_for(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = attempts_.find(digest);
    return it == attempts_.end() ? 0 : it->second;
}

std::vector<MockInstrumentation::Entry> MockInstrumentation::transcript() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return transcript_;
}

void MockInstrumentation::reset() {
    std::lock_guard<std::mutex> lock(mutex_);
    in_flight_ = 0;
    max_in_flight_ = 0;
    total_calls_ = 0;
    attempts_.clear();
    transcript_.clear();
}

TransportReply MockTransport::send(const AgentSpec& spec, const ChatRequest& request) {
    const std::uint64_t digest = request_digest(spec, request);
    stats_.begin(spec, request, to_hex16(digest));
    TransportReply reply = generate(spec, request, digest);
    stats_.end();
    return reply;
}

// ---- fixture transport ----

FixtureTransport::FixtureTransport(std::string dir) : dir_(std::move(dir)) {}

std::string FixtureTransport::fixture_name(TemplateId id, std::uint64_t digest) {
    return std::string(to_string(id)) + "_" + to_hex16(digest) + ".md";
}

TransportReply FixtureTransport::generate(const AgentSpec&, const ChatRequest& request,
                                          std::uint64_t digest) {
    const std::string name = fixture_name(request.template_id, digest);
    const std::string path = (std::filesystem::path(dir_) / name).string();
    TransportReply reply;
    if (!file_exists(path)) {
        reply.status = ChatStatus::fixture_missing;
        reply.error = "fixture missing: " + name;
        return reply;
    }
    reply.content = read_file(path);
    return reply;
}

// ---- synthetic transport ----

namespace {

const std::vector<std::string> kTopics = {
    "the requested subject", "the user's scenario",  "the described situation",
    "the given constraints", "the stated objective", "the supporting details"};

const std::vector<std::string> kQualities = {"thorough", "precise", "balanced",
                                             "well-structured", "practical"};

const std::vector<std::string> kPrimaryNames = {
    "Completeness of Instruction Following",
    "Accuracy",
    "Information Richness",
    "Harmlessness",
    "Text Quality",
    "User Intention Inference",
    "Clarity of Structure",
    "Relevance to Query"};

const std::vector<std::string> kFineNames = {
    "Immediate Action",       "Reporting Detail",     "Personal Safety",
    "Factual Correctness",    "Logical Consistency",  "Terminology Use",
    "Detailed Steps",         "Supporting Evidence",  "Context Coverage",
    "Tone Appropriateness",   "Grammar and Fluency",  "Formatting Quality",
    "Intent Alignment",       "Scope Control",        "Ambiguity Handling",
    "Actionable Guidance",    "Example Quality",      "Ordering of Ideas",
    "Conciseness",            "Audience Fit",         "Risk Awareness",
    "Consistency of Voice",   "Coverage of Edge Cases", "Justification Depth"};

const std::vector<std::string> kFlawTexts = {
    "The statement overlooks a constraint that the query makes explicit.",
    "The claim in the cited sentence is not supported by the given context.",
    "The cited sentence drifts away from the main objective of the query.",
    "The wording is vague where the task calls for a concrete commitment.",
    "The cited passage repeats earlier content without adding information.",
    "The sentence asserts a detail that conflicts with the reference answer."};

const std::vector<std::string> kSuggestionTexts = {
    "Rewrite the sentence to state the constraint explicitly.",
    "Add a short justification that ties the claim back to the query.",
    "Replace the vague phrasing with a concrete, checkable statement.",
    "Remove the repetition and fold any new detail into the earlier passage.",
    "Align the detail with the reference answer or drop it."};

const std::vector<std::string> kReferenceSentences = {
    "A strong answer opens by restating the goal in one line.",
    "It then addresses each requirement in the order the query raises them.",
    "Concrete details are preferred over general claims throughout.",
    "It closes by checking the result against the stated constraints.",
    "Edge cases called out in the query receive explicit treatment."};

const std::vector<std::string> kRevisionSentences = {
    "The revised answer restates the goal before addressing the details.",
    "Each criticized passage has been rewritten with concrete wording.",
    "Unsupported claims were either justified or removed.",
    "The structure now follows the order of the original request.",
    "The closing paragraph verifies the constraints one by one."};

const char* kSeverityWords[] = {"Negligible", "Minor", "Moderate", "Severe"};

std::string last_user_content(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it)
        if (it->role == "user") return it->content;
    return {};
}

int max_sentence_label(const std::string& text) {
    int max_k = 0;
    std::size_t pos = 0;
    while ((pos = text.find("[S", pos)) != std::string::npos) {
        std::size_t j = pos + 2;
        int value = 0;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
            value = value * 10 + (text[j] - '0');
            ++j;
        }
        if (j < text.size() && text[j] == ']' && j > pos + 2) max_k = std::max(max_k, value);
        pos = j;
    }
    return max_k;
}

// Criteria names as seen in the chain context (assistant turns only, so the
// template texts in user turns don't leak in).
void collect_criteria_names(const ChatRequest& request, std::vector<std::string>& primaries,
                            std::vector<std::string>& fines) {
    for (const auto& msg : request.messages) {
        if (msg.role != "assistant") continue;
        if (msg.content.find("# Two-tier Structure of Criteria") == std::string::npos) continue;
        for (const auto& line : split_lines(msg.content)) {
            if (starts_with(line, "### "))
                fines.push_back(trim(line.substr(4)));
            else if (starts_with(line, "## "))
                primaries.push_back(trim(line.substr(3)));
        }
    }
}

std::string user_provided_primaries(const ChatRequest& request) {
    const std::string content = last_user_content(request);
    const std::string open = "# Our Provided Criteria List\n";
    auto begin = content.find(open);
    if (begin == std::string::npos) return {};
    begin += open.size();
    auto end = content.find("\n---", begin);
    if (end == std::string::npos) end = content.size();
    return trim(content.substr(begin, end - begin));
}

std::string make_acu_block(Rng& rng, int entry, int max_label,
                           const std::vector<std::string>& criteria_names) {
    std::string citation;
    const int form = static_cast<int>(rng.bounded(3));
    const int a = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_label)));
    if (form == 1 && a < max_label) {
        citation = "[S" + std::to_string(a) + "] - [S" + std::to_string(a + 1) + "]";
    } else if (form == 2 && a + 2 <= max_label) {
        citation = "[S" + std::to_string(a) + "] [S" + std::to_string(a + 1) + "] [S" +
                   std::to_string(a + 2) + "]";
    } else {
        citation = "[S" + std::to_string(a) + "]";
    }
    std::string block = "## Feedback Entry " + std::to_string(entry) + "\n";
    block += "Citation Symbol: " + citation + "\n";
    block += "Description: " + rng.pick(kFlawTexts) + "\n";
    block += "Belong to Criteria: " + rng.pick(criteria_names) + "\n";
    block += "Severity: " + std::string(kSeverityWords[rng.bounded(4)]) + "\n";
    block += "Suggestion: " + rng.pick(kSuggestionTexts) + "\n";
    return block;
}

std::string generate_task_description(Rng& rng) {
    std::string out = "# Task Description\n";
    out += "The user's query asks for a " + rng.pick(kQualities) + " treatment of " +
           rng.pick(kTopics) + ", with particular attention to " + rng.pick(kTopics) + ".";
    return out;
}

std::string generate_criteria(Rng& rng, const std::string& user_primaries) {
    std::vector<std::string> primaries;
    for (const auto& line : split_lines(user_primaries)) {
        std::string name = trim(line);
        while (!name.empty() && (name.front() == '-' || name.front() == '*' ||
                                 std::isdigit(static_cast<unsigned char>(name.front())) ||
                                 name.front() == '.' || name.front() == ')'))
            name.erase(name.begin());
        name = trim(name);
        if (!name.empty()) primaries.push_back(name);
    }
    std::vector<std::string> pool = kPrimaryNames;
    rng.shuffle(pool);
    for (const auto& name : pool) {
        if (primaries.size() >= 2 + rng.bounded(2)) break;
        if (std::find(primaries.begin(), primaries.end(), name) == primaries.end())
            primaries.push_back(name);
    }

    std::vector<std::string> fine_pool = kFineNames;
    rng.shuffle(fine_pool);
    std::size_t fine_index = 0;

    std::string out = "# Two-tier Structure of Criteria\n";
    const char* degrees[] = {"normal", "medium", "important"};
    for (const auto& primary : primaries) {
        out += "\n## " + primary + "\n";
        out += "Description: How the response performs on " + to_lower(primary) + ".\n";
        const std::size_t n_fine = 1 + rng.bounded(3);
        for (std::size_t i = 0; i < n_fine && fine_index < fine_pool.size(); ++i) {
            out += "\n### " + fine_pool[fine_index++] + "\n";
            out += "Description: " + rng.pick(kFlawTexts) + "\n";
            out += "Degree: " + std::string(degrees[rng.bounded(3)]) + "\n";
        }
    }
    return out;
}

std::string generate_reference(Rng& rng) {
    std::vector<std::string> pool = kReferenceSentences;
    rng.shuffle(pool);
    const std::size_t n = 2 + rng.bounded(3);
    std::string out;
    for (std::size_t i = 0; i < n && i < pool.size(); ++i) {
        if (i) out += ' ';
        out += pool[i];
    }
    return out;
}

std::string generate_critique(Rng& rng, const ChatRequest& request, const AgentSpec& spec) {
    const std::string user = last_user_content(request);
    int max_label = max_sentence_label(user);
    if (max_label == 0) max_label = 3;
    std::vector<std::string> primaries, fines;
    collect_criteria_names(request, primaries, fines);
    if (fines.empty()) fines = {"Factual Correctness"};

    // Critic "skill" differs per model so accumulated severities spread out
    // and severity-gap pairs actually occur at desk scale.
    Rng agent_rng(fnv1a64(spec.model_name));
    const std::size_t n_acus = 1 + (agent_rng.next_u64() + rng.next_u64()) % 4;

    std::string out = "# List of Flaws in Response\n";
    for (std::size_t entry = 1; entry <= n_acus; ++entry) {
        std::vector<std::string> names = fines;
        if (!primaries.empty() && rng.bounded(10) == 0) names.push_back(primaries.front());
        out += "\n" + make_acu_block(rng, static_cast<int>(entry), max_label, names);
    }
    return out;
}

std::string target_agent_id(const std::string& user_content) {
    const std::string tag = "The corresponding model to analyze now is: ";
    auto pos = user_content.find(tag);
    if (pos == std::string::npos) return {};
    pos += tag.size();
    auto end = user_content.find_first_of(".\n", pos);
    if (end == std::string::npos) end = user_content.size();
    return trim(user_content.substr(pos, end - pos));
}

struct ContextCritique {
    std::string agent_id;
    std::vector<std::string> entry_blocks;
};

std::vector<ContextCritique> parse_context_critiques(const ChatRequest& request) {
    std::vector<ContextCritique> out;
    for (const auto& msg : request.messages) {
        if (msg.role != "assistant") continue;
        if (msg.content.find("# Critiques From Models") == std::string::npos) continue;
        const auto lines = split_lines(msg.content);
        ContextCritique current;
        std::string block;
        auto flush_block = [&] {
            if (!block.empty() && !current.agent_id.empty())
                current.entry_blocks.push_back(trim(block));
            block.clear();
        };
        auto flush_model = [&] {
            flush_block();
            if (!current.agent_id.empty()) out.push_back(current);
            current = {};
        };
        for (const auto& line : lines) {
            if (starts_with(line, "## Critique From Model ")) {
                flush_model();
                current.agent_id = trim(line.substr(23));
            } else if (starts_with(line, "## Feedback Entry")) {
                flush_block();
                block = line;
                block += '\n';
            } else if (!block.empty()) {
                block += line;
                block += '\n';
            }
        }
        flush_model();
    }
    return out;
}

std::string generate_meta(Rng& rng, const ChatRequest& request) {
    const std::string user = last_user_content(request);
    const std::string target = target_agent_id(user);
    int entries = 1;
    for (const auto& critique : parse_context_critiques(request)) {
        if (critique.agent_id == target) {
            entries = std::max<std::size_t>(1, critique.entry_blocks.size());
            break;
        }
    }

    // Judged quality is a stable function of the target agent, so the same
    // critic is consistently strong or weak across samples.
    const std::uint64_t skill = fnv1a64(target) % 100;
    std::vector<int> weights;
    if (skill < 40) {
        weights = {70, 2, 6, 8, 4, 4, 6};  // mostly correct ACUs
    } else if (skill < 75) {
        weights = {45, 12, 10, 8, 10, 8, 7};
    } else {
        weights = {20, 25, 10, 8, 18, 12, 7};  // frequently flawed ACUs
    }
    int total = 0;
    for (int w : weights) total += w;

    std::string out = "# List of Analyses for Model " + target + "\n";
    for (int i = 1; i <= entries; ++i) {
        int draw = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(total)));
        int code = 0;
        for (std::size_t c = 0; c < weights.size(); ++c) {
            draw -= weights[c];
            if (draw < 0) {
                code = static_cast<int>(c);
                break;
            }
        }
        out += "\n## Analysis Entry " + std::to_string(i) + "\n";
        out += "Category: E" + std::to_string(code) + "\n";
        out += "Rationale: " + rng.pick(kFlawTexts) + "\n";
    }
    return out;
}

struct ContextAnalysis {
    std::string agent_id;
    std::vector<int> codes;
};

std::vector<ContextAnalysis> parse_context_analyses(const ChatRequest& request) {
    std::vector<ContextAnalysis> out;
    for (const auto& msg : request.messages) {
        if (msg.role != "assistant") continue;
        if (msg.content.find("# Meta-Evaluation Analyses") == std::string::npos) continue;
        ContextAnalysis current;
        for (const auto& line : split_lines(msg.content)) {
            if (starts_with(line, "## Analyses for Model ")) {
                if (!current.agent_id.empty()) out.push_back(current);
                current = {trim(line.substr(22)), {}};
            } else if (starts_with(trim(line), "Category: E")) {
                const std::string t = trim(line);
                if (t.size() > 11 && t[11] >= '0' && t[11] <= '6')
                    current.codes.push_back(t[11] - '0');
            }
        }
        if (!current.agent_id.empty()) out.push_back(current);
    }
    return out;
}

std::string generate_summary(Rng& rng, const ChatRequest& request) {
    std::vector<std::string> primaries, fines;
    collect_criteria_names(request, primaries, fines);
    if (primaries.empty()) primaries = {"Accuracy"};

    // Retain ACUs the meta pass judged correct (E0), mirroring the
    // retain-and-merge instruction; fall back to the first entry if the
    // judge liked nothing.
    const auto critiques = parse_context_critiques(request);
    const auto analyses = parse_context_analyses(request);
    std::vector<std::string> retained;
    std::set<std::string> seen;
    for (const auto& critique : critiques) {
        const ContextAnalysis* analysis = nullptr;
        for (const auto& a : analyses)
            if (a.agent_id == critique.agent_id) analysis = &a;
        for (std::size_t i = 0; i < critique.entry_blocks.size(); ++i) {
            const bool correct =
                analysis != nullptr && i < analysis->codes.size() && analysis->codes[i] == 0;
            if (!correct) continue;
            if (retained.size() >= 4) break;
            if (seen.insert(critique.entry_blocks[i]).second)
                retained.push_back(critique.entry_blocks[i]);
        }
    }
    if (retained.empty() && !critiques.empty() && !critiques.front().entry_blocks.empty())
        retained.push_back(critiques.front().entry_blocks.front());

    std::string out = "# The List of ACUs\n";
    int entry = 1;
    for (const auto& block : retained) {
        // Renumber the copied blocks so entries stay sequential.
        auto lines = split_lines(block);
        out += "\n## Feedback Entry " + std::to_string(entry++) + "\n";
        for (std::size_t i = 1; i < lines.size(); ++i) {
            out += lines[i];
            out += '\n';
        }
    }

    out += "\n# Summarization\n";
    int idx = 1;
    for (const auto& primary : primaries) {
        out += "**" + std::to_string(idx++) + ". " + primary + "** The response is " +
               rng.pick(kQualities) + " on this dimension, though " + to_lower(rng.pick(kFlawTexts)) +
               "\n";
    }

    const double score = 1.0 + static_cast<double>(rng.bounded(91)) / 10.0;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", score);
    out += "\n# Final Judgement\nScore: ";
    out += buf;
    return out;
}

std::string generate_revision(Rng& rng) {
    std::vector<std::string> pool = kRevisionSentences;
    rng.shuffle(pool);
    const std::size_t n = 2 + rng.bounded(3);
    std::string out;
    for (std::size_t i = 0; i < n && i < pool.size(); ++i) {
        if (i) out += ' ';
        out += pool[i];
    }
    return out;
}

std::string generate_reward(Rng& rng) {
    const double score = rng.unit() * 5.0 - 2.5;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", score);
    return buf;
}

}  // namespace

SyntheticTransport::SyntheticTransport(std::uint64_t seed, int max_sleep_ms)
    : seed_(seed), max_sleep_ms_(max_sleep_ms) {}

TransportReply SyntheticTransport::generate(const AgentSpec& spec, const ChatRequest& request,
                                            std::uint64_t digest) {
    Rng rng(digest ^ seed_);
    if (max_sleep_ms_ > 0) {
        // Separate stream: injected latency must not perturb the content.
        Rng sleep_rng(digest ^ seed_ ^ 0x51ee9123abcdef01ull);
        std::this_thread::sleep_for(std::chrono::milliseconds(
            sleep_rng.bounded(static_cast<std::uint64_t>(max_sleep_ms_) + 1)));
    }
    TransportReply reply;
    switch (request.template_id) {
        case TemplateId::task_description: reply.content = generate_task_description(rng); break;
        case TemplateId::criteria:
            reply.content = generate_criteria(rng, user_provided_primaries(request));
            break;
        case TemplateId::reference: reply.content = generate_reference(rng); break;
        case TemplateId::critique: reply.content = generate_critique(rng, request, spec); break;
        case TemplateId::meta_critique: reply.content = generate_meta(rng, request); break;
        case TemplateId::summarize: reply.content = generate_summary(rng, request); break;
        case TemplateId::revise: reply.content = generate_revision(rng); break;
        case TemplateId::reward_score: reply.content = generate_reward(rng); break;
    }
    reply.usage.prompt_tokens = 0;
    reply.usage.completion_tokens = 0;
    return reply;
}

FlakyTransport::FlakyTransport(std::shared_ptr<Transport> inner, int failures_per_digest)
    : inner_(std::move(inner)), failures_per_digest_(failures_per_digest) {}

TransportReply FlakyTransport::send(const AgentSpec& spec, const ChatRequest& request) {
    const std::uint64_t digest = request_digest(spec, request);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        int& n = failed_[digest];
        if (n < failures_per_digest_) {
            ++n;
            TransportReply reply;
            reply.status = ChatStatus::transport_error;
            reply.error = "simulated transient failure " + std::to_string(n);
            reply.retryable = true;
            return reply;
        }
    }
    return inner_->send(spec, request);
}

std::shared_ptr<MockTransport> make_mock_transport(const std::string& endpoint,
                                                   std::uint64_t seed) {
    if (!is_mock_endpoint(endpoint)) throw ConfigError("not a mock endpoint: " + endpoint);
    const std::string rest = endpoint.substr(5);
    if (rest == "synthetic" || rest.empty()) return std::make_shared<SyntheticTransport>(seed);
    if (starts_with(rest, "fixtures=")) return std::make_shared<FixtureTransport>(rest.substr(9));
    throw ConfigError("unknown mock endpoint form: " + endpoint);
}

}  // namespace mc
