#include "mc/gateway.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mc/common.hpp"

namespace mc {

const char* to_string(AgentRole role) {
    switch (role) {
        case AgentRole::critic: return "critic";
        case AgentRole::meta_judge: return "meta_judge";
        case AgentRole::summarizer: return "summarizer";
        case AgentRole::reviser: return "reviser";
        case AgentRole::info_elicitor: return "info_elicitor";
    }
    return "critic";
}

AgentRole agent_role_from_string(const std::string& s) {
    if (s == "critic") return AgentRole::critic;
    if (s == "meta_judge") return AgentRole::meta_judge;
    if (s == "summarizer") return AgentRole::summarizer;
    if (s == "reviser") return AgentRole::reviser;
    if (s == "info_elicitor") return AgentRole::info_elicitor;
    throw ConfigError("unknown agent role: " + s);
}

AgentSpec AgentSpec::with_role_defaults(std::string agent_id, std::string endpoint,
                                        std::string model_name, AgentRole role) {
    AgentSpec spec;
    spec.agent_id = std::move(agent_id);
    spec.endpoint = std::move(endpoint);
    spec.model_name = std::move(model_name);
    spec.role = role;
    if (role == AgentRole::reviser) {
        spec.temperature = 1.0;
        spec.top_p = 0.95;
        spec.top_k = 50;
    } else {
        spec.temperature = 0.0;
        spec.top_p = 1.0;
    }
    return spec;
}

std::uint64_t request_digest(const AgentSpec& spec, const ChatRequest& request) {
    std::uint64_t h = fnv1a64(spec.model_name);
    for (const auto& msg : request.messages) {
        h = fnv1a64(msg.role, h);
        h = fnv1a64("\x1e", h);
        h = fnv1a64(msg.content, h);
        h = fnv1a64("\x1f", h);
    }
    return h;
}

bool is_mock_endpoint(const std::string& endpoint) { return starts_with(endpoint, "mock:"); }

namespace {

struct ParsedUrl {
    std::string host_port;  // scheme://host:port for httplib
    std::string path;
};

ParsedUrl parse_url(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint is not a URL: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

class HttpTransport : public Transport {
public:
    TransportReply send(const AgentSpec& spec, const ChatRequest& request) override {
        namespace nj = nlohmann;
        nj::json body;
        body["model"] = spec.model_name;
        nj::json msgs = nj::json::array();
        for (const auto& m : request.messages)
            msgs.push_back({{"role", m.role}, {"content", m.content}});
        body["messages"] = std::move(msgs);
        body["temperature"] = spec.temperature;
        body["top_p"] = spec.top_p;
        if (spec.top_k) body["top_k"] = *spec.top_k;
        body["max_tokens"] = spec.max_tokens;

        ParsedUrl url = parse_url(spec.endpoint);
        httplib::Client client(url.host_port);
        client.set_connection_timeout(30, 0);
        client.set_read_timeout(600, 0);
        httplib::Headers headers;
        if (!spec.api_key_env.empty()) {
            const char* key = std::getenv(spec.api_key_env.c_str());
            if (key != nullptr && *key != '\0')
                headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        TransportReply reply;
        if (!res) {
            reply.status = ChatStatus::transport_error;
            reply.error = "connection failed: " + httplib::to_string(res.error());
            reply.retryable = true;
            return reply;
        }
        if (res->status < 200 || res->status >= 300) {
            reply.status = ChatStatus::protocol_error;
            reply.error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            reply.retryable = res->status == 408 || res->status == 429 || res->status >= 500;
            return reply;
        }
        try {
            nj::json parsed = nj::json::parse(res->body);
            if (parsed.contains("choices") && !parsed["choices"].empty()) {
                const auto& choice = parsed["choices"][0];
                reply.content = choice.at("message").at("content").get<std::string>();
                reply.finish_reason = choice.value("finish_reason", "stop");
            } else if (parsed.contains("content")) {
                reply.content = parsed["content"].get<std::string>();
            } else {
                reply.status = ChatStatus::protocol_error;
                reply.error = "response body has neither choices nor content";
                return reply;
            }
            if (parsed.contains("usage")) {
                reply.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
                reply.usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
            }
        } catch (const nj::json::exception& e) {
            reply.status = ChatStatus::protocol_error;
            reply.error = std::string("malformed response body: ") + e.what();
            return reply;
        }
        if (reply.content.empty()) {
            reply.status = ChatStatus::protocol_error;
            reply.error = "empty response content";
            reply.retryable = true;
        }
        return reply;
    }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttpTransport>(); }

Gateway::Gateway(RetryPolicy retry, std::uint64_t jitter_seed)
    : retry_(std::move(retry)),
      http_(make_http_transport()),
      jitter_state_(jitter_seed ^ 0x2545f4914f6cdd1dull) {}

void Gateway::register_mock(const std::string& endpoint, std::shared_ptr<Transport> transport) {
    std::lock_guard<std::mutex> lock(mutex_);
    mocks_[endpoint] = std::move(transport);
}

void Gateway::set_http_transport(std::shared_ptr<Transport> transport) {
    http_ = std::move(transport);
}

Transport& Gateway::transport_for(const AgentSpec& spec) {
    if (is_mock_endpoint(spec.endpoint)) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = mocks_.find(spec.endpoint);
        if (it == mocks_.end())
            throw ConfigError("mock endpoint used but no mock transport registered: " +
                              spec.endpoint);
        return *it->second;
    }
    return *http_;
}

std::string Gateway::next_request_id() {
    std::lock_guard<std::mutex> lock(mutex_);
    return "req-" + std::to_string(++request_counter_);
}

ChatResult Gateway::complete(const AgentSpec& spec, ChatRequest request) {
    if (request.request_id.empty()) request.request_id = next_request_id();
    Transport& transport = transport_for(spec);

    ChatResult result;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        auto start = std::chrono::steady_clock::now();
        TransportReply reply;
        try {
            reply = transport.send(spec, request);
        } catch (const std::exception& e) {
            reply.status = ChatStatus::transport_error;
            reply.error = e.what();
            reply.retryable = true;
        }
        auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        result.status = reply.status;
        result.error = reply.error;
        result.response.content = reply.content;
        result.response.finish_reason = reply.finish_reason;
        result.response.usage = reply.usage;
        result.response.latency_ms = elapsed;
        result.response.attempts = attempt;
        if (reply.status == ChatStatus::ok || !reply.retryable ||
            attempt == retry_.max_attempts) {
            break;
        }
        std::chrono::milliseconds delay =
            retry_.backoff.empty()
                ? std::chrono::milliseconds(0)
                : retry_.backoff[std::min<std::size_t>(attempt - 1, retry_.backoff.size() - 1)];
        if (delay.count() > 0) {
            double jitter;
            {
                std::lock_guard<std::mutex> lock(mutex_);
                jitter_state_ = jitter_state_ * 6364136223846793005ull + 1442695040888963407ull;
                jitter = static_cast<double>(jitter_state_ >> 11) * 0x1.0p-53;
            }
            double factor = 1.0 + retry_.jitter * (2.0 * jitter - 1.0);
            auto jittered = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(delay.count()) * factor));
            std::this_thread::sleep_for(jittered);
        }
    }
    return result;
}

std::vector<ChatResult> Gateway::complete_many(std::vector<Job> jobs, int limit) {
    if (limit < 1) throw ConfigError("complete_many: limit must be >= 1");
    std::vector<ChatResult> results(jobs.size());
    if (jobs.empty()) return results;

    // Assign request ids up front so numbering follows input order.
    for (auto& job : jobs)
        if (job.request.request_id.empty()) job.request.request_id = next_request_id();

    // Peak in-flight is bounded by the worker count; slot-indexed writes
    // keep output order independent of completion order.
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(limit), jobs.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
                results[i] = complete(jobs[i].spec, jobs[i].request);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace mc
