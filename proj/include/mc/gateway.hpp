#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mc/prompts.hpp"

namespace mc {

enum class AgentRole { critic, meta_judge, summarizer, reviser, info_elicitor };

const char* to_string(AgentRole role);
AgentRole agent_role_from_string(const std::string& s);

struct AgentSpec {
    std::string agent_id;
    std::string endpoint;  // http(s)://... or mock:...
    std::string model_name;
    double temperature = 0.0;
    double top_p = 1.0;
    std::optional<int> top_k;
    int max_tokens = 4096;
    AgentRole role = AgentRole::critic;
    std::string api_key_env;  // env var holding the bearer token, may be empty

    // Revisers sample (top_p 0.95, top_k 50, temperature 1.0); every other
    // role defaults to deterministic decoding.
    static AgentSpec with_role_defaults(std::string agent_id, std::string endpoint,
                                        std::string model_name, AgentRole role);
};

struct ChatRequest {
    TemplateId template_id = TemplateId::task_description;
    std::vector<Message> messages;
    std::string request_id;  // unique per pipeline run, set by the gateway
};

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct ChatResponse {
    std::string content;
    std::string finish_reason;
    Usage usage;
    double latency_ms = 0.0;
    int attempts = 1;
};

enum class ChatStatus { ok, transport_error, protocol_error, fixture_missing };

struct ChatResult {
    ChatStatus status = ChatStatus::ok;
    ChatResponse response;
    std::string error;  // empty when ok

    bool ok() const { return status == ChatStatus::ok; }
};

// Digest key for a request: model name plus every message, independent of
// request_id so retries and reruns hit the same fixture.
std::uint64_t request_digest(const AgentSpec& spec, const ChatRequest& request);

// Raised by transports to signal an error class to the retry loop.
struct TransportReply {
    ChatStatus status = ChatStatus::ok;
    std::string content;
    std::string finish_reason = "stop";
    Usage usage;
    std::string error;
    bool retryable = false;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportReply send(const AgentSpec& spec, const ChatRequest& request) = 0;
};

// HTTP JSON chat-completion transport:
// POST {model, messages, temperature, top_p, top_k?, max_tokens} with a
// bearer-token header; retries are handled by the gateway, not here.
std::unique_ptr<Transport> make_http_transport();

struct RetryPolicy {
    int max_attempts = 3;
    std::vector<std::chrono::milliseconds> backoff = {std::chrono::milliseconds(1000),
                                                      std::chrono::milliseconds(4000)};
    double jitter = 0.2;  // +-20%
};

// Uniform access to every agent. Thread-safe; a shared limiter bounds
// in-flight requests across concurrent callers.
class Gateway {
public:
    explicit Gateway(RetryPolicy retry = {}, std::uint64_t jitter_seed = 0);

    // Routes by endpoint scheme: "mock:" endpoints dispatch to the transport
    // registered for that exact endpoint string, anything else goes over HTTP.
    void register_mock(const std::string& endpoint, std::shared_ptr<Transport> transport);
    void set_http_transport(std::shared_ptr<Transport> transport);

    ChatResult complete(const AgentSpec& spec, ChatRequest request);

    struct Job {
        AgentSpec spec;
        ChatRequest request;
    };

    // At most `limit` requests in flight at once; results come back in input
    // order; per-slot failures never abort sibling jobs.
    std::vector<ChatResult> complete_many(std::vector<Job> jobs, int limit);

    std::string next_request_id();

private:
    Transport& transport_for(const AgentSpec& spec);

    RetryPolicy retry_;
    std::shared_ptr<Transport> http_;
    std::map<std::string, std::shared_ptr<Transport>> mocks_;
    std::mutex mutex_;
    std::uint64_t jitter_state_;
    std::uint64_t request_counter_ = 0;
};

bool is_mock_endpoint(const std::string& endpoint);

}  // namespace mc
