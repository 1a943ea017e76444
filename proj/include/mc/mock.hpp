#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mc/gateway.hpp"

namespace mc {

// Shared instrumentation for mock transports: transcripts for
// contamination/context checks, per-digest attempt counts for retry checks,
// and an in-flight high-water mark for concurrency checks.
class MockInstrumentation {
public:
    struct Entry {
        std::string template_id;
        std::string digest;
        std::string model;
        std::string request_id;
        std::vector<Message> messages;
    };

    void begin(const AgentSpec& spec, const ChatRequest& request, const std::string& digest);
    void end();

    int max_in_flight() const;
    std::uint64_t total_calls() const;
    int attempts_for(const std::string& digest) const;
    std::vector<Entry> transcript() const;
    void reset();

private:
    mutable std::mutex mutex_;
    int in_flight_ = 0;
    int max_in_flight_ = 0;
    std::uint64_t total_calls_ = 0;
    std::map<std::string, int> attempts_;
    std::vector<Entry> transcript_;
};

// Base for mock transports: records instrumentation around the subclass's
// generate() call.
class MockTransport : public Transport {
public:
    TransportReply send(const AgentSpec& spec, const ChatRequest& request) final;
    MockInstrumentation& stats() { return stats_; }

protected:
    virtual TransportReply generate(const AgentSpec& spec, const ChatRequest& request,
                                    std::uint64_t digest) = 0;

private:
    MockInstrumentation stats_;
};

// Serves stored fixture files named "<template_id>_<16-hex digest>.md".
// A miss is a fixture-missing error naming the digest, never a retry.
class FixtureTransport : public MockTransport {
public:
    explicit FixtureTransport(std::string dir);

    static std::string fixture_name(TemplateId id, std::uint64_t digest);

protected:
    TransportReply generate(const AgentSpec& spec, const ChatRequest& request,
                            std::uint64_t digest) override;

private:
    std::string dir_;
};

// Deterministic generator used for desk-scale runs: crafts structurally
// valid stage outputs from nothing but the request content and a seed, so
// identical inputs + seed give byte-identical pipeline outputs.
class SyntheticTransport : public MockTransport {
public:
    explicit SyntheticTransport(std::uint64_t seed, int max_sleep_ms = 0);

protected:
    TransportReply generate(const AgentSpec& spec, const ChatRequest& request,
                            std::uint64_t digest) override;

private:
    std::uint64_t seed_;
    int max_sleep_ms_;
};

// Test helper: delegates to a callback.
class CallbackTransport : public MockTransport {
public:
    using Fn = std::function<TransportReply(const AgentSpec&, const ChatRequest&)>;
    explicit CallbackTransport(Fn fn) : fn_(std::move(fn)) {}

protected:
    TransportReply generate(const AgentSpec& spec, const ChatRequest& request,
                            std::uint64_t) override {
        return fn_(spec, request);
    }

private:
    Fn fn_;
};

// Test helper: fails the first `failures_per_digest` sends of every distinct
// request with a transient error, then delegates.
class FlakyTransport : public Transport {
public:
    FlakyTransport(std::shared_ptr<Transport> inner, int failures_per_digest);
    TransportReply send(const AgentSpec& spec, const ChatRequest& request) override;

private:
    std::shared_ptr<Transport> inner_;
    int failures_per_digest_;
    std::mutex mutex_;
    std::map<std::uint64_t, int> failed_;
};

// Selects a mock transport from a "mock:..." endpoint:
//   mock:synthetic            (seed comes from the pipeline config)
//   mock:fixtures=<directory>
std::shared_ptr<MockTransport> make_mock_transport(const std::string& endpoint,
                                                   std::uint64_t seed);

}  // namespace mc
