#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "groupcast/domain.hpp"
#include "groupcast/rng.hpp"

namespace groupcast {

struct CompletionRequest {
    std::string prompt;
    int max_new_tokens = 4096;
    double temperature = 0.0;
    std::vector<std::string> stop_sequences;
};

/// Throws ContractError for an empty prompt, max_new_tokens < 1 or a negative temperature.
void validate(const CompletionRequest& req);

struct TokenCounts {
    int prompt = 0;
    int completion = 0;
};

struct CompletionResult {
    std::string text;
    double ttft_ms = 0.0;  // transport level: first response byte
    double total_ms = 0.0;
    std::optional<TokenCounts> tokens;
};

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    /// Safe to call from several threads.
    virtual CompletionResult complete(const CompletionRequest& req) = 0;
    virtual std::string describe() const = 0;
};

/// Cuts `text` at the earliest occurrence of any stop sequence.
std::string truncate_at_stop(std::string text, const std::vector<std::string>& stops);

struct EndpointConfig {
    std::string base_url = "http://localhost:8080";
    std::string model = "gemma-2b";
    /// Environment variable holding the bearer token; unset or empty means no header.
    std::string api_key_env = "GROUPCAST_API_KEY";
    double timeout_s = 120.0;
    int max_in_flight = 4;
    int max_attempts = 3;
    double backoff_base_ms = 250.0;
    std::uint64_t seed = 0;  // retry jitter
};

/// OpenAI-compatible text completion over HTTP:
///
///     POST {base}/v1/completions
///     {"model", "prompt", "max_tokens", "temperature", "stop"}
///     -> {"choices": [{"text"}], "usage": {"prompt_tokens", "completion_tokens"}}
///
/// Connection failures, 429 and 5xx are retried with jittered exponential
/// backoff; after max_attempts they raise TransportError. Other non-2xx
/// statuses raise EndpointError at once.
class HttpCompletionClient : public CompletionClient {
public:
    explicit HttpCompletionClient(EndpointConfig cfg);
    CompletionResult complete(const CompletionRequest& req) override;
    std::string describe() const override;

    const EndpointConfig& config() const { return cfg_; }
    std::string completions_path() const { return path_; }

private:
    CompletionResult attempt(const CompletionRequest& req, const std::string& body, bool& transient);
    double backoff_ms(int attempt);

    EndpointConfig cfg_;
    std::string host_;  // scheme://host:port
    std::string path_;
    std::mutex mu_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    Rng jitter_;
};

// ---- mock backend

/// Ground truth per (group, window) for the echo mock.
class TruthRegistry {
public:
    void add(const std::string& group_id, int window, BinarySeries truth);
    std::optional<BinarySeries> find(const std::string& group_id, int window) const;

private:
    mutable std::mutex mu_;
    std::map<std::pair<std::string, int>, BinarySeries> truth_;
};

/// Map from prompt fingerprint to recorded reply.
class ReplayStore {
public:
    static std::string fingerprint(std::string_view prompt);
    void add(std::string_view prompt, std::string reply);
    std::optional<std::string> find(std::string_view prompt) const;
    std::size_t size() const { return replies_.size(); }
    /// Loads every prompt.txt with a sibling response.txt below `dir`.
    static ReplayStore load_run_dir(const std::filesystem::path& dir);

private:
    std::map<std::string, std::string> replies_;
};

/// Flips each `=Y` / `=N` value in `text` with probability p. Returns the
/// number of values seen and flipped through the optional counters.
std::string flip_yes_no(const std::string& text, double p, Rng& rng, int* seen = nullptr, int* flipped = nullptr);

struct MockOptions {
    double flip_probability = 0.0;
    double error_probability = 0.0;
    double latency_ms = 0.0;
    std::uint64_t seed = 0;
};

class MockCompletionClient : public CompletionClient {
public:
    using Responder = std::function<std::string(const CompletionRequest&)>;

    using Options = MockOptions;

    MockCompletionClient(Responder responder, Options opts, std::string name = "mock");

    CompletionResult complete(const CompletionRequest& req) override;
    std::string describe() const override { return name_; }
    int calls() const;

    /// Replies in order; one more call throws ContractError.
    static std::shared_ptr<MockCompletionClient> scripted(std::vector<std::string> replies, Options opts = {});
    static std::shared_ptr<MockCompletionClient> fixed(std::string text, Options opts = {});
    /// Canonical text of the truth registered for the prompt's group and predicted window.
    static std::shared_ptr<MockCompletionClient> echo_truth(std::shared_ptr<const TruthRegistry> registry,
                                                            Options opts = {});
    /// Persistence read from the prompt: each pair-modality is active for the
    /// first round(w * T) seconds, w being its weight in the newest history window.
    static std::shared_ptr<MockCompletionClient> context_echo(Options opts = {});
    /// Copies the answer block of the prompt's first demonstration; falls back
    /// to the context-echo reply for zero-shot prompts.
    static std::shared_ptr<MockCompletionClient> example_echo(Options opts = {});
    /// Recorded replies keyed by prompt; an unknown prompt throws ContractError.
    static std::shared_ptr<MockCompletionClient> replay(std::shared_ptr<const ReplayStore> store, Options opts = {});

private:
    Responder responder_;
    Options opts_;
    std::string name_;
    mutable std::mutex mu_;
    int calls_ = 0;
};

/// Reply of the context-echo mock for a prompt.
std::string context_echo_reply(std::string_view prompt);
std::string example_echo_reply(std::string_view prompt);

}  // namespace groupcast
