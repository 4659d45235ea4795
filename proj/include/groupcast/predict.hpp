#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "groupcast/context.hpp"
#include "groupcast/llm_client.hpp"
#include "groupcast/response.hpp"

namespace groupcast {

enum class PredictorKind { Persistence, Smoothing, StratifiedRandom, Markov, Llm };
enum class Paradigm { ZeroShot, FewShot };
enum class SelectionStrategy { Random, PhaseSimilar, Diverse };

std::string_view predictor_kind_name(PredictorKind k);
std::string_view paradigm_name(Paradigm p);
std::string_view selection_name(SelectionStrategy s);
PredictorKind predictor_kind_from_name(std::string_view s);
Paradigm paradigm_from_name(std::string_view s);
SelectionStrategy selection_from_name(std::string_view s);

struct PredictorSpec {
    PredictorKind kind = PredictorKind::Persistence;
    int smoothing_n = 3;
    double smoothing_threshold = 0.5;
    std::uint64_t seed = 0;
    Paradigm paradigm = Paradigm::ZeroShot;
    int k = 1;
    SelectionStrategy selection = SelectionStrategy::PhaseSimilar;

    /// "persistence", "smoothing-3", "stratified-random", "markov",
    /// "llm-zero-shot", "llm-few-shot-similar", ...
    std::string label() const;
};

// ---- baselines

/// Every (pair, modality) active for all T seconds iff its weight at t is > 0.
BinarySeries persistence_predict(const SociogramTriple& last, Window target, int seconds);

/// Mean weight over the given windows (at most N, oldest first); active iff
/// mean > threshold. A single window reproduces persistence.
BinarySeries smoothing_predict(const std::vector<SociogramTriple>& last_n, Window target, int seconds,
                               double threshold = 0.5);

/// Whole-window Bernoulli draw per edge (undirected edges drawn once) with
/// the modality's rate. The stream is keyed by (seed, group, window).
BinarySeries stratified_random_predict(const std::array<double, 3>& rates, std::uint64_t seed,
                                       const std::string& group_id, int n, Window target, int seconds);

/// Mean per-second active fraction per modality over the given sessions'
/// ground truth (ordered pairs for conversation, unordered otherwise).
std::array<double, 3> empirical_rates(const std::vector<const SessionTimeline*>& sessions);

/// Per-edge first-order chain over window states (weight > 0) with add-one
/// smoothing; predicts the likelier next state, keeping the current state on
/// a tie. With fewer than 2 windows falls back to persistence and appends a
/// warning.
BinarySeries markov_predict(const std::vector<SociogramTriple>& history, Window target, int seconds,
                            std::vector<std::string>* warnings = nullptr);

/// Probability that the edge is active next, given its window states.
double markov_next_probability(const std::vector<bool>& states);

// ---- few-shot selection

struct SelectionStats {
    long long candidates_scanned = 0;
};

/// Cosine similarity; two zero vectors count as identical (1), one zero vector as 0.
double cosine_similarity(const Point& a, const Point& b);

/// Indices into `pool`, never of `target_group`. Random draws with a stream
/// keyed by (seed, group, query_key); PhaseSimilar ranks by cosine with ties
/// to the lowest index; Diverse takes the first k k-means++ seeds over the
/// eligible embeddings. Throws ContractError when no candidate is eligible.
std::vector<std::size_t> select_few_shot(const std::vector<Demonstration>& pool, const std::string& target_group,
                                         const Point& query, SelectionStrategy strategy, int k = 1,
                                         std::uint64_t seed = 0, std::uint64_t query_key = 0,
                                         SelectionStats* stats = nullptr);

// ---- LLM predictor

struct LlmOptions {
    int budget_tokens = kDefaultTokenBudget;
    int max_new_tokens = 4096;
    double temperature = 0.0;
    std::vector<std::string> stop_sequences{"###"};
};

struct LlmOutcome {
    BinarySeries series;
    ParseDiagnostics diagnostics;
    Prompt prompt;
    std::string response;
    double ttft_ms = 0.0;
    double total_ms = 0.0;
    std::vector<std::string> demonstrations;  // "group:window"
};

/// render_prompt -> client.complete -> parse_response. A TransportError
/// surfaces as PredictorUnavailable.
LlmOutcome llm_predict(const ContextBundle& bundle, const std::vector<Demonstration>& examples,
                       CompletionClient& client, const LlmOptions& opts = {});

// ---- uniform interface

struct PredictionRequest {
    std::string group_id;
    /// Windows 0..t, ground truth or fed-back predictions.
    const std::vector<SociogramTriple>* history = nullptr;
    Window target;
    int seconds = 0;
    /// Set by the caller when needs_bundle().
    const ContextBundle* bundle = nullptr;
};

struct Prediction {
    BinarySeries series;
    std::vector<std::string> warnings;
    std::optional<LlmOutcome> llm;
    SelectionStats selection;
};

class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string name() const = 0;
    virtual bool needs_bundle() const { return false; }
    virtual Prediction predict(const PredictionRequest& req) const = 0;
};

struct PredictorDeps {
    std::array<double, 3> rates{0.5, 0.5, 0.5};  // stratified random
    std::shared_ptr<CompletionClient> client;    // llm
    std::shared_ptr<const std::vector<Demonstration>> pool;  // llm few-shot
    LlmOptions llm;
};

std::unique_ptr<Predictor> make_predictor(const PredictorSpec& spec, const PredictorDeps& deps = {});

}  // namespace groupcast
