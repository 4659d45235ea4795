#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "groupcast/context.hpp"
#include "groupcast/netmetrics.hpp"
#include "groupcast/predict.hpp"

namespace groupcast {

enum class EvalMode { SingleStep, Simulation };
std::string_view eval_mode_name(EvalMode m);

struct RunConfig {
    EvalMode mode = EvalMode::SingleStep;
    int horizon = 5;
    PredictorSpec predictor;
    BundleConfig bundle;
    int profile_k = 3;
    int phase_k = 4;
    std::uint64_t seed = 42;
    double valid_window_accuracy = 0.80;
    double train_fraction = 0.75;
    int jobs = 1;
    /// Per-window LLM artifacts go below <artifacts_dir>/windows when set.
    std::optional<std::filesystem::path> artifacts_dir;
};

/// Frozen corpus-level context models.
struct ContextModels {
    ProfileModel profiles;
    PhaseModel phases;
};

ContextModels fit_context_models(const std::vector<const SessionTimeline*>& corpus, int profile_k, int phase_k,
                                 std::uint64_t seed);

struct GroupSplit {
    std::vector<std::string> train;
    std::vector<std::string> eval;
    std::vector<std::string> warnings;
};

/// Sorted ids; the first round(train_fraction * n) groups train, the rest are
/// held out (16 groups -> 1-12 / 13-16). A single group is evaluated with an
/// empty training side.
GroupSplit leave_group_out(std::vector<std::string> group_ids, double train_fraction = 0.75);

struct WindowResult {
    std::string group_id;
    std::string predictor;
    EvalMode mode = EvalMode::SingleStep;
    int depth = 1;
    int anchor = -1;  // context window of the rollout start; t for single-step
    int window = 0;   // predicted window
    bool skipped = false;
    std::string skip_reason;
    std::array<Similarity, 3> jaccard{};
    double jaccard_avg = 0.0;
    std::array<ConfusionCounts, 3> counts{};
    std::array<NetworkMetrics, 3> predicted_metrics{};
    std::array<NetworkMetrics, 3> truth_metrics{};
    BinarySeries prediction;
    std::optional<ParseDiagnostics> parse;
    double ttft_ms = 0.0;
    double total_ms = 0.0;
    long long candidates_scanned = 0;
    std::vector<std::string> warnings;
};

struct Aggregate {
    int windows = 0;
    int skipped = 0;
    std::array<double, 3> jaccard{};
    double jaccard_avg = 0.0;
    ConfusionSummary confusion;
    double valid_window_rate = 0.0;
    /// [modality][structural metric]
    std::array<std::array<Correlation, 3>, 3> property{};
    bool property_available = false;
};

/// Means over non-skipped windows; confusion pooled.
Aggregate aggregate(const std::vector<const WindowResult*>& rows, double valid_threshold = 0.80);

struct EvaluationReport {
    std::string predictor;
    EvalMode mode = EvalMode::SingleStep;
    int horizon = 1;
    std::vector<WindowResult> windows;
    Aggregate overall;
    std::vector<Aggregate> per_depth;  // simulation: index d-1
    /// Single-step average similarity on the same windows (simulation only).
    std::optional<double> single_step_avg;
    int single_step_windows = 0;
    /// (simulation - single) / single * 100; negative when rollouts do worse.
    std::optional<double> degradation_pct;
    std::vector<std::string> warnings;
};

/// Scores one predicted window against ground truth.
WindowResult score_window(const BinarySeries& prediction, const WindowRecord& truth);

/// Throws ContractError if a request carries anything beyond window t.
void audit_no_lookahead(const PredictionRequest& req, int t);

EvaluationReport run_single_step(const SessionTimeline& session, const Predictor& predictor,
                                 const ContextModels& models, const RunConfig& cfg);

/// Rollouts from every anchor t0 with horizon successors: predictions for
/// t0+1..t0+horizon are fed back as context (events stop at the anchor).
EvaluationReport run_simulation(const SessionTimeline& session, const Predictor& predictor, int horizon,
                                const ContextModels& models, const RunConfig& cfg);

/// Demonstrations (context at t, truth at t+1) from every window pair of the sessions.
std::vector<Demonstration> build_demonstration_pool(const std::vector<const SessionTimeline*>& sessions,
                                                    const ContextModels& models, const BundleConfig& cfg = {});

/// Concatenates per-session reports of one predictor and mode and re-aggregates.
EvaluationReport merge_reports(const std::vector<EvaluationReport>& parts, double valid_threshold = 0.80);

struct StrategyRow {
    SelectionStrategy strategy = SelectionStrategy::Random;
    double similarity = 0.0;
    double mean_candidates_scanned = 0.0;
    double reference = 0.0;
    std::string complexity;
};

/// Single-step few-shot runs under each selection strategy on the held-out sessions.
std::vector<StrategyRow> compare_selection_strategies(const std::vector<const SessionTimeline*>& eval,
                                                      std::shared_ptr<const std::vector<Demonstration>> pool,
                                                      std::shared_ptr<CompletionClient> client,
                                                      const ContextModels& models, const RunConfig& cfg);
std::string render_strategy_table(const std::vector<StrategyRow>& rows);

// ---- reports

std::string report_csv_header();
std::string report_csv_row(const WindowResult& r);

nlohmann::json aggregate_json(const Aggregate& a);
nlohmann::json report_json(const EvaluationReport& r);

/// Writes report.csv (all rows of all reports) and summary.json under `dir`.
/// Throws IoError when the directory cannot be written.
void write_report(const std::vector<EvaluationReport>& reports, const nlohmann::json& config,
                  const nlohmann::json& extra, const std::filesystem::path& dir);

/// Per-window LLM artifacts: prompt.txt, response.txt, diagnostics.json.
void write_window_artifacts(const std::filesystem::path& dir, const LlmOutcome& outcome);

// ---- parallelism

/// Calls f(i) for i in [0, count) on up to `jobs` threads; results come back
/// in index order. The first exception (lowest index) is rethrown.
template <typename F>
auto ordered_parallel_map(std::size_t count, int jobs, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    auto work = [&](std::atomic<std::size_t>& next) {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::atomic<std::size_t> next{0};
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || count < 2) {
        work(next);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back([&] { work(next); });
        for (auto& th : pool) th.join();
    }
    std::vector<R> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

}  // namespace groupcast
