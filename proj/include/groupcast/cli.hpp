#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace groupcast {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitEndpoint = 3 };

/// Every setting a run depends on. Serialized into config.json so a run can be
/// repeated with `--replay`.
struct CliSettings {
    std::string command;
    std::string data;
    std::string out;

    // gen-synth
    int groups = 1;
    int participants = 4;
    double duration_s = 288.0;
    double rho = 0.63;
    std::vector<double> rates{0.9976, 0.12, 0.12};
    int phase_period = 5;
    std::string addressing = "group";
    int gaze_hz = 4;
    double events_per_minute = 3.0;

    // ingest
    double window_s = 32.0;
    double stride_s = 16.0;
    double proximity_threshold_m = 0.4572;
    double position_max_gap_s = 1.0;
    double attention_ray_distance_m = 0.5;
    double attention_dwell_s = 0.5;
    double speech_min_overlap_s = 0.5;

    // predictors
    std::vector<std::string> predictors{"persistence"};
    int smoothing_n = 3;
    double smoothing_threshold = 0.5;
    std::string paradigm = "zeroshot";
    std::string selection = "similar";
    int shots = 1;
    bool compare_selection = false;

    // context
    int profile_k = 3;
    int phase_k = 4;
    int history_windows = 5;
    int event_windows = 10;
    double trend_threshold = 0.01;
    int token_budget = 8192;

    // evaluation
    std::string mode = "single";
    int horizon = 5;
    double valid_window_accuracy = 0.80;
    double train_fraction = 0.75;
    int jobs = 1;
    std::uint64_t seed = 42;

    // completion backend
    std::string endpoint = "http://localhost:8080";
    std::string model = "gemma-2b";
    double timeout_s = 120.0;
    int max_in_flight = 4;
    int max_attempts = 3;
    int max_new_tokens = 4096;
    double temperature = 0.0;
    std::string mock;
    double mock_noise = 0.0;
    double mock_error = 0.0;
    double mock_latency_ms = 0.0;
};

nlohmann::json to_json(const CliSettings& s);
CliSettings cli_settings_from_json(const nlohmann::json& j);

/// Runs one subcommand. Returns an ExitCode; messages go to `out` / `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace groupcast
