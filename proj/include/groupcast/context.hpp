#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groupcast/kmeans.hpp"
#include "groupcast/netmetrics.hpp"
#include "groupcast/session.hpp"

namespace groupcast {

// ---- individual profiles

enum class ProfileDimension { Speaking = 0, Gaze = 1, Locomotion = 2 };
inline constexpr std::array<ProfileDimension, 3> kProfileDimensions = {
    ProfileDimension::Speaking, ProfileDimension::Gaze, ProfileDimension::Locomotion};

std::string_view profile_dimension_name(ProfileDimension d);
double profile_feature(const ParticipantFeatures& f, ProfileDimension d);

/// Fixed lookup: cluster `c` of `k` (0 = lowest centroid) for one dimension.
/// k == 1 yields "typical".
std::string profile_descriptor(ProfileDimension d, int cluster, int k);

struct IndividualProfile {
    ParticipantId participant;
    std::array<int, 3> cluster{};  // by ProfileDimension
    std::array<std::string, 3> descriptor;
    ParticipantFeatures evidence;
};

/// Per-dimension 1-D k-means over z-scored features pooled across a corpus.
/// Centroids are sorted ascending so cluster 0 is the lowest.
struct ProfileModel {
    std::array<ZScore, 3> zscore;
    std::array<std::vector<double>, 3> centroids;  // z-space, ascending
    std::vector<std::string> warnings;

    int k(ProfileDimension d) const { return static_cast<int>(centroids[static_cast<std::size_t>(d)].size()); }
    int assign(ProfileDimension d, double raw_value) const;
};

ProfileModel fit_profile_model(const std::vector<ParticipantFeatures>& pooled, int k = 3, std::uint64_t seed = 0);
ProfileModel fit_profile_model(const std::vector<const SessionTimeline*>& corpus, int k = 3, std::uint64_t seed = 0);

std::vector<IndividualProfile> profile_participants(const SessionTimeline& session, const ProfileModel& model);
/// Fits on this session alone.
std::vector<IndividualProfile> profile_participants(const SessionTimeline& session, int k = 3,
                                                    std::uint64_t seed = 0);

// ---- temporal phases

inline constexpr std::size_t kPhaseEmbeddingDim = 9;

/// [density, reciprocity, clustering] for conversation, proximity, shared attention.
Point phase_embedding(const SociogramTriple& g);
Point phase_embedding(const std::array<NetworkMetrics, 3>& metrics);

/// "active discussion", "animated collaboration", "exploration", "consensus".
std::string phase_label(int rank);

struct PhaseModel {
    ZScore zscore;
    /// z-space centroids ordered by descending conversation density; index = phase id.
    std::vector<Point> centroids;
    std::vector<std::string> warnings;

    int k() const { return static_cast<int>(centroids.size()); }
    /// Nearest centroid (lowest id on ties).
    int assign(const Point& raw_embedding) const;
    Point normalize(const Point& raw_embedding) const { return zscore.apply(raw_embedding); }
};

PhaseModel fit_phase_model(const std::vector<Point>& raw_embeddings, int k = 4, std::uint64_t seed = 0);
PhaseModel fit_phase_model(const std::vector<const SessionTimeline*>& corpus, int k = 4, std::uint64_t seed = 0);

enum class TrendDirection { Down = -1, Flat = 0, Up = 1 };

struct Trend {
    std::string modality;  // "Conversation"
    std::string metric;    // "Density"
    double previous = 0.0;
    double current = 0.0;
    TrendDirection direction = TrendDirection::Flat;
};

inline constexpr double kDefaultTrendThreshold = 0.01;

TrendDirection trend_direction(double previous, double current, double threshold = kDefaultTrendThreshold);

struct TemporalContext {
    int phase_id = 0;
    std::string phase_label;
    int consecutive_windows = 1;
    std::vector<Trend> trends;
};

/// Context for every window of `history`, with trends from window t-1 to t.
std::vector<TemporalContext> phase_assign(const std::vector<SociogramTriple>& history, const PhaseModel& model,
                                          double trend_threshold = kDefaultTrendThreshold);
/// Fits a model on `history` itself and assigns it.
std::vector<TemporalContext> phase_assign(const std::vector<SociogramTriple>& history, int k = 4,
                                          std::uint64_t seed = 0);

// ---- bundle

struct BundleConfig {
    int history_windows = 5;
    int event_windows = 10;
    double trend_threshold = kDefaultTrendThreshold;
    double stride_s = kDefaultStrideS;
};

struct ContextBundle {
    std::string group_id;
    std::vector<std::string> participants;
    Window window;  // context window t
    Window target;  // window t+1
    std::vector<IndividualProfile> individual;
    std::array<NetworkMetrics, 3> group{};
    TemporalContext temporal;
    /// Oldest first; the last entry is window t.
    std::vector<SociogramTriple> pair_history;
    /// First window index covered by `events`.
    int event_first_window = 0;
    /// Deduplicated events from the covered windows, in time order.
    std::vector<TaskEvent> events;
    /// z-scored phase embedding of window t.
    Point embedding;

    int n() const { return static_cast<int>(participants.size()); }
    int seconds() const;
};

/// `history` holds windows 0..t (ground truth or fed-back predictions) and
/// `events` the task events of the same windows.
ContextBundle build_context_bundle(const std::string& group_id, const std::vector<std::string>& participants,
                                   const std::vector<SociogramTriple>& history,
                                   const std::vector<std::vector<TaskEvent>>& events,
                                   const std::vector<IndividualProfile>& profiles, const PhaseModel& phases,
                                   const BundleConfig& cfg = {});

ContextBundle build_context_bundle(const SessionTimeline& session, int t,
                                   const std::vector<IndividualProfile>& profiles, const PhaseModel& phases,
                                   const BundleConfig& cfg = {});

// ---- prompt

struct Demonstration {
    std::string group_id;
    int window_index = 0;  // context window of the example
    Point embedding;       // z-scored phase embedding of that window
    std::string context_text;
    std::string answer_text;
};

/// Compact context block (phase, group metrics, last-window weights) for a demonstration.
std::string render_demonstration_context(const ContextBundle& bundle);
Demonstration make_demonstration(const ContextBundle& bundle, const BinarySeries& answer);

struct SectionFlags {
    bool instructions = true;
    bool temporal = true;
    bool individual = true;
    bool group = true;
    bool pair_history = true;
    bool events = true;
    bool format = true;
    int history_windows = 0;
    int history_windows_dropped = 0;
    int examples_dropped = 0;
};

struct Prompt {
    std::string text;
    int token_estimate = 0;
    SectionFlags sections;
    int few_shot_examples = 0;
};

inline constexpr int kDefaultTokenBudget = 8192;

/// ceil(code points / 4).
int estimate_tokens(std::string_view text);

/// Throws PromptOverflow if the prompt exceeds the budget after dropping the
/// event timeline, all but the newest history window, and every example.
Prompt render_prompt(const ContextBundle& bundle, const std::vector<Demonstration>& examples = {},
                     int budget_tokens = kDefaultTokenBudget);

/// Numeric content read back from a rendered prompt (demonstration blocks excluded).
struct PromptDigest {
    std::string group_id;
    int n = 0;
    int context_window = -1;
    int predict_window = -1;
    int seconds = 0;
    std::optional<int> phase_id;
    std::optional<int> consecutive_windows;
    std::vector<Trend> trends;
    /// [modality] -> {density, reciprocity, clustering}
    std::array<std::optional<std::array<double, 3>>, 3> group;
    std::array<std::vector<double>, 3> centrality;
    /// (window index, weights[m][i*n+j]) oldest first.
    std::vector<std::pair<int, std::array<std::vector<double>, 3>>> history;
};

PromptDigest read_prompt(std::string_view text);

}  // namespace groupcast
