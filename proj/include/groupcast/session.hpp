#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "groupcast/domain.hpp"

namespace groupcast {

using Vec3 = std::array<double, 3>;

struct GazeSample {
    double t = 0.0;
    int participant = 0;
    Vec3 origin{};
    Vec3 direction{};
    /// Object or participant label resolved by the capture system.
    std::optional<std::string> target;
};

struct SpeechSegment {
    int speaker = 0;
    double start_s = 0.0;
    double end_s = 0.0;
};

struct PositionSample {
    double t = 0.0;
    int participant = 0;
    Vec3 position{};
};

enum class TaskEventKind { ImageSelected, CategoryAssigned, Other };

std::string_view event_kind_name(TaskEventKind k);
TaskEventKind event_kind_from_name(std::string_view name);

struct TaskEvent {
    double t = 0.0;
    int participant = 0;
    TaskEventKind kind = TaskEventKind::Other;
    std::string payload;
};

/// The four raw channels of one group session, validated and sorted by time.
struct SessionStreams {
    std::string group_id;
    std::vector<std::string> participants;  // labels, index = participant id
    std::vector<GazeSample> gaze;
    std::vector<SpeechSegment> speech;
    std::vector<PositionSample> positions;
    std::vector<TaskEvent> events;
    double duration_s = 0.0;

    int n() const { return static_cast<int>(participants.size()); }
};

/// Session-level evidence behind the individual profiles.
struct ParticipantFeatures {
    double speech_segments = 0.0;   // diarized turns in the session
    double gaze_switch_rate = 0.0;  // gaze-target changes per minute
    double mean_speed = 0.0;        // m/s
};

struct WindowRecord {
    SociogramTriple truth;
    BinarySeries truth_series;
    std::vector<TaskEvent> events;

    const Window& window() const { return truth.window; }
};

/// Ordered per-window ground truth for one group session.
struct SessionTimeline {
    std::string group_id;
    std::vector<std::string> participants;
    double duration_s = 0.0;
    std::vector<WindowRecord> windows;
    std::vector<ParticipantFeatures> features;

    int n() const { return static_cast<int>(participants.size()); }
    int window_count() const { return static_cast<int>(windows.size()); }
    /// Copy keeping windows [0, last_window] only.
    SessionTimeline truncated(int last_window) const;
};

}  // namespace groupcast
