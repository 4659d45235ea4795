#pragma once

#include <filesystem>
#include <vector>

#include "groupcast/domain.hpp"
#include "groupcast/session.hpp"

namespace groupcast {

/// Sensor-to-sociogram conversion parameters.
struct IngestConfig {
    double window_s = kDefaultWindowS;
    double stride_s = kDefaultStrideS;
    /// 1.5 ft.
    double proximity_threshold_m = 0.4572;
    /// Interpolation/hold limit for position samples.
    double position_max_gap_s = 1.0;
    /// Geometric joint-attention fallback, used only when no target labels exist.
    double attention_ray_distance_m = 0.5;
    double attention_dwell_s = 0.5;
    /// A speaker talks during second k iff their segments cover >= this much of it.
    double speech_min_overlap_s = 0.5;
};

/// Reads gaze.jsonl, speech.jsonl, position.jsonl and (optionally) events.jsonl
/// plus an optional session.json roster from `dir`.
///
/// Throws ParseError (malformed line or invariant violation, with file and
/// line), OrderingError (timestamp regression within a participant) and
/// SchemaError (participant outside the roster).
SessionStreams parse_session(const std::filesystem::path& dir);

/// Writes the same layout parse_session reads. Output is byte-deterministic.
void write_session(const SessionStreams& streams, const std::filesystem::path& dir);

Sociogram build_conversation_sociogram(const Window& w, int n, const std::vector<SpeechSegment>& speech,
                                       const std::vector<GazeSample>& gaze, const IngestConfig& cfg = {});
Sociogram build_proximity_sociogram(const Window& w, int n, const std::vector<PositionSample>& positions,
                                    double threshold_m = IngestConfig{}.proximity_threshold_m,
                                    const IngestConfig& cfg = {});
Sociogram build_attention_sociogram(const Window& w, int n, const std::vector<GazeSample>& gaze,
                                    const IngestConfig& cfg = {});

/// Full per-window ground truth (weighted triples, per-second bits, events)
/// and session-level participant features.
SessionTimeline build_timeline(const SessionStreams& streams, const IngestConfig& cfg = {});

/// Closest approach of two rays restricted to non-negative ray parameters.
/// Returns nullopt for (near-)parallel rays or when the unconstrained closest
/// points lie behind either origin.
std::optional<double> ray_closest_distance(const Vec3& o1, const Vec3& d1, const Vec3& o2, const Vec3& d2);

}  // namespace groupcast
