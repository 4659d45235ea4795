#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "groupcast/rng.hpp"
#include "groupcast/session.hpp"

namespace groupcast {

/// Transition probabilities of a two-state chain with stationary rate pi and
/// lag-1 autocorrelation rho: p01 = pi(1 - rho), p10 = (1 - pi)(1 - rho).
struct ChainParams {
    double p01 = 0.0;
    double p10 = 0.0;
};

/// Throws ContractError (stating the feasible rho range) when either
/// transition probability falls outside [0, 1] or rho is outside (-1, 1).
ChainParams chain_params(double rate, double rho);

/// First state drawn from the stationary distribution.
std::vector<bool> sample_chain(double rate, double rho, std::size_t length, Rng& rng);

/// Sample lag-1 autocorrelation; 0 for a constant series.
double lag1_autocorrelation(const std::vector<bool>& x);

enum class Addressing {
    /// Speakers look at task images: speech counts toward every listener.
    Group,
    /// Speakers look at one addressee per phase: speech counts toward that listener only.
    Directed,
};

std::string_view addressing_name(Addressing a);
Addressing addressing_from_name(std::string_view s);

struct SynthParams {
    std::string group_id = "G01";
    int n_participants = 4;
    double duration_s = 288.0;
    double rho = 0.63;
    /// Stationary rates: per-participant speaking chain (= active conversation
    /// pair rate under group addressing), and each proximity / shared-attention
    /// pairing slot. Pairs outside the phase's pairing are never active.
    std::array<double, 3> rates{0.9976, 0.12, 0.12};
    /// Windows per phase; each phase re-draws which pairs are paired.
    int phase_period_windows = 5;
    std::uint64_t seed = 42;
    Addressing addressing = Addressing::Group;
    int gaze_hz = 4;
    double window_s = 32.0;
    double stride_s = 16.0;
    double events_per_minute = 3.0;
};

/// The 1 Hz latent chains behind a generated session.
struct LatentChains {
    std::vector<std::vector<bool>> speaking;    // per participant
    std::vector<std::vector<bool>> prox_slots;  // per pairing slot
    std::vector<std::vector<bool>> attn_slots;
    /// Per phase: partner of each participant (-1 unpaired) for proximity and attention.
    std::vector<std::vector<int>> prox_partner;
    std::vector<std::vector<int>> attn_partner;
    std::vector<std::vector<int>> addressee;  // directed addressing only
};

struct SynthSession {
    SessionStreams streams;
    SessionTimeline timeline;
    LatentChains latent;
};

/// Throws ContractError for invalid parameters.
void validate(const SynthParams& p);

SynthSession generate_synthetic_session(const SynthParams& p);

/// Groups "G01".."Gnn" with seeds derived from p.seed.
std::vector<SynthSession> generate_synthetic_corpus(const SynthParams& p, int groups);

}  // namespace groupcast
