#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace groupcast {

enum class Modality : std::uint8_t { Conversation = 0, Proximity = 1, SharedAttention = 2 };

inline constexpr std::array<Modality, 3> kModalities = {
    Modality::Conversation, Modality::Proximity, Modality::SharedAttention};

constexpr bool is_directed(Modality m) { return m == Modality::Conversation; }
constexpr std::size_t modality_index(Modality m) { return static_cast<std::size_t>(m); }

/// "conversation", "proximity", "shared_attention".
std::string_view modality_name(Modality m);
/// Single-letter key used in the response format: C, P, S.
char modality_key(Modality m);
Modality modality_from_name(std::string_view name);

struct ParticipantId {
    int index = 0;
    std::string label;

    friend bool operator==(const ParticipantId&, const ParticipantId&) = default;
};

/// "P1" for index 0.
std::string participant_label(int index);
/// Inverse of participant_label; nullopt for anything not of the form P<k>, k >= 1.
std::optional<int> participant_index(std::string_view label);

struct Window {
    int index = 0;
    double start_s = 0.0;
    double end_s = 0.0;

    double length_s() const { return end_s - start_s; }
    friend bool operator==(const Window&, const Window&) = default;
};

inline constexpr double kDefaultWindowS = 32.0;
inline constexpr double kDefaultStrideS = 16.0;

/// Overlapping windows [index*stride, index*stride + window) that fit inside
/// the session. Throws EmptySession if not even one window fits.
std::vector<Window> make_window_index(double duration_s, double window_s = kDefaultWindowS,
                                      double stride_s = kDefaultStrideS);

/// Calls f(i, j) for each possible edge: ordered pairs when directed,
/// i < j otherwise.
template <typename F>
void for_each_edge(int n, bool directed, F&& f) {
    for (int i = 0; i < n; ++i)
        for (int j = directed ? 0 : i + 1; j < n; ++j)
            if (i != j) f(i, j);
}

inline int edge_count(int n, bool directed) { return directed ? n * (n - 1) : n * (n - 1) / 2; }

/// One weighted interaction graph over a group for one window. Weights are
/// stored densely; undirected graphs keep both triangles equal.
class Sociogram {
public:
    Sociogram() = default;
    Sociogram(Modality modality, int n, Window window);

    Modality modality() const { return modality_; }
    bool directed() const { return is_directed(modality_); }
    int n() const { return n_; }
    const Window& window() const { return window_; }

    double weight(int i, int j) const { return weights_[static_cast<std::size_t>(i * n_ + j)]; }
    /// Sets w(i,j) (and w(j,i) when undirected). Weight must lie in [0, 1].
    void set_weight(int i, int j, double w);

    /// Row-major n*n weights with a zero diagonal.
    std::span<const double> matrix() const { return weights_; }
    bool empty() const;

    friend bool operator==(const Sociogram&, const Sociogram&) = default;

private:
    Modality modality_ = Modality::Conversation;
    int n_ = 0;
    Window window_{};
    std::vector<double> weights_;
};

struct SociogramTriple {
    Window window{};
    Sociogram conv;
    Sociogram prox;
    Sociogram attn;

    const Sociogram& get(Modality m) const;
    Sociogram& get(Modality m);
    int n() const { return conv.n(); }

    friend bool operator==(const SociogramTriple&, const SociogramTriple&) = default;
};

SociogramTriple make_empty_triple(int n, Window window);

/// Per-second activity bits for every ordered pair and modality in one window.
/// Seconds are 0-based internally (second s of the text formats is s-1 here).
class BinarySeries {
public:
    BinarySeries() = default;
    BinarySeries(Window window, int n, int seconds);

    const Window& window() const { return window_; }
    int n() const { return n_; }
    int seconds() const { return seconds_; }

    bool active(Modality m, int i, int j, int s) const { return bits_[offset(m, i, j, s)] != 0; }
    /// Undirected modalities are written to both (i,j) and (j,i).
    void set(Modality m, int i, int j, int s, bool on);
    /// Raw write of one ordered entry; may leave an undirected modality
    /// asymmetric. Used by parsers before symmetrisation.
    void set_raw(Modality m, int i, int j, int s, bool on) { bits_[offset(m, i, j, s)] = on ? 1 : 0; }
    /// OR-combines (i,j) and (j,i) for undirected modalities, per second.
    void symmetrize();

    int active_seconds(Modality m, int i, int j) const;
    bool any_active(Modality m, int i, int j) const { return active_seconds(m, i, j) > 0; }

    friend bool operator==(const BinarySeries&, const BinarySeries&) = default;

private:
    std::size_t offset(Modality m, int i, int j, int s) const {
        return ((modality_index(m) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)) *
                    static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(seconds_) +
               static_cast<std::size_t>(s);
    }

    Window window_{};
    int n_ = 0;
    int seconds_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Weight = active seconds / T per pair and modality. Undirected modalities
/// are OR-symmetrised per second before counting.
SociogramTriple weighted_from_binary_series(const BinarySeries& series);

/// Edge kept (weight 1) iff weight > tau.
Sociogram binarize(const Sociogram& g, double tau = 0.0);

nlohmann::json to_json(const Window& w);
Window window_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Sociogram& g);
Sociogram sociogram_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BinarySeries& s);
BinarySeries binary_series_from_json(const nlohmann::json& j);

}  // namespace groupcast
