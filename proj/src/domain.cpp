#include "groupcast/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "groupcast/errors.hpp"

namespace groupcast {

std::string_view modality_name(Modality m) {
    switch (m) {
        case Modality::Conversation: return "conversation";
        case Modality::Proximity: return "proximity";
        case Modality::SharedAttention: return "shared_attention";
    }
    return "unknown";
}

char modality_key(Modality m) {
    switch (m) {
        case Modality::Conversation: return 'C';
        case Modality::Proximity: return 'P';
        case Modality::SharedAttention: return 'S';
    }
    return '?';
}

Modality modality_from_name(std::string_view name) {
    for (Modality m : kModalities)
        if (modality_name(m) == name) return m;
    throw SchemaError("unknown modality '" + std::string(name) + "'");
}

std::string participant_label(int index) { return "P" + std::to_string(index + 1); }

std::optional<int> participant_index(std::string_view label) {
    if (label.size() < 2 || label.front() != 'P') return std::nullopt;
    int k = 0;
    const char* first = label.data() + 1;
    const char* last = label.data() + label.size();
    auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec != std::errc{} || ptr != last || k < 1) return std::nullopt;
    return k - 1;
}

std::vector<Window> make_window_index(double duration_s, double window_s, double stride_s) {
    if (!(window_s > 0.0) || !(stride_s > 0.0))
        throw ContractError("window and stride must be positive");
    if (!(duration_s >= window_s))
        throw EmptySession("session of " + std::to_string(duration_s) + " s is shorter than one " +
                           std::to_string(window_s) + " s window");
    const auto count = static_cast<int>(std::floor((duration_s - window_s) / stride_s)) + 1;
    std::vector<Window> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double start = k * stride_s;
        out.push_back(Window{k, start, start + window_s});
    }
    return out;
}

Sociogram::Sociogram(Modality modality, int n, Window window)
    : modality_(modality), n_(n), window_(window), weights_(static_cast<std::size_t>(n * n), 0.0) {
    if (n < 2) throw ContractError("a sociogram needs at least 2 participants");
}

void Sociogram::set_weight(int i, int j, double w) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j)
        throw ContractError("invalid edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (!(w >= 0.0 && w <= 1.0)) throw ContractError("edge weight outside [0,1]: " + std::to_string(w));
    weights_[static_cast<std::size_t>(i * n_ + j)] = w;
    if (!directed()) weights_[static_cast<std::size_t>(j * n_ + i)] = w;
}

bool Sociogram::empty() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 0.0; });
}

const Sociogram& SociogramTriple::get(Modality m) const {
    switch (m) {
        case Modality::Conversation: return conv;
        case Modality::Proximity: return prox;
        case Modality::SharedAttention: return attn;
    }
    return conv;
}

Sociogram& SociogramTriple::get(Modality m) {
    return const_cast<Sociogram&>(std::as_const(*this).get(m));
}

SociogramTriple make_empty_triple(int n, Window window) {
    return SociogramTriple{window, Sociogram(Modality::Conversation, n, window),
                           Sociogram(Modality::Proximity, n, window),
                           Sociogram(Modality::SharedAttention, n, window)};
}

BinarySeries::BinarySeries(Window window, int n, int seconds)
    : window_(window), n_(n), seconds_(seconds),
      bits_(static_cast<std::size_t>(3 * n * n * seconds), 0) {
    if (n < 2) throw ContractError("a binary series needs at least 2 participants");
    if (seconds < 1) throw ContractError("a binary series needs at least one second");
}

void BinarySeries::set(Modality m, int i, int j, int s, bool on) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j || s < 0 || s >= seconds_)
        throw ContractError("binary series index out of range");
    set_raw(m, i, j, s, on);
    if (!is_directed(m)) set_raw(m, j, i, s, on);
}

void BinarySeries::symmetrize() {
    for (Modality m : kModalities) {
        if (is_directed(m)) continue;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                for (int s = 0; s < seconds_; ++s) {
                    const bool on = active(m, i, j, s) || active(m, j, i, s);
                    set_raw(m, i, j, s, on);
                    set_raw(m, j, i, s, on);
                }
    }
}

int BinarySeries::active_seconds(Modality m, int i, int j) const {
    const auto* first = bits_.data() + offset(m, i, j, 0);
    return static_cast<int>(std::count(first, first + seconds_, std::uint8_t{1}));
}

SociogramTriple weighted_from_binary_series(const BinarySeries& series) {
    const int n = series.n();
    const int T = series.seconds();
    SociogramTriple out = make_empty_triple(n, series.window());
    for (Modality m : kModalities) {
        Sociogram& g = out.get(m);
        for_each_edge(n, is_directed(m), [&](int i, int j) {
            int count = 0;
            for (int s = 0; s < T; ++s) {
                const bool on = is_directed(m) ? series.active(m, i, j, s)
                                               : (series.active(m, i, j, s) || series.active(m, j, i, s));
                count += on ? 1 : 0;
            }
            g.set_weight(i, j, static_cast<double>(count) / T);
        });
    }
    return out;
}

Sociogram binarize(const Sociogram& g, double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) throw ContractError("binarization threshold must lie in [0,1)");
    Sociogram out(g.modality(), g.n(), g.window());
    for_each_edge(g.n(), g.directed(), [&](int i, int j) {
        out.set_weight(i, j, g.weight(i, j) > tau ? 1.0 : 0.0);
    });
    return out;
}

nlohmann::json to_json(const Window& w) {
    return {{"index", w.index}, {"start_s", w.start_s}, {"end_s", w.end_s}};
}

Window window_from_json(const nlohmann::json& j) {
    return Window{j.at("index").get<int>(), j.at("start_s").get<double>(), j.at("end_s").get<double>()};
}

nlohmann::json to_json(const Sociogram& g) {
    nlohmann::json edges = nlohmann::json::array();
    for_each_edge(g.n(), g.directed(), [&](int i, int j) {
        edges.push_back({{"from", i}, {"to", j}, {"weight", g.weight(i, j)}});
    });
    return {{"modality", std::string(modality_name(g.modality()))},
            {"directed", g.directed()},
            {"n", g.n()},
            {"window", to_json(g.window())},
            {"edges", std::move(edges)}};
}

Sociogram sociogram_from_json(const nlohmann::json& j) {
    try {
        const Modality m = modality_from_name(j.at("modality").get<std::string>());
        if (j.at("directed").get<bool>() != is_directed(m))
            throw SchemaError("directedness does not match modality");
        Sociogram g(m, j.at("n").get<int>(), window_from_json(j.at("window")));
        for (const auto& e : j.at("edges")) g.set_weight(e.at("from").get<int>(), e.at("to").get<int>(), e.at("weight").get<double>());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed sociogram json: ") + e.what());
    }
}

nlohmann::json to_json(const BinarySeries& s) {
    // Active seconds (1-based) per ordered pair and modality.
    nlohmann::json pairs = nlohmann::json::array();
    for (int i = 0; i < s.n(); ++i)
        for (int j = 0; j < s.n(); ++j) {
            if (i == j) continue;
            nlohmann::json entry = {{"from", i}, {"to", j}};
            for (Modality m : kModalities) {
                nlohmann::json secs = nlohmann::json::array();
                for (int k = 0; k < s.seconds(); ++k)
                    if (s.active(m, i, j, k)) secs.push_back(k + 1);
                entry[std::string(1, modality_key(m))] = std::move(secs);
            }
            pairs.push_back(std::move(entry));
        }
    return {{"window", to_json(s.window())}, {"n", s.n()}, {"seconds", s.seconds()}, {"pairs", std::move(pairs)}};
}

BinarySeries binary_series_from_json(const nlohmann::json& j) {
    try {
        BinarySeries s(window_from_json(j.at("window")), j.at("n").get<int>(), j.at("seconds").get<int>());
        for (const auto& p : j.at("pairs")) {
            const int from = p.at("from").get<int>();
            const int to = p.at("to").get<int>();
            for (Modality m : kModalities)
                for (int sec : p.at(std::string(1, modality_key(m)))) s.set(m, from, to, sec - 1, true);
        }
        s.symmetrize();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed binary series json: ") + e.what());
    }
}

}  // namespace groupcast
