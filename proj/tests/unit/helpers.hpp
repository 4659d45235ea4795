#pragma once

#include <filesystem>
#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "groupcast/domain.hpp"
#include "groupcast/rng.hpp"
#include "groupcast/synth.hpp"

namespace groupcast::testing {

/// Weights drawn from {0, k/T} with a chance of exact zeros, which is what
/// window sociograms look like.
inline Sociogram random_sociogram(Rng& rng, Modality m, int n, Window w = {0, 0.0, 32.0}, double zero_p = 0.4) {
    Sociogram g(m, n, w);
    for_each_edge(n, is_directed(m), [&](int i, int j) {
        const double v = bernoulli(rng, zero_p) ? 0.0 : static_cast<double>(uniform_below(rng, 33)) / 32.0;
        g.set_weight(i, j, v);
    });
    return g;
}

inline SociogramTriple random_triple(Rng& rng, int n, Window w = {0, 0.0, 32.0}) {
    SociogramTriple t;
    t.window = w;
    t.conv = random_sociogram(rng, Modality::Conversation, n, w);
    t.prox = random_sociogram(rng, Modality::Proximity, n, w);
    t.attn = random_sociogram(rng, Modality::SharedAttention, n, w);
    return t;
}

/// Symmetric for undirected modalities.
inline BinarySeries random_series(Rng& rng, int n, int seconds, double p = 0.5, Window w = {1, 16.0, 48.0}) {
    BinarySeries s(w, n, seconds);
    for (Modality m : kModalities)
        for_each_edge(n, is_directed(m), [&](int i, int j) {
            for (int t = 0; t < seconds; ++t) s.set(m, i, j, t, bernoulli(rng, p));
        });
    return s;
}

/// Small directed-addressing session with moderate rates, cheap to evaluate.
inline SynthParams small_params(std::uint64_t seed = 7, double duration = 176.0) {
    SynthParams p;
    p.duration_s = duration;
    p.seed = seed;
    p.rates = {0.6, 0.4, 0.4};
    p.addressing = Addressing::Directed;
    p.gaze_hz = 2;
    return p;
}

/// Rewrites canonical response text the way a chatty model might: random
/// case, padding, key order, value spellings, separators and prose lines.
inline std::string perturb_response(const std::string& canonical, Rng& rng) {
    static const char* prose[] = {
        "Here is my prediction for the next window.",
        "Based on the context above, the group keeps its structure.",
        "Note: attention seems to drift toward the task images.",
        "I am fairly confident about these values.",
        "Continuing with the remaining seconds:",
    };
    const bool shuffle_keys = bernoulli(rng, 0.6);
    const bool words = bernoulli(rng, 0.4);
    const bool mixed_case = bernoulli(rng, 0.6);
    const double prose_rate = bernoulli(rng, 0.5) ? 0.08 : 0.0;
    std::ostringstream out;
    if (bernoulli(rng, 0.5)) out << "Sure! " << prose[uniform_below(rng, 5)] << "\n\n";
    std::istringstream in(canonical);
    std::string line;
    while (std::getline(in, line)) {
        std::string rewritten = line;
        if (line.rfind("t=", 0) == 0) {
            const auto colon = line.find(':');
            std::vector<std::string> kv;
            std::istringstream parts(line.substr(colon + 1));
            std::string item;
            while (std::getline(parts, item, ',')) {
                item.erase(0, item.find_first_not_of(' '));
                if (words) item = item.substr(0, 2) + (item.back() == 'Y' ? "yes" : "no");
                if (bernoulli(rng, 0.3)) item.insert(1, " ");
                kv.push_back(item);
            }
            if (shuffle_keys)
                for (std::size_t k = kv.size(); k > 1; --k) std::swap(kv[k - 1], kv[uniform_below(rng, k)]);
            const char* seps[] = {", ", "; ", "  ", ","};
            const char* sep = seps[uniform_below(rng, 4)];
            rewritten = line.substr(0, colon) + (bernoulli(rng, 0.3) ? " : " : ": ");
            for (std::size_t k = 0; k < kv.size(); ++k) rewritten += (k ? sep : "") + kv[k];
        } else if (line.rfind("Pair ", 0) == 0 && bernoulli(rng, 0.3)) {
            const auto arrow = line.find("->");
            rewritten = "Pair " + line.substr(5, arrow - 5) + " -> " + line.substr(arrow + 2);
        }
        if (mixed_case)
            for (auto& c : rewritten)
                if (bernoulli(rng, 0.3)) c = static_cast<char>(std::islower(static_cast<unsigned char>(c)) ? std::toupper(static_cast<unsigned char>(c)) : std::tolower(static_cast<unsigned char>(c)));
        const int pad = static_cast<int>(uniform_below(rng, 3));
        out << std::string(static_cast<std::size_t>(pad), bernoulli(rng, 0.5) ? ' ' : '\t') << rewritten
            << (bernoulli(rng, 0.2) ? "  " : "") << (bernoulli(rng, 0.1) ? "\r\n" : "\n");
        if (bernoulli(rng, prose_rate)) out << prose[uniform_below(rng, 5)] << "\n";
        if (bernoulli(rng, 0.05)) out << "\n";
    }
    return out.str();
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("groupcast_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace groupcast::testing
