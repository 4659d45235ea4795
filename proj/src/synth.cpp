#include "groupcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "groupcast/errors.hpp"
#include "groupcast/ingest.hpp"

namespace groupcast {

ChainParams chain_params(double rate, double rho) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ContractError("chain rate must lie in [0, 1]");
    const double lo = std::max({-1.0, rate > 0.0 ? 1.0 - 1.0 / rate : -1.0,
                                rate < 1.0 ? 1.0 - 1.0 / (1.0 - rate) : -1.0});
    const ChainParams c{rate * (1.0 - rho), (1.0 - rate) * (1.0 - rho)};
    if (!(rho > -1.0 && rho < 1.0) || c.p01 > 1.0 || c.p10 > 1.0 || c.p01 < 0.0 || c.p10 < 0.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "infeasible (rate=%g, rho=%g): for this rate rho must lie in [%g, 1)", rate, rho,
                      lo);
        throw ContractError(buf);
    }
    return c;
}

std::vector<bool> sample_chain(double rate, double rho, std::size_t length, Rng& rng) {
    const auto c = chain_params(rate, rho);
    std::vector<bool> x(length);
    if (length == 0) return x;
    x[0] = bernoulli(rng, rate);
    for (std::size_t t = 1; t < length; ++t) x[t] = x[t - 1] ? !bernoulli(rng, c.p10) : bernoulli(rng, c.p01);
    return x;
}

double lag1_autocorrelation(const std::vector<bool>& x) {
    if (x.size() < 2) return 0.0;
    double mean = 0.0;
    for (bool b : x) mean += b ? 1.0 : 0.0;
    mean /= static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double d = (x[t] ? 1.0 : 0.0) - mean;
        den += d * d;
        if (t + 1 < x.size()) num += d * ((x[t + 1] ? 1.0 : 0.0) - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

std::string_view addressing_name(Addressing a) { return a == Addressing::Group ? "group" : "directed"; }

Addressing addressing_from_name(std::string_view s) {
    if (s == "group") return Addressing::Group;
    if (s == "directed") return Addressing::Directed;
    throw ContractError("unknown addressing '" + std::string(s) + "' (group|directed)");
}

void validate(const SynthParams& p) {
    if (p.n_participants < 2) throw ContractError("synthetic session needs at least 2 participants");
    if (p.duration_s < p.window_s) throw ContractError("synthetic duration must be at least one window");
    if (p.window_s <= 0.0 || p.stride_s <= 0.0) throw ContractError("window and stride must be positive");
    if (p.phase_period_windows < 1) throw ContractError("phase period must be at least 1 window");
    if (p.gaze_hz < 1) throw ContractError("gaze rate must be at least 1 Hz");
    if (p.events_per_minute < 0.0) throw ContractError("event rate must be non-negative");
    for (double r : p.rates) chain_params(r, p.rho);
}

namespace {

std::vector<int> random_pairing(int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[uniform_below(rng, static_cast<std::uint64_t>(i + 1))]);
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    for (int s = 0; s + 1 < n; s += 2) {
        partner[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])] = perm[static_cast<std::size_t>(s + 1)];
        partner[static_cast<std::size_t>(perm[static_cast<std::size_t>(s + 1)])] = perm[static_cast<std::size_t>(s)];
    }
    return partner;
}

/// Pairing slot of participant i under `partner`: slots are numbered by the
/// lower index of each pair in increasing order.
std::vector<int> slot_of(const std::vector<int>& partner) {
    std::vector<int> slot(partner.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < partner.size(); ++i)
        if (partner[i] > static_cast<int>(i)) {
            slot[i] = next;
            slot[static_cast<std::size_t>(partner[i])] = next;
            ++next;
        }
    return slot;
}

std::vector<int> redraw_pairing(int n, const std::vector<int>* previous, Rng& rng) {
    auto p = random_pairing(n, rng);
    for (int tries = 0; previous && p == *previous && tries < 32; ++tries) p = random_pairing(n, rng);
    return p;
}

Vec3 normalized(const Vec3& v) {
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / len, v[1] / len, v[2] / len};
}

Vec3 image_point(const std::string& id) {
    // Spread image targets along a wall 5 m away.
    const double x = static_cast<double>(fnv1a(id) % 64) * 0.1 - 3.2;
    return {x, 1.5, 5.0};
}

}  // namespace

SynthSession generate_synthetic_session(const SynthParams& p) {
    validate(p);
    const int n = p.n_participants;
    const auto un = static_cast<std::size_t>(n);
    const auto seconds = static_cast<std::size_t>(std::floor(p.duration_s));
    const double duration = static_cast<double>(seconds);
    const int slots = n / 2;
    const auto phase_len = std::max<std::size_t>(1, static_cast<std::size_t>(p.phase_period_windows * p.stride_s));
    const std::size_t phases = (seconds + phase_len - 1) / phase_len;

    SynthSession out;
    auto& L = out.latent;
    Rng chains(mix_seed({p.seed, 1}));
    for (int i = 0; i < n; ++i) L.speaking.push_back(sample_chain(p.rates[0], p.rho, seconds, chains));
    for (int s = 0; s < slots; ++s) L.prox_slots.push_back(sample_chain(p.rates[1], p.rho, seconds, chains));
    for (int s = 0; s < slots; ++s) L.attn_slots.push_back(sample_chain(p.rates[2], p.rho, seconds, chains));

    Rng roles(mix_seed({p.seed, 2}));
    for (std::size_t ph = 0; ph < phases; ++ph) {
        L.prox_partner.push_back(redraw_pairing(n, ph ? &L.prox_partner.back() : nullptr, roles));
        L.attn_partner.push_back(redraw_pairing(n, ph ? &L.attn_partner.back() : nullptr, roles));
        std::vector<int> addr(un);
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<int>(uniform_below(roles, static_cast<std::uint64_t>(n - 1)));
            addr[static_cast<std::size_t>(i)] = k >= i ? k + 1 : k;
        }
        L.addressee.push_back(std::move(addr));
    }

    auto& st = out.streams;
    st.group_id = p.group_id;
    for (int i = 0; i < n; ++i) st.participants.push_back(participant_label(i));
    st.duration_s = duration;

    // Positions at k + 0.5: home on a circle with >= 2 m between neighbours;
    // an active proximity slot brings the higher-index partner next to the lower.
    const double radius = 1.0 / std::sin(std::numbers::pi / n);
    std::vector<Vec3> home(un);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        home[static_cast<std::size_t>(i)] = {radius * std::cos(a), 1.6, radius * std::sin(a)};
    }
    Rng jitter(mix_seed({p.seed, 3}));
    std::vector<std::vector<Vec3>> pos(seconds, std::vector<Vec3>(un));
    for (std::size_t k = 0; k < seconds; ++k) {
        const auto& partner = L.prox_partner[k / phase_len];
        const auto slot = slot_of(partner);
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            Vec3 at = home[ui];
            const int j = partner[ui];
            if (j >= 0 && j < i && L.prox_slots[static_cast<std::size_t>(slot[ui])][k]) {
                at = home[static_cast<std::size_t>(j)];
                at[0] += 0.3;
            }
            at[0] += (unit_uniform(jitter) - 0.5) * 0.1;
            at[2] += (unit_uniform(jitter) - 0.5) * 0.1;
            pos[k][ui] = at;
            st.positions.push_back({static_cast<double>(k) + 0.5, i, at});
        }
    }

    // Gaze: a shared image while an attention slot is active, the addressee
    // while speaking under directed addressing, otherwise an own image.
    for (std::size_t k = 0; k < seconds; ++k) {
        const std::size_t ph = k / phase_len;
        const auto& partner = L.attn_partner[ph];
        const auto slot = slot_of(partner);
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            std::string target = "own_" + st.participants[ui];
            Vec3 point = image_point(target);
            if (partner[ui] >= 0 && L.attn_slots[static_cast<std::size_t>(slot[ui])][k]) {
                target = "img_" + std::to_string(ph) + "_" + std::to_string(slot[ui]);
                point = image_point(target);
            }
            if (p.addressing == Addressing::Directed && L.speaking[ui][k]) {
                const int a = L.addressee[ph][ui];
                target = st.participants[static_cast<std::size_t>(a)];
                point = pos[k][static_cast<std::size_t>(a)];
            }
            const Vec3& o = pos[k][ui];
            const Vec3 dir = normalized({point[0] - o[0], point[1] - o[1], point[2] - o[2]});
            for (int q = 0; q < p.gaze_hz; ++q)
                st.gaze.push_back({static_cast<double>(k) + (q + 0.5) / p.gaze_hz, i, o, dir, target});
        }
    }

    // Speech: one segment per speaking run.
    for (int i = 0; i < n; ++i) {
        const auto& sp = L.speaking[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < seconds;) {
            if (!sp[k]) {
                ++k;
                continue;
            }
            std::size_t e = k;
            while (e < seconds && sp[e]) ++e;
            st.speech.push_back({i, static_cast<double>(k), static_cast<double>(e)});
            k = e;
        }
    }
    std::sort(st.speech.begin(), st.speech.end(), [](const SpeechSegment& a, const SpeechSegment& b) {
        return std::tie(a.start_s, a.speaker) < std::tie(b.start_s, b.speaker);
    });

    Rng ev(mix_seed({p.seed, 4}));
    const double per_second = p.events_per_minute / 60.0;
    for (std::size_t k = 0; k < seconds; ++k) {
        if (!bernoulli(ev, per_second)) continue;
        const int who = static_cast<int>(uniform_below(ev, un));
        if (bernoulli(ev, 0.5))
            st.events.push_back({static_cast<double>(k) + 0.25, who, TaskEventKind::ImageSelected,
                                 "img_" + std::to_string(uniform_below(ev, 24))});
        else
            st.events.push_back({static_cast<double>(k) + 0.25, who, TaskEventKind::CategoryAssigned,
                                 "category_" + std::to_string(uniform_below(ev, 4))});
    }
    st.events.push_back({duration, 0, TaskEventKind::Other, "session_end"});

    IngestConfig cfg;
    cfg.window_s = p.window_s;
    cfg.stride_s = p.stride_s;
    out.timeline = build_timeline(st, cfg);
    return out;
}

std::vector<SynthSession> generate_synthetic_corpus(const SynthParams& p, int groups) {
    if (groups < 1) throw ContractError("corpus needs at least one group");
    std::vector<SynthSession> out;
    for (int g = 1; g <= groups; ++g) {
        SynthParams q = p;
        char id[16];
        std::snprintf(id, sizeof id, "G%02d", g);
        q.group_id = id;
        q.seed = mix_seed({p.seed, static_cast<std::uint64_t>(g)});
        out.push_back(generate_synthetic_session(q));
    }
    return out;
}

}  // namespace groupcast
