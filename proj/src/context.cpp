#include "groupcast/context.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "groupcast/errors.hpp"
#include "groupcast/response.hpp"

namespace groupcast {

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_seconds(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

constexpr std::array<std::string_view, 3> kModalityTitle = {"Conversation", "Proximity", "Shared attention"};

}  // namespace

// ---- profiles

std::string_view profile_dimension_name(ProfileDimension d) {
    switch (d) {
        case ProfileDimension::Speaking: return "Speaking";
        case ProfileDimension::Gaze: return "Gaze";
        case ProfileDimension::Locomotion: return "Locomotion";
    }
    return "Speaking";
}

double profile_feature(const ParticipantFeatures& f, ProfileDimension d) {
    switch (d) {
        case ProfileDimension::Speaking: return f.speech_segments;
        case ProfileDimension::Gaze: return f.gaze_switch_rate;
        case ProfileDimension::Locomotion: return f.mean_speed;
    }
    return 0.0;
}

std::string profile_descriptor(ProfileDimension d, int cluster, int k) {
    static constexpr std::array<std::array<std::string_view, 3>, 3> table = {{
        {"quiet participant", "moderate talker", "frequent talker"},
        {"low gaze activity", "moderate gaze activity", "high gaze activity"},
        {"stationary", "moderate movement", "dynamic mover"},
    }};
    if (k <= 1) return "typical";
    if (cluster < 0 || cluster >= k) throw ContractError("profile_descriptor: cluster out of range");
    const auto rank = static_cast<std::size_t>(std::lround(cluster * 2.0 / (k - 1)));
    return std::string(table[static_cast<std::size_t>(d)][rank]);
}

int ProfileModel::assign(ProfileDimension d, double raw_value) const {
    const auto di = static_cast<std::size_t>(d);
    const double z = zscore[di].apply({raw_value})[0];
    int best = 0;
    double best_d = std::abs(z - centroids[di][0]);
    for (std::size_t c = 1; c < centroids[di].size(); ++c) {
        const double dist = std::abs(z - centroids[di][c]);
        if (dist < best_d) {
            best_d = dist;
            best = static_cast<int>(c);
        }
    }
    return best;
}

ProfileModel fit_profile_model(const std::vector<ParticipantFeatures>& pooled, int k, std::uint64_t seed) {
    if (pooled.empty()) throw ContractError("profile model needs at least one participant");
    if (k < 1) throw ContractError("profile model needs k >= 1");
    ProfileModel m;
    if (static_cast<int>(pooled.size()) < k)
        m.warnings.push_back("only " + std::to_string(pooled.size()) + " participants for k=" + std::to_string(k) +
                             "; k reduced");
    for (ProfileDimension d : kProfileDimensions) {
        const auto di = static_cast<std::size_t>(d);
        std::vector<Point> raw;
        for (const auto& f : pooled) raw.push_back({profile_feature(f, d)});
        m.zscore[di] = ZScore::fit(raw);
        std::vector<Point> z;
        for (const auto& p : raw) z.push_back(m.zscore[di].apply(p));
        const auto fit = kmeans(z, k, mix_seed({seed, di}));
        for (const auto& c : fit.centroids) m.centroids[di].push_back(c[0]);
        std::sort(m.centroids[di].begin(), m.centroids[di].end());
        if (m.k(d) < std::min<int>(k, static_cast<int>(pooled.size())))
            m.warnings.push_back(std::string(profile_dimension_name(d)) + ": only " + std::to_string(m.k(d)) +
                                 " distinct values; k reduced");
    }
    return m;
}

ProfileModel fit_profile_model(const std::vector<const SessionTimeline*>& corpus, int k, std::uint64_t seed) {
    std::vector<ParticipantFeatures> pooled;
    for (const auto* s : corpus) pooled.insert(pooled.end(), s->features.begin(), s->features.end());
    return fit_profile_model(pooled, k, seed);
}

std::vector<IndividualProfile> profile_participants(const SessionTimeline& session, const ProfileModel& model) {
    if (session.n() < 2) throw ContractError("profiles need at least 2 participants");
    if (static_cast<int>(session.features.size()) != session.n())
        throw ContractError("profiles: session features missing");
    std::vector<IndividualProfile> out;
    for (int i = 0; i < session.n(); ++i) {
        IndividualProfile p;
        p.participant = {i, session.participants[static_cast<std::size_t>(i)]};
        p.evidence = session.features[static_cast<std::size_t>(i)];
        for (ProfileDimension d : kProfileDimensions) {
            const auto di = static_cast<std::size_t>(d);
            p.cluster[di] = model.assign(d, profile_feature(p.evidence, d));
            p.descriptor[di] = profile_descriptor(d, p.cluster[di], model.k(d));
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<IndividualProfile> profile_participants(const SessionTimeline& session, int k, std::uint64_t seed) {
    return profile_participants(session, fit_profile_model(session.features, k, seed));
}

// ---- phases

Point phase_embedding(const std::array<NetworkMetrics, 3>& metrics) {
    Point out;
    out.reserve(kPhaseEmbeddingDim);
    for (const auto& m : metrics) {
        out.push_back(m.density);
        out.push_back(m.reciprocity);
        out.push_back(m.clustering);
    }
    return out;
}

namespace {

std::array<NetworkMetrics, 3> triple_metrics(const SociogramTriple& g) {
    return {network_metrics(g.conv), network_metrics(g.prox), network_metrics(g.attn)};
}

}  // namespace

Point phase_embedding(const SociogramTriple& g) { return phase_embedding(triple_metrics(g)); }

std::string phase_label(int rank) {
    static constexpr std::array<std::string_view, 4> labels = {"active discussion", "animated collaboration",
                                                               "exploration", "consensus"};
    if (rank >= 0 && rank < 4) return std::string(labels[static_cast<std::size_t>(rank)]);
    return "phase " + std::to_string(rank);
}

int PhaseModel::assign(const Point& raw_embedding) const {
    const Point z = zscore.apply(raw_embedding);
    int best = 0;
    double best_d = squared_distance(z, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(z, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

PhaseModel fit_phase_model(const std::vector<Point>& raw_embeddings, int k, std::uint64_t seed) {
    if (raw_embeddings.empty()) throw ContractError("phase model needs at least one window");
    if (k < 1) throw ContractError("phase model needs k >= 1");
    PhaseModel m;
    if (static_cast<int>(raw_embeddings.size()) < k)
        m.warnings.push_back("only " + std::to_string(raw_embeddings.size()) + " windows for k=" +
                             std::to_string(k) + "; k reduced");
    m.zscore = ZScore::fit(raw_embeddings);
    std::vector<Point> z;
    for (const auto& p : raw_embeddings) z.push_back(m.zscore.apply(p));
    auto fit = kmeans(z, k, seed);
    if (fit.centroids.size() < std::min(static_cast<std::size_t>(k), raw_embeddings.size()))
        m.warnings.push_back("only " + std::to_string(fit.centroids.size()) + " distinct window embeddings");
    std::vector<std::size_t> order(fit.centroids.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fit.centroids[a][0] > fit.centroids[b][0];
    });
    for (auto c : order) m.centroids.push_back(fit.centroids[c]);
    return m;
}

PhaseModel fit_phase_model(const std::vector<const SessionTimeline*>& corpus, int k, std::uint64_t seed) {
    std::vector<Point> emb;
    for (const auto* s : corpus)
        for (const auto& w : s->windows) emb.push_back(phase_embedding(w.truth));
    return fit_phase_model(emb, k, seed);
}

TrendDirection trend_direction(double previous, double current, double threshold) {
    if (current - previous > threshold) return TrendDirection::Up;
    if (previous - current > threshold) return TrendDirection::Down;
    return TrendDirection::Flat;
}

namespace {

std::vector<Trend> trends_between(const std::array<NetworkMetrics, 3>& prev, const std::array<NetworkMetrics, 3>& cur,
                                  double threshold) {
    auto make = [&](std::size_t m, std::string metric, double a, double b) {
        return Trend{std::string(kModalityTitle[m]), std::move(metric), a, b, trend_direction(a, b, threshold)};
    };
    return {
        make(0, "Density", prev[0].density, cur[0].density),
        make(0, "Reciprocity", prev[0].reciprocity, cur[0].reciprocity),
        make(1, "Density", prev[1].density, cur[1].density),
        make(2, "Density", prev[2].density, cur[2].density),
    };
}

std::vector<TemporalContext> temporal_from_metrics(const std::vector<std::array<NetworkMetrics, 3>>& metrics,
                                                   const PhaseModel& model, double threshold) {
    std::vector<TemporalContext> out;
    out.reserve(metrics.size());
    for (std::size_t t = 0; t < metrics.size(); ++t) {
        TemporalContext c;
        c.phase_id = model.assign(phase_embedding(metrics[t]));
        c.phase_label = phase_label(c.phase_id);
        c.consecutive_windows = (t > 0 && out.back().phase_id == c.phase_id) ? out.back().consecutive_windows + 1 : 1;
        c.trends = trends_between(metrics[t > 0 ? t - 1 : 0], metrics[t], threshold);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

std::vector<TemporalContext> phase_assign(const std::vector<SociogramTriple>& history, const PhaseModel& model,
                                          double trend_threshold) {
    std::vector<std::array<NetworkMetrics, 3>> metrics;
    metrics.reserve(history.size());
    for (const auto& g : history) metrics.push_back(triple_metrics(g));
    return temporal_from_metrics(metrics, model, trend_threshold);
}

std::vector<TemporalContext> phase_assign(const std::vector<SociogramTriple>& history, int k, std::uint64_t seed) {
    std::vector<Point> emb;
    for (const auto& g : history) emb.push_back(phase_embedding(g));
    return phase_assign(history, fit_phase_model(emb, k, seed));
}

// ---- bundle

int ContextBundle::seconds() const { return static_cast<int>(std::lround(target.length_s())); }

ContextBundle build_context_bundle(const std::string& group_id, const std::vector<std::string>& participants,
                                   const std::vector<SociogramTriple>& history,
                                   const std::vector<std::vector<TaskEvent>>& events,
                                   const std::vector<IndividualProfile>& profiles, const PhaseModel& phases,
                                   const BundleConfig& cfg) {
    if (history.empty()) throw ContractError("context bundle needs at least one window");
    if (events.size() != history.size()) throw ContractError("context bundle: events and history lengths differ");
    if (phases.k() < 1) throw ContractError("context bundle: phase model not fitted");
    const auto t = history.size() - 1;
    ContextBundle b;
    b.group_id = group_id;
    b.participants = participants;
    b.window = history[t].window;
    b.target = Window{b.window.index + 1, b.window.start_s + cfg.stride_s, b.window.end_s + cfg.stride_s};
    b.individual = profiles;

    std::vector<std::array<NetworkMetrics, 3>> metrics;
    metrics.reserve(history.size());
    for (const auto& g : history) metrics.push_back(triple_metrics(g));
    b.group = metrics[t];
    b.temporal = temporal_from_metrics(metrics, phases, cfg.trend_threshold).back();
    b.embedding = phases.normalize(phase_embedding(b.group));

    const auto h = static_cast<std::size_t>(std::max(1, cfg.history_windows));
    b.pair_history.assign(history.begin() + static_cast<std::ptrdiff_t>(t + 1 - std::min(h, t + 1)), history.end());

    const auto e = static_cast<std::size_t>(std::max(1, cfg.event_windows));
    const auto first = t + 1 - std::min(e, t + 1);
    b.event_first_window = history[first].window.index;
    for (std::size_t w = first; w <= t; ++w) b.events.insert(b.events.end(), events[w].begin(), events[w].end());
    auto key = [](const TaskEvent& x) { return std::tie(x.t, x.participant, x.kind, x.payload); };
    std::sort(b.events.begin(), b.events.end(), [&](const TaskEvent& x, const TaskEvent& y) { return key(x) < key(y); });
    b.events.erase(std::unique(b.events.begin(), b.events.end(),
                               [&](const TaskEvent& x, const TaskEvent& y) { return key(x) == key(y); }),
                   b.events.end());
    return b;
}

ContextBundle build_context_bundle(const SessionTimeline& session, int t,
                                   const std::vector<IndividualProfile>& profiles, const PhaseModel& phases,
                                   const BundleConfig& cfg) {
    if (t < 0 || t >= session.window_count())
        throw ContractError("context bundle: window " + std::to_string(t) + " outside 0.." +
                            std::to_string(session.window_count() - 1));
    std::vector<SociogramTriple> history;
    std::vector<std::vector<TaskEvent>> events;
    for (int w = 0; w <= t; ++w) {
        history.push_back(session.windows[static_cast<std::size_t>(w)].truth);
        events.push_back(session.windows[static_cast<std::size_t>(w)].events);
    }
    BundleConfig c = cfg;
    if (session.window_count() >= 2)
        c.stride_s = session.windows[1].window().start_s - session.windows[0].window().start_s;
    return build_context_bundle(session.group_id, session.participants, history, events, profiles, phases, c);
}

// ---- rendering

namespace {

std::string window_span(const Window& w) {
    return std::to_string(w.index) + " (" + fmt_seconds(w.start_s) + "-" + fmt_seconds(w.end_s) + " s)";
}

std::string arrow(TrendDirection d) {
    switch (d) {
        case TrendDirection::Up: return "\xe2\x86\x91";
        case TrendDirection::Down: return "\xe2\x86\x93";
        case TrendDirection::Flat: return "flat";
    }
    return "flat";
}

std::string render_instructions(const ContextBundle& b) {
    std::string s = "### Task\n";
    s += "Forecast the interaction sociograms of a collaborating group for the next window.\n";
    s += "Group: " + b.group_id + "\n";
    s += "Participants:";
    for (std::size_t i = 0; i < b.participants.size(); ++i) s += (i ? ", " : " ") + b.participants[i];
    s += "\n";
    s += "Context window: " + window_span(b.window) + "\n";
    s += "Predict window: " + window_span(b.target) + ", T = " + std::to_string(b.seconds()) + " seconds\n";
    s += "Modalities: C = conversation (directed, speaker to addressee), P = physical proximity, "
         "S = shared attention (P and S are symmetric).\n";
    s += "Use the context below to decide, for every ordered pair and every second, which modalities are active.\n";
    return s;
}

std::string render_temporal(const TemporalContext& c) {
    std::string s = "### Temporal context\n";
    s += "Phase: " + c.phase_label + " (Cluster " + std::to_string(c.phase_id) + ")\n";
    s += "Duration: " + std::to_string(c.consecutive_windows) + " consecutive windows\n";
    for (const auto& tr : c.trends)
        s += tr.modality + ": " + tr.metric + " " + arrow(tr.direction) + " (" + fmt2(tr.previous) + "\xe2\x86\x92" +
             fmt2(tr.current) + ")\n";
    return s;
}

std::string render_individual(const std::vector<IndividualProfile>& profiles) {
    std::string s = "### Individual profiles\n";
    for (const auto& p : profiles) {
        const auto& f = p.evidence;
        char ev[3][48];
        std::snprintf(ev[0], sizeof ev[0], "%.0f/session", f.speech_segments);
        std::snprintf(ev[1], sizeof ev[1], "%.2f switches/min", f.gaze_switch_rate);
        std::snprintf(ev[2], sizeof ev[2], "%.2f m/s", f.mean_speed);
        s += p.participant.label + ":";
        for (std::size_t d = 0; d < 3; ++d)
            s += std::string(d ? "; " : " ") + std::string(profile_dimension_name(kProfileDimensions[d])) + ": " +
                 p.descriptor[d] + " (Cluster " + std::to_string(p.cluster[d]) + ", " + ev[d] + ")";
        s += "\n";
    }
    return s;
}

std::string render_group(const ContextBundle& b) {
    std::string s = "### Group metrics (window " + std::to_string(b.window.index) + ")\n";
    for (std::size_t m = 0; m < 3; ++m) {
        const auto& g = b.group[m];
        s += std::string(kModalityTitle[m]) + ": density=" + fmt2(g.density) + " reciprocity=" +
             fmt2(g.reciprocity) + " clustering=" + fmt2(g.clustering) + " centrality=";
        for (std::size_t i = 0; i < g.eigenvector_centrality.size(); ++i)
            s += (i ? "," : "") + b.participants[i] + ":" + fmt2(g.eigenvector_centrality[i]);
        s += "\n";
    }
    return s;
}

std::string render_history_window(const SociogramTriple& g, const std::vector<std::string>& labels) {
    std::string s = "Window " + std::to_string(g.window.index) + ":\n";
    for_each_edge(g.n(), true, [&](int i, int j) {
        s += "  " + labels[static_cast<std::size_t>(i)] + "->" + labels[static_cast<std::size_t>(j)] +
             " C=" + fmt2(g.conv.weight(i, j)) + " P=" + fmt2(g.prox.weight(i, j)) + " S=" + fmt2(g.attn.weight(i, j)) +
             "\n";
    });
    return s;
}

std::string render_history(const ContextBundle& b, int dropped) {
    const auto keep = b.pair_history.size() - static_cast<std::size_t>(dropped);
    std::string s = "### Pairwise history (last " + std::to_string(keep) + " windows, fraction of seconds active)\n";
    for (std::size_t k = static_cast<std::size_t>(dropped); k < b.pair_history.size(); ++k)
        s += render_history_window(b.pair_history[k], b.participants);
    return s;
}

std::string render_events(const ContextBundle& b) {
    std::string s = "### Event timeline (windows " + std::to_string(b.event_first_window) + "-" +
                    std::to_string(b.window.index) + ")\n";
    if (b.events.empty()) s += "(no events)\n";
    for (const auto& e : b.events) {
        s += "t=" + fmt_seconds(e.t) + " s " + participant_label(e.participant) + " " +
             std::string(event_kind_name(e.kind));
        if (!e.payload.empty()) s += ": " + e.payload;
        s += "\n";
    }
    return s;
}

std::string render_examples(const std::vector<Demonstration>& examples, std::size_t count) {
    std::string s;
    for (std::size_t k = 0; k < count; ++k) {
        const auto& d = examples[k];
        s += "### Example " + std::to_string(k + 1) + "\n";
        s += d.context_text;
        s += "Answer:\n";
        s += d.answer_text;
    }
    return s;
}

std::string render_format(const ContextBundle& b) {
    std::string s = "### Output format\n";
    s += "Write one block per ordered pair in this order:";
    bool first = true;
    for_each_edge(b.n(), true, [&](int i, int j) {
        s += std::string(first ? " " : ", ") + b.participants[static_cast<std::size_t>(i)] + "->" +
             b.participants[static_cast<std::size_t>(j)];
        first = false;
    });
    s += ".\n";
    s += "Each block starts with \"Pair Pi->Pj:\" followed by one line per second s = 1.." + std::to_string(b.seconds()) +
         ":\n";
    s += "t=s: C=[Y/N], P=[Y/N], S=[Y/N]\n";
    s += "Y marks an active modality and N an inactive one. Write nothing else.\n";
    return s;
}

}  // namespace

std::string render_demonstration_context(const ContextBundle& bundle) {
    std::string s = "Group " + bundle.group_id + ", window " + std::to_string(bundle.window.index) + " -> " +
                    std::to_string(bundle.target.index) + "\n";
    s += "Phase: " + bundle.temporal.phase_label + " (Cluster " + std::to_string(bundle.temporal.phase_id) + ")\n";
    for (std::size_t m = 0; m < 3; ++m)
        s += std::string(kModalityTitle[m]) + ": density=" + fmt2(bundle.group[m].density) + " reciprocity=" +
             fmt2(bundle.group[m].reciprocity) + " clustering=" + fmt2(bundle.group[m].clustering) + "\n";
    s += render_history_window(bundle.pair_history.back(), bundle.participants);
    return s;
}

Demonstration make_demonstration(const ContextBundle& bundle, const BinarySeries& answer) {
    return {bundle.group_id, bundle.window.index, bundle.embedding, render_demonstration_context(bundle),
            render_canonical(answer)};
}

int estimate_tokens(std::string_view text) {
    std::size_t points = 0;
    for (unsigned char c : text) points += (c & 0xC0) != 0x80 ? 1 : 0;
    return static_cast<int>((points + 3) / 4);
}

Prompt render_prompt(const ContextBundle& bundle, const std::vector<Demonstration>& examples, int budget_tokens) {
    if (bundle.pair_history.empty()) throw ContractError("render_prompt: bundle has no history");
    const std::string head = render_instructions(bundle) + "\n" + render_temporal(bundle.temporal) + "\n" +
                             render_individual(bundle.individual) + "\n" + render_group(bundle) + "\n";
    const std::string events = render_events(bundle) + "\n";
    const std::string format = render_format(bundle);

    Prompt p;
    bool with_events = true;
    int dropped = 0;
    std::size_t n_examples = examples.size();
    const int max_drop = static_cast<int>(bundle.pair_history.size()) - 1;
    for (;;) {
        std::string text = head + render_history(bundle, dropped) + "\n";
        if (with_events) text += events;
        if (n_examples > 0) text += render_examples(examples, n_examples) + "\n";
        text += format;
        const int tokens = estimate_tokens(text);
        if (tokens <= budget_tokens) {
            p.text = std::move(text);
            p.token_estimate = tokens;
            break;
        }
        if (with_events) with_events = false;
        else if (dropped < max_drop) ++dropped;
        else if (n_examples > 0) --n_examples;
        else
            throw PromptOverflow("prompt needs " + std::to_string(tokens) + " tokens after all drops; budget " +
                                 std::to_string(budget_tokens));
    }
    p.sections.events = with_events;
    p.sections.history_windows = static_cast<int>(bundle.pair_history.size()) - dropped;
    p.sections.history_windows_dropped = dropped;
    p.sections.examples_dropped = static_cast<int>(examples.size() - n_examples);
    p.few_shot_examples = static_cast<int>(n_examples);
    return p;
}

// ---- read-back

namespace {

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::optional<std::size_t> modality_prefix(std::string_view line, std::string_view& rest) {
    for (std::size_t m = 0; m < 3; ++m) {
        const std::string pre = std::string(kModalityTitle[m]) + ": ";
        if (starts_with(line, pre)) {
            rest = line.substr(pre.size());
            return m;
        }
    }
    return std::nullopt;
}

double field(std::string_view s, std::string_view key) {
    const auto pos = s.find(key);
    if (pos == std::string_view::npos) return 0.0;
    return std::strtod(std::string(s.substr(pos + key.size())).c_str(), nullptr);
}

}  // namespace

PromptDigest read_prompt(std::string_view text) {
    PromptDigest d;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = line;
        if (starts_with(l, "### ")) {
            section = line.substr(4);
            continue;
        }
        if (section == "Task") {
            if (starts_with(l, "Group: ")) d.group_id = line.substr(7);
            else if (starts_with(l, "Participants:")) d.n = static_cast<int>(std::count(l.begin(), l.end(), ',')) + 1;
            else if (starts_with(l, "Context window: ")) d.context_window = std::atoi(line.c_str() + 16);
            else if (starts_with(l, "Predict window: ")) {
                d.predict_window = std::atoi(line.c_str() + 16);
                d.seconds = static_cast<int>(field(l, "T = "));
            }
        } else if (section == "Temporal context") {
            std::string_view rest;
            if (starts_with(l, "Phase: ")) d.phase_id = static_cast<int>(field(l, "(Cluster "));
            else if (starts_with(l, "Duration: ")) d.consecutive_windows = std::atoi(line.c_str() + 10);
            else if (const auto m = modality_prefix(l, rest)) {
                Trend tr;
                tr.modality = std::string(kModalityTitle[*m]);
                tr.metric = std::string(rest.substr(0, rest.find(' ')));
                const auto open = rest.find('(');
                const auto arrow_pos = rest.find("\xe2\x86\x92", open);
                tr.previous = std::strtod(std::string(rest.substr(open + 1)).c_str(), nullptr);
                tr.current = std::strtod(std::string(rest.substr(arrow_pos + 3)).c_str(), nullptr);
                if (rest.find("\xe2\x86\x91") < open) tr.direction = TrendDirection::Up;
                else if (rest.find("\xe2\x86\x93") < open) tr.direction = TrendDirection::Down;
                d.trends.push_back(std::move(tr));
            }
        } else if (starts_with(section, "Group metrics")) {
            std::string_view rest;
            if (const auto m = modality_prefix(l, rest)) {
                d.group[*m] = std::array<double, 3>{field(rest, "density="), field(rest, "reciprocity="),
                                                    field(rest, "clustering=")};
                const auto c = rest.find("centrality=");
                std::string_view list = rest.substr(c + 11);
                while (!list.empty()) {
                    const auto colon = list.find(':');
                    if (colon == std::string_view::npos) break;
                    d.centrality[*m].push_back(std::strtod(std::string(list.substr(colon + 1)).c_str(), nullptr));
                    const auto comma = list.find(',');
                    if (comma == std::string_view::npos) break;
                    list = list.substr(comma + 1);
                }
            }
        } else if (starts_with(section, "Pairwise history")) {
            if (starts_with(l, "Window ")) {
                std::array<std::vector<double>, 3> w;
                for (auto& v : w) v.assign(static_cast<std::size_t>(d.n * d.n), 0.0);
                d.history.emplace_back(std::atoi(line.c_str() + 7), std::move(w));
            } else if (starts_with(l, "  P") && !d.history.empty()) {
                const auto arrow_pos = l.find("->");
                const auto i = participant_index(l.substr(2, arrow_pos - 2));
                const auto sp = l.find(' ', arrow_pos);
                const auto j = participant_index(l.substr(arrow_pos + 2, sp - arrow_pos - 2));
                if (!i || !j || *i >= d.n || *j >= d.n) continue;
                auto& w = d.history.back().second;
                const auto off = static_cast<std::size_t>(*i * d.n + *j);
                w[0][off] = field(l, "C=");
                w[1][off] = field(l, "P=");
                w[2][off] = field(l, "S=");
            }
        }
    }
    return d;
}

}  // namespace groupcast
