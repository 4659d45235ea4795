#include "groupcast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "groupcast/errors.hpp"

namespace groupcast {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view event_kind_name(TaskEventKind k) {
    switch (k) {
        case TaskEventKind::ImageSelected: return "image_selected";
        case TaskEventKind::CategoryAssigned: return "category_assigned";
        case TaskEventKind::Other: return "other";
    }
    return "other";
}

TaskEventKind event_kind_from_name(std::string_view name) {
    if (name == "image_selected") return TaskEventKind::ImageSelected;
    if (name == "category_assigned") return TaskEventKind::CategoryAssigned;
    return TaskEventKind::Other;
}

SessionTimeline SessionTimeline::truncated(int last_window) const {
    SessionTimeline out = *this;
    const auto keep = static_cast<std::size_t>(std::clamp(last_window + 1, 0, window_count()));
    out.windows.resize(keep);
    return out;
}

namespace {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

// ---------------------------------------------------------------- parsing

struct LineReader {
    std::string file;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(file, line, what); }
};

Vec3 read_vec3(const json& j, const char* key, const LineReader& at) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->size() != 3) at.fail(std::string("field '") + key + "' must be a 3-vector");
    Vec3 v{};
    for (std::size_t k = 0; k < 3; ++k) {
        if (!(*it)[k].is_number()) at.fail(std::string("field '") + key + "' must be numeric");
        v[k] = (*it)[k].get<double>();
        if (!std::isfinite(v[k])) at.fail(std::string("field '") + key + "' is not finite");
    }
    return v;
}

double read_number(const json& j, const char* key, const LineReader& at) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) at.fail(std::string("missing numeric field '") + key + "'");
    const double v = it->get<double>();
    if (!std::isfinite(v)) at.fail(std::string("field '") + key + "' is not finite");
    return v;
}

std::string read_string(const json& j, const char* key, const LineReader& at) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) at.fail(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

template <typename F>
void for_each_line(const fs::path& path, F&& handle) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    LineReader at{path.filename().string(), 0};
    std::string text;
    while (std::getline(in, text)) {
        ++at.line;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            at.fail(std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object()) at.fail("expected a JSON object");
        handle(j, at);
    }
}

struct Roster {
    std::vector<std::string> labels;
    bool fixed = false;  // from session.json

    int resolve(const std::string& pid, const LineReader& at) const {
        const auto idx = participant_index(pid);
        if (!idx || *idx >= static_cast<int>(labels.size()) || labels[static_cast<std::size_t>(*idx)] != pid)
            throw SchemaError(at.file + ":" + std::to_string(at.line) + ": unknown participant '" + pid + "'");
        return *idx;
    }
};

Roster roster_from_labels(const std::set<std::string>& seen, const std::string& where) {
    std::vector<int> idx;
    for (const auto& s : seen) {
        const auto i = participant_index(s);
        if (!i) throw SchemaError(where + ": participant label '" + s + "' is not of the form P<k>");
        idx.push_back(*i);
    }
    std::sort(idx.begin(), idx.end());
    Roster r;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] != static_cast<int>(k))
            throw SchemaError(where + ": participant indices are not dense (missing " + participant_label(static_cast<int>(k)) + ")");
        r.labels.push_back(participant_label(idx[k]));
    }
    return r;
}

// Collects pid labels of the sensor streams when there is no session.json.
std::set<std::string> scan_pids(const fs::path& path) {
    std::set<std::string> out;
    if (!fs::exists(path)) return out;
    for_each_line(path, [&](const json& j, const LineReader& at) { out.insert(read_string(j, "pid", at)); });
    return out;
}

void check_order(std::vector<double>& last_t, int p, double t, const LineReader& at) {
    if (t < last_t[static_cast<std::size_t>(p)])
        throw OrderingError(at.file + ":" + std::to_string(at.line) + ": timestamp " + std::to_string(t) +
                            " precedes previous sample of " + participant_label(p));
    last_t[static_cast<std::size_t>(p)] = t;
}

// ------------------------------------------------------- per-second engine

/// Indexes the raw streams so each per-second quantity is a cheap lookup.
class SecondEngine {
public:
    SecondEngine(int n, const std::vector<SpeechSegment>& speech, const std::vector<GazeSample>& gaze,
                 const std::vector<PositionSample>& positions, const IngestConfig& cfg)
        : n_(n), cfg_(cfg), speech_(static_cast<std::size_t>(n)), gaze_(static_cast<std::size_t>(n)),
          pos_(static_cast<std::size_t>(n)) {
        for (const auto& s : speech)
            if (in_range(s.speaker)) speech_[static_cast<std::size_t>(s.speaker)].push_back(s);
        for (const auto& g : gaze)
            if (in_range(g.participant)) gaze_[static_cast<std::size_t>(g.participant)].push_back(&g);
        for (const auto& p : positions)
            if (in_range(p.participant)) pos_[static_cast<std::size_t>(p.participant)].push_back(&p);
        for (auto& v : speech_)
            std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
        for (auto& v : gaze_)
            std::stable_sort(v.begin(), v.end(), [](const auto* a, const auto* b) { return a->t < b->t; });
        for (auto& v : pos_)
            std::stable_sort(v.begin(), v.end(), [](const auto* a, const auto* b) { return a->t < b->t; });
    }

    int n() const { return n_; }

    bool speaking(int i, int k) const {
        const auto& segs = speech_[static_cast<std::size_t>(i)];
        const double lo = k;
        const double hi = k + 1.0;
        auto it = std::partition_point(segs.begin(), segs.end(), [&](const SpeechSegment& s) { return s.end_s <= lo; });
        double covered = 0.0;
        for (; it != segs.end() && it->start_s < hi; ++it)
            covered += std::max(0.0, std::min(hi, it->end_s) - std::max(lo, it->start_s));
        return covered >= cfg_.speech_min_overlap_s;
    }

    struct GazeSecond {
        std::optional<std::string> majority;  // most frequent target (null counts as a value)
        bool labelled = false;                // any sample in the second carries a target
        std::span<const GazeSample* const> samples;
    };

    GazeSecond gaze_second(int i, int k) const {
        const auto& all = gaze_[static_cast<std::size_t>(i)];
        auto first = std::partition_point(all.begin(), all.end(), [&](const GazeSample* g) { return g->t < k; });
        auto last = std::partition_point(first, all.end(), [&](const GazeSample* g) { return g->t < k + 1.0; });
        GazeSecond out;
        if (first == last) return out;
        out.samples = std::span<const GazeSample* const>(&*first, static_cast<std::size_t>(last - first));
        // Majority vote; ties go to the value seen first within the second.
        std::vector<std::pair<std::optional<std::string>, int>> counts;
        for (auto it = first; it != last; ++it) {
            const auto& tgt = (*it)->target;
            if (tgt) out.labelled = true;
            auto c = std::find_if(counts.begin(), counts.end(), [&](const auto& e) { return e.first == tgt; });
            if (c == counts.end()) counts.emplace_back(tgt, 1);
            else ++c->second;
        }
        const auto best = std::max_element(counts.begin(), counts.end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
        out.majority = best->first;
        return out;
    }

    /// Speaking mass of second k attributed from speaker i to each listener.
    void conversation_mass(int k, std::vector<double>& mass) const {
        mass.assign(static_cast<std::size_t>(n_ * n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            if (!speaking(i, k)) continue;
            const auto g = gaze_second(i, k);
            std::optional<int> addressee;
            if (g.majority) {
                const auto j = participant_index(*g.majority);
                if (j && *j != i && *j < n_) addressee = *j;
            }
            if (addressee) {
                mass[static_cast<std::size_t>(i * n_ + *addressee)] += 1.0;
            } else {
                const double share = 1.0 / (n_ - 1);
                for (int j = 0; j < n_; ++j)
                    if (j != i) mass[static_cast<std::size_t>(i * n_ + j)] += share;
            }
        }
    }

    std::optional<Vec3> position_at(int i, double t) const {
        const auto& all = pos_[static_cast<std::size_t>(i)];
        if (all.empty()) return std::nullopt;
        auto hi = std::partition_point(all.begin(), all.end(), [&](const PositionSample* p) { return p->t < t; });
        const double gap = cfg_.position_max_gap_s;
        if (hi == all.end()) {
            const auto* lo = all.back();
            if (t - lo->t <= gap) return lo->position;
            return std::nullopt;
        }
        if ((*hi)->t == t || hi == all.begin()) {
            if ((*hi)->t - t <= gap) return (*hi)->position;
            return std::nullopt;
        }
        const auto* lo = *(hi - 1);
        const auto* up = *hi;
        const double span = up->t - lo->t;
        if (span > gap) return std::nullopt;
        const double a = span > 0.0 ? (t - lo->t) / span : 0.0;
        Vec3 out{};
        for (std::size_t d = 0; d < 3; ++d) out[d] = lo->position[d] + a * (up->position[d] - lo->position[d]);
        return out;
    }

    bool proximate(int i, int j, int k, double threshold_m) const {
        const double t = k + 0.5;
        const auto a = position_at(i, t);
        const auto b = position_at(j, t);
        if (!a || !b) return false;
        return norm(sub(*a, *b)) <= threshold_m;
    }

    bool joint_attention(int i, int j, int k) const {
        const auto gi = gaze_second(i, k);
        const auto gj = gaze_second(j, k);
        if (gi.labelled || gj.labelled) return gi.majority && gj.majority && *gi.majority == *gj.majority;
        return geometric_dwell(gi.samples, gj.samples, k) >= cfg_.attention_dwell_s;
    }

private:
    bool in_range(int p) const { return p >= 0 && p < n_; }

    // Seconds within [k, k+1) during which the two gaze rays converge. Each
    // merged sample time holds both participants' latest ray until the next.
    double geometric_dwell(std::span<const GazeSample* const> a, std::span<const GazeSample* const> b, int k) const {
        if (a.empty() || b.empty()) return 0.0;
        std::vector<double> times;
        for (const auto* g : a) times.push_back(g->t);
        for (const auto* g : b) times.push_back(g->t);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        auto latest = [](std::span<const GazeSample* const> s, double t) {
            const GazeSample* cur = s.front();
            for (const auto* g : s) {
                if (g->t <= t) cur = g;
                else break;
            }
            return cur;
        };
        double dwell = 0.0;
        for (std::size_t m = 0; m < times.size(); ++m) {
            const double from = (m == 0) ? static_cast<double>(k) : times[m];
            const double to = (m + 1 < times.size()) ? times[m + 1] : k + 1.0;
            const auto* ga = latest(a, times[m]);
            const auto* gb = latest(b, times[m]);
            const auto d = ray_closest_distance(ga->origin, ga->direction, gb->origin, gb->direction);
            if (d && *d <= cfg_.attention_ray_distance_m) dwell += to - from;
        }
        return dwell;
    }

    int n_;
    IngestConfig cfg_;
    std::vector<std::vector<SpeechSegment>> speech_;
    std::vector<std::vector<const GazeSample*>> gaze_;
    std::vector<std::vector<const PositionSample*>> pos_;
};

struct WindowSeconds {
    int first = 0;
    int count = 0;
};

WindowSeconds seconds_of(const Window& w) {
    return {static_cast<int>(std::lround(w.start_s)), static_cast<int>(std::lround(w.length_s()))};
}

double clamp_unit(double w) { return std::clamp(w, 0.0, 1.0); }

}  // namespace

std::optional<double> ray_closest_distance(const Vec3& o1, const Vec3& d1, const Vec3& o2, const Vec3& d2) {
    const Vec3 w0 = sub(o1, o2);
    const double a = dot(d1, d1);
    const double b = dot(d1, d2);
    const double c = dot(d2, d2);
    const double d = dot(d1, w0);
    const double e = dot(d2, w0);
    const double denom = a * c - b * b;
    if (denom < 1e-12) return std::nullopt;
    const double s = (b * e - c * d) / denom;
    const double u = (a * e - b * d) / denom;
    if (s < 0.0 || u < 0.0) return std::nullopt;
    Vec3 gap{};
    for (std::size_t k = 0; k < 3; ++k) gap[k] = w0[k] + s * d1[k] - u * d2[k];
    return norm(gap);
}

SessionStreams parse_session(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("session directory not found: " + dir.string());
    for (const char* required : {"gaze.jsonl", "speech.jsonl", "position.jsonl"})
        if (!fs::exists(dir / required)) throw IoError("missing " + std::string(required) + " in " + dir.string());

    SessionStreams out;
    out.group_id = dir.filename().string();
    if (out.group_id.empty()) out.group_id = dir.parent_path().filename().string();

    Roster roster;
    if (fs::exists(dir / "session.json")) {
        std::ifstream in(dir / "session.json");
        json meta;
        try {
            meta = json::parse(in);
            if (meta.contains("group")) out.group_id = meta.at("group").get<std::string>();
            std::set<std::string> labels;
            for (const auto& p : meta.at("participants")) labels.insert(p.get<std::string>());
            roster = roster_from_labels(labels, "session.json");
            roster.fixed = true;
        } catch (const json::exception& e) {
            throw ParseError("session.json", 1, e.what());
        }
    } else {
        auto seen = scan_pids(dir / "gaze.jsonl");
        seen.merge(scan_pids(dir / "position.jsonl"));
        roster = roster_from_labels(seen, dir.string());
    }
    out.participants = roster.labels;
    if (out.n() < 2) throw SchemaError("a session needs at least 2 participants, found " + std::to_string(out.n()));

    double max_t = 0.0;
    std::vector<double> last_t(static_cast<std::size_t>(out.n()), -INFINITY);

    for_each_line(dir / "gaze.jsonl", [&](const json& j, const LineReader& at) {
        GazeSample g;
        g.t = read_number(j, "t", at);
        g.participant = roster.resolve(read_string(j, "pid", at), at);
        g.origin = read_vec3(j, "origin", at);
        g.direction = read_vec3(j, "dir", at);
        if (std::abs(norm(g.direction) - 1.0) > 1e-6)
            at.fail("gaze direction is not a unit vector (norm " + std::to_string(norm(g.direction)) + ")");
        if (const auto it = j.find("target"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) at.fail("field 'target' must be a string or null");
            g.target = it->get<std::string>();
        }
        check_order(last_t, g.participant, g.t, at);
        max_t = std::max(max_t, g.t);
        out.gaze.push_back(std::move(g));
    });

    std::fill(last_t.begin(), last_t.end(), -INFINITY);
    for_each_line(dir / "position.jsonl", [&](const json& j, const LineReader& at) {
        PositionSample p;
        p.t = read_number(j, "t", at);
        p.participant = roster.resolve(read_string(j, "pid", at), at);
        p.position = read_vec3(j, "pos", at);
        check_order(last_t, p.participant, p.t, at);
        max_t = std::max(max_t, p.t);
        out.positions.push_back(p);
    });

    std::vector<std::vector<std::pair<SpeechSegment, std::size_t>>> by_speaker(static_cast<std::size_t>(out.n()));
    for_each_line(dir / "speech.jsonl", [&](const json& j, const LineReader& at) {
        SpeechSegment s;
        s.speaker = roster.resolve(read_string(j, "pid", at), at);
        s.start_s = read_number(j, "start", at);
        s.end_s = read_number(j, "end", at);
        if (!(s.end_s > s.start_s)) at.fail("speech segment must end after it starts");
        max_t = std::max(max_t, s.end_s);
        by_speaker[static_cast<std::size_t>(s.speaker)].emplace_back(s, at.line);
        out.speech.push_back(s);
    });
    for (auto& segs : by_speaker) {
        std::sort(segs.begin(), segs.end(), [](const auto& a, const auto& b) { return a.first.start_s < b.first.start_s; });
        for (std::size_t k = 1; k < segs.size(); ++k)
            if (segs[k].first.start_s < segs[k - 1].first.end_s)
                throw ParseError("speech.jsonl", segs[k].second, "overlaps an earlier segment of the same speaker");
    }

    if (fs::exists(dir / "events.jsonl")) {
        for_each_line(dir / "events.jsonl", [&](const json& j, const LineReader& at) {
            TaskEvent e;
            e.t = read_number(j, "t", at);
            e.participant = roster.resolve(read_string(j, "pid", at), at);
            e.kind = event_kind_from_name(read_string(j, "kind", at));
            if (const auto it = j.find("payload"); it != j.end() && it->is_string()) e.payload = it->get<std::string>();
            max_t = std::max(max_t, e.t);
            out.events.push_back(std::move(e));
        });
        std::stable_sort(out.events.begin(), out.events.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    }

    out.duration_s = max_t;
    return out;
}

void write_session(const SessionStreams& s, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("session.json");
        out << json{{"group", s.group_id}, {"participants", s.participants}}.dump(2) << '\n';
    }
    auto label = [&](int p) { return s.participants.at(static_cast<std::size_t>(p)); };
    {
        auto out = open("gaze.jsonl");
        for (const auto& g : s.gaze) {
            json j = {{"t", g.t}, {"pid", label(g.participant)}, {"origin", g.origin}, {"dir", g.direction}};
            if (g.target) j["target"] = *g.target;
            out << j.dump() << '\n';
        }
    }
    {
        auto out = open("speech.jsonl");
        for (const auto& sp : s.speech)
            out << json{{"pid", label(sp.speaker)}, {"start", sp.start_s}, {"end", sp.end_s}}.dump() << '\n';
    }
    {
        auto out = open("position.jsonl");
        for (const auto& p : s.positions)
            out << json{{"t", p.t}, {"pid", label(p.participant)}, {"pos", p.position}}.dump() << '\n';
    }
    {
        auto out = open("events.jsonl");
        for (const auto& e : s.events)
            out << json{{"t", e.t}, {"pid", label(e.participant)}, {"kind", std::string(event_kind_name(e.kind))}, {"payload", e.payload}}.dump() << '\n';
    }
}

Sociogram build_conversation_sociogram(const Window& w, int n, const std::vector<SpeechSegment>& speech,
                                       const std::vector<GazeSample>& gaze, const IngestConfig& cfg) {
    const SecondEngine engine(n, speech, gaze, {}, cfg);
    const auto [first, T] = seconds_of(w);
    std::vector<double> total(static_cast<std::size_t>(n * n), 0.0);
    std::vector<double> mass;
    for (int k = first; k < first + T; ++k) {
        engine.conversation_mass(k, mass);
        for (std::size_t e = 0; e < total.size(); ++e) total[e] += mass[e];
    }
    Sociogram g(Modality::Conversation, n, w);
    for_each_edge(n, true, [&](int i, int j) { g.set_weight(i, j, clamp_unit(total[static_cast<std::size_t>(i * n + j)] / T)); });
    return g;
}

Sociogram build_proximity_sociogram(const Window& w, int n, const std::vector<PositionSample>& positions,
                                    double threshold_m, const IngestConfig& cfg) {
    if (!(threshold_m > 0.0)) throw ContractError("proximity threshold must be positive");
    const SecondEngine engine(n, {}, {}, positions, cfg);
    const auto [first, T] = seconds_of(w);
    Sociogram g(Modality::Proximity, n, w);
    for_each_edge(n, false, [&](int i, int j) {
        int count = 0;
        for (int k = first; k < first + T; ++k) count += engine.proximate(i, j, k, threshold_m) ? 1 : 0;
        g.set_weight(i, j, static_cast<double>(count) / T);
    });
    return g;
}

Sociogram build_attention_sociogram(const Window& w, int n, const std::vector<GazeSample>& gaze, const IngestConfig& cfg) {
    const SecondEngine engine(n, {}, gaze, {}, cfg);
    const auto [first, T] = seconds_of(w);
    Sociogram g(Modality::SharedAttention, n, w);
    for_each_edge(n, false, [&](int i, int j) {
        int count = 0;
        for (int k = first; k < first + T; ++k) count += engine.joint_attention(i, j, k) ? 1 : 0;
        g.set_weight(i, j, static_cast<double>(count) / T);
    });
    return g;
}

SessionTimeline build_timeline(const SessionStreams& streams, const IngestConfig& cfg) {
    const int n = streams.n();
    if (n < 2) throw SchemaError("a session needs at least 2 participants");
    const auto windows = make_window_index(streams.duration_s, cfg.window_s, cfg.stride_s);
    const SecondEngine engine(n, streams.speech, streams.gaze, streams.positions, cfg);

    // Per-second frames over the whole covered span; windows overlap, so each
    // second is computed once and sliced.
    const int seconds = static_cast<int>(std::lround(windows.back().end_s));
    const auto nn = static_cast<std::size_t>(n * n);
    std::vector<double> conv(static_cast<std::size_t>(seconds) * nn, 0.0);
    std::vector<std::uint8_t> prox(static_cast<std::size_t>(seconds) * nn, 0);
    std::vector<std::uint8_t> attn(static_cast<std::size_t>(seconds) * nn, 0);
    std::vector<double> mass;
    for (int k = 0; k < seconds; ++k) {
        const auto base = static_cast<std::size_t>(k) * nn;
        engine.conversation_mass(k, mass);
        std::copy(mass.begin(), mass.end(), conv.begin() + static_cast<std::ptrdiff_t>(base));
        for_each_edge(n, false, [&](int i, int j) {
            const auto a = static_cast<std::uint8_t>(engine.proximate(i, j, k, cfg.proximity_threshold_m));
            const auto b = static_cast<std::uint8_t>(engine.joint_attention(i, j, k));
            prox[base + static_cast<std::size_t>(i * n + j)] = prox[base + static_cast<std::size_t>(j * n + i)] = a;
            attn[base + static_cast<std::size_t>(i * n + j)] = attn[base + static_cast<std::size_t>(j * n + i)] = b;
        });
    }

    SessionTimeline tl;
    tl.group_id = streams.group_id;
    tl.participants = streams.participants;
    tl.duration_s = streams.duration_s;
    for (const auto& w : windows) {
        const auto [first, T] = seconds_of(w);
        WindowRecord rec{make_empty_triple(n, w), BinarySeries(w, n, T), {}};
        std::vector<double> conv_total(nn, 0.0);
        std::vector<int> prox_count(nn, 0), attn_count(nn, 0);
        for (int s = 0; s < T; ++s) {
            const auto base = static_cast<std::size_t>(first + s) * nn;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const auto e = static_cast<std::size_t>(i * n + j);
                    const double m = conv[base + e];
                    conv_total[e] += m;
                    if (m > 0.0) rec.truth_series.set_raw(Modality::Conversation, i, j, s, true);
                    if (prox[base + e]) {
                        rec.truth_series.set_raw(Modality::Proximity, i, j, s, true);
                        ++prox_count[e];
                    }
                    if (attn[base + e]) {
                        rec.truth_series.set_raw(Modality::SharedAttention, i, j, s, true);
                        ++attn_count[e];
                    }
                }
        }
        for_each_edge(n, true, [&](int i, int j) {
            const auto e = static_cast<std::size_t>(i * n + j);
            rec.truth.conv.set_weight(i, j, clamp_unit(conv_total[e] / T));
        });
        for_each_edge(n, false, [&](int i, int j) {
            const auto e = static_cast<std::size_t>(i * n + j);
            rec.truth.prox.set_weight(i, j, static_cast<double>(prox_count[e]) / T);
            rec.truth.attn.set_weight(i, j, static_cast<double>(attn_count[e]) / T);
        });
        for (const auto& ev : streams.events)
            if (ev.t >= w.start_s && ev.t < w.end_s) rec.events.push_back(ev);
        tl.windows.push_back(std::move(rec));
    }

    // Session-level participant evidence.
    tl.features.assign(static_cast<std::size_t>(n), ParticipantFeatures{});
    for (const auto& s : streams.speech) tl.features[static_cast<std::size_t>(s.speaker)].speech_segments += 1.0;
    const int total_seconds = static_cast<int>(std::floor(streams.duration_s));
    const double minutes = std::max(streams.duration_s, 1.0) / 60.0;
    for (int i = 0; i < n; ++i) {
        std::optional<std::optional<std::string>> prev;
        int switches = 0;
        for (int k = 0; k < total_seconds; ++k) {
            const auto g = engine.gaze_second(i, k);
            if (g.samples.empty()) continue;
            if (prev && *prev != g.majority) ++switches;
            prev = g.majority;
        }
        tl.features[static_cast<std::size_t>(i)].gaze_switch_rate = switches / minutes;
    }
    std::vector<const PositionSample*> last(static_cast<std::size_t>(n), nullptr);
    std::vector<double> path(static_cast<std::size_t>(n), 0.0), first_t(static_cast<std::size_t>(n), 0.0);
    for (const auto& p : streams.positions) {
        auto& prev = last[static_cast<std::size_t>(p.participant)];
        if (prev) path[static_cast<std::size_t>(p.participant)] += norm(sub(p.position, prev->position));
        else first_t[static_cast<std::size_t>(p.participant)] = p.t;
        prev = &p;
    }
    for (int i = 0; i < n; ++i) {
        const auto* l = last[static_cast<std::size_t>(i)];
        const double span = l ? l->t - first_t[static_cast<std::size_t>(i)] : 0.0;
        tl.features[static_cast<std::size_t>(i)].mean_speed = span > 0.0 ? path[static_cast<std::size_t>(i)] / span : 0.0;
    }
    return tl;
}

}  // namespace groupcast
