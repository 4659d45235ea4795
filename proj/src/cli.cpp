#include "groupcast/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "groupcast/context.hpp"
#include "groupcast/errors.hpp"
#include "groupcast/harness.hpp"
#include "groupcast/ingest.hpp"
#include "groupcast/llm_client.hpp"
#include "groupcast/predict.hpp"
#include "groupcast/synth.hpp"

namespace groupcast {

namespace fs = std::filesystem;
using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    CliSettings, command, data, out, groups, participants, duration_s, rho, rates, phase_period, addressing, gaze_hz,
    events_per_minute, window_s, stride_s, proximity_threshold_m, position_max_gap_s, attention_ray_distance_m,
    attention_dwell_s, speech_min_overlap_s, predictors, smoothing_n, smoothing_threshold, paradigm, selection, shots,
    compare_selection, profile_k, phase_k, history_windows, event_windows, trend_threshold, token_budget, mode,
    horizon, valid_window_accuracy, train_fraction, jobs, seed, endpoint, model, timeout_s, max_in_flight,
    max_attempts, max_new_tokens, temperature, mock, mock_noise, mock_error, mock_latency_ms)

json to_json(const CliSettings& s) {
    json j;
    nlohmann::to_json(j, s);
    return j;
}

CliSettings cli_settings_from_json(const json& j) {
    CliSettings s;
    nlohmann::from_json(j, s);
    return s;
}

namespace {

// ---- plumbing

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed: " + p.string());
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

IngestConfig ingest_config(const CliSettings& s) {
    IngestConfig c;
    c.window_s = s.window_s;
    c.stride_s = s.stride_s;
    c.proximity_threshold_m = s.proximity_threshold_m;
    c.position_max_gap_s = s.position_max_gap_s;
    c.attention_ray_distance_m = s.attention_ray_distance_m;
    c.attention_dwell_s = s.attention_dwell_s;
    c.speech_min_overlap_s = s.speech_min_overlap_s;
    return c;
}

BundleConfig bundle_config(const CliSettings& s) {
    BundleConfig b;
    b.history_windows = s.history_windows;
    b.event_windows = s.event_windows;
    b.trend_threshold = s.trend_threshold;
    b.stride_s = s.stride_s;
    return b;
}

LlmOptions llm_options(const CliSettings& s) {
    LlmOptions o;
    o.budget_tokens = s.token_budget;
    o.max_new_tokens = s.max_new_tokens;
    o.temperature = s.temperature;
    return o;
}

PredictorSpec predictor_spec(const CliSettings& s, const std::string& name) {
    PredictorSpec p;
    p.kind = predictor_kind_from_name(name);
    p.smoothing_n = s.smoothing_n;
    p.smoothing_threshold = s.smoothing_threshold;
    p.seed = s.seed;
    p.paradigm = paradigm_from_name(s.paradigm);
    p.k = s.shots;
    p.selection = selection_from_name(s.selection);
    return p;
}

RunConfig run_config(const CliSettings& s, const PredictorSpec& spec, EvalMode mode) {
    RunConfig c;
    c.mode = mode;
    c.horizon = s.horizon;
    c.predictor = spec;
    c.bundle = bundle_config(s);
    c.profile_k = s.profile_k;
    c.phase_k = s.phase_k;
    c.seed = s.seed;
    c.valid_window_accuracy = s.valid_window_accuracy;
    c.train_fraction = s.train_fraction;
    c.jobs = s.jobs;
    if (!s.out.empty()) c.artifacts_dir = fs::path(s.out);
    return c;
}

bool is_session_dir(const fs::path& p) { return fs::is_regular_file(p / "gaze.jsonl"); }

/// A session directory, or a directory whose subdirectories are sessions.
std::vector<fs::path> session_dirs(const fs::path& data) {
    if (data.empty()) throw ContractError("--data is required");
    if (!fs::is_directory(data)) throw IoError("data directory not found: " + data.string());
    if (is_session_dir(data)) return {data};
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(data))
        if (e.is_directory() && is_session_dir(e.path())) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw IoError("no sessions (gaze.jsonl) under " + data.string());
    return dirs;
}

std::vector<SessionTimeline> load_corpus(const CliSettings& s) {
    const auto cfg = ingest_config(s);
    std::vector<SessionTimeline> out;
    for (const auto& d : session_dirs(s.data)) out.push_back(build_timeline(parse_session(d), cfg));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.group_id < b.group_id; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].group_id == out[i - 1].group_id) throw SchemaError("duplicate group id " + out[i].group_id);
    return out;
}

bool uses_llm(const CliSettings& s) {
    return s.compare_selection || std::any_of(s.predictors.begin(), s.predictors.end(), [](const std::string& p) {
               return predictor_kind_from_name(p) == PredictorKind::Llm;
           });
}

/// Everything a predictor may draw on, derived from the training groups only.
struct Prepared {
    std::vector<SessionTimeline> sessions;
    GroupSplit split;
    std::vector<const SessionTimeline*> train;
    std::vector<const SessionTimeline*> eval;
    ContextModels models;
    std::array<double, 3> rates{};
    std::shared_ptr<const std::vector<Demonstration>> pool;
    std::shared_ptr<TruthRegistry> truth = std::make_shared<TruthRegistry>();
    std::vector<std::string> warnings;
};

Prepared prepare(const CliSettings& s, bool need_pool) {
    Prepared p;
    p.sessions = load_corpus(s);
    std::vector<std::string> ids;
    for (const auto& t : p.sessions) ids.push_back(t.group_id);
    p.split = leave_group_out(ids, s.train_fraction);
    p.warnings = p.split.warnings;
    std::map<std::string, const SessionTimeline*> by_id;
    for (const auto& t : p.sessions) by_id[t.group_id] = &t;
    for (const auto& id : p.split.train) p.train.push_back(by_id.at(id));
    for (const auto& id : p.split.eval) p.eval.push_back(by_id.at(id));

    auto fit_on = p.train;
    if (fit_on.empty()) {
        fit_on = p.eval;
        p.warnings.push_back("no training groups: context models and rates are fitted on the evaluated sessions");
    }
    p.models = fit_context_models(fit_on, s.profile_k, s.phase_k, s.seed);
    for (const auto& w : p.models.profiles.warnings) p.warnings.push_back(w);
    p.rates = empirical_rates(fit_on);
    if (need_pool) {
        if (p.train.empty()) throw ContractError("few-shot prompting needs at least one training group");
        p.pool = std::make_shared<const std::vector<Demonstration>>(
            build_demonstration_pool(p.train, p.models, bundle_config(s)));
    }
    for (const auto& t : p.sessions)
        for (const auto& w : t.windows) p.truth->add(t.group_id, w.window().index, w.truth_series);
    return p;
}

std::shared_ptr<CompletionClient> make_client(const CliSettings& s, const Prepared& p) {
    MockOptions mo;
    mo.flip_probability = s.mock_noise;
    mo.error_probability = s.mock_error;
    mo.latency_ms = s.mock_latency_ms;
    mo.seed = s.seed;
    const auto& m = s.mock;
    if (m.empty()) {
        EndpointConfig e;
        e.base_url = s.endpoint;
        e.model = s.model;
        e.timeout_s = s.timeout_s;
        e.max_in_flight = s.max_in_flight;
        e.max_attempts = s.max_attempts;
        e.seed = s.seed;
        return std::make_shared<HttpCompletionClient>(e);
    }
    if (m == "echo") return MockCompletionClient::echo_truth(p.truth, mo);
    if (m == "context") return MockCompletionClient::context_echo(mo);
    if (m == "example") return MockCompletionClient::example_echo(mo);
    if (m.rfind("fixed:", 0) == 0) return MockCompletionClient::fixed(slurp(m.substr(6)), mo);
    if (m.rfind("replay:", 0) == 0)
        return MockCompletionClient::replay(std::make_shared<ReplayStore>(ReplayStore::load_run_dir(m.substr(7))),
                                            mo);
    throw ContractError("unknown mock '" + m + "' (echo|context|example|fixed:FILE|replay:DIR)");
}

PredictorDeps predictor_deps(const CliSettings& s, const Prepared& p, std::shared_ptr<CompletionClient> client) {
    PredictorDeps d;
    d.rates = p.rates;
    d.client = std::move(client);
    d.pool = p.pool;
    d.llm = llm_options(s);
    return d;
}

void check_common(const CliSettings& s) {
    if (s.jobs < 1) throw ContractError("--jobs must be >= 1");
    if (s.horizon < 1) throw ContractError("--horizon must be >= 1");
    if (s.predictors.empty()) throw ContractError("--predictor needs at least one name");
    for (const auto& p : s.predictors) predictor_kind_from_name(p);
    paradigm_from_name(s.paradigm);
    selection_from_name(s.selection);
    if (s.mode != "single" && s.mode != "simulation") throw ContractError("--mode must be single or simulation");
}

json data_note(const CliSettings& s) {
    const fs::path marker = fs::path(s.data) / "synthetic.json";
    if (!fs::exists(marker)) return json{{"source", "recorded sessions"}, {"path", s.data}};
    return json{{"source", "synthetic corpus standing in for the recorded multimodal sessions"},
                {"path", s.data},
                {"generator", json::parse(slurp(marker), nullptr, false)}};
}

void write_config(const CliSettings& s) { write_text(fs::path(s.out) / "config.json", to_json(s).dump(2) + "\n"); }

// ---- subcommands

int cmd_gen_synth(const CliSettings& s, std::ostream& out) {
    if (s.out.empty()) throw ContractError("--out is required");
    if (s.rates.size() != 3) throw ContractError("--rates takes three values (conversation proximity attention)");
    SynthParams p;
    p.n_participants = s.participants;
    p.duration_s = s.duration_s;
    p.rho = s.rho;
    p.rates = {s.rates[0], s.rates[1], s.rates[2]};
    p.phase_period_windows = s.phase_period;
    p.seed = s.seed;
    p.addressing = addressing_from_name(s.addressing);
    p.gaze_hz = s.gaze_hz;
    p.window_s = s.window_s;
    p.stride_s = s.stride_s;
    p.events_per_minute = s.events_per_minute;
    const auto corpus = generate_synthetic_corpus(p, s.groups);
    for (const auto& g : corpus) {
        const auto dir = fs::path(s.out) / g.streams.group_id;
        write_session(g.streams, dir);
        out << g.streams.group_id << ": " << g.timeline.window_count() << " windows -> " << dir.string() << "\n";
    }
    json marker = to_json(s);
    for (const char* k : {"command", "data", "out"}) marker.erase(k);
    write_text(fs::path(s.out) / "synthetic.json", marker.dump(2) + "\n");
    return kExitOk;
}

json triple_json(const SociogramTriple& t) {
    json j;
    j["window"] = to_json(t.window);
    for (Modality m : kModalities) j[std::string(modality_name(m))] = to_json(t.get(m));
    return j;
}

int cmd_ingest(const CliSettings& s, std::ostream& out) {
    if (s.out.empty()) throw ContractError("--out is required");
    for (const auto& t : load_corpus(s)) {
        json j;
        j["group"] = t.group_id;
        j["participants"] = t.participants;
        j["duration_s"] = t.duration_s;
        j["features"] = json::array();
        for (const auto& f : t.features)
            j["features"].push_back(
                {{"speech_segments", f.speech_segments}, {"gaze_switch_rate", f.gaze_switch_rate},
                 {"mean_speed", f.mean_speed}});
        j["windows"] = json::array();
        for (const auto& w : t.windows) {
            auto wj = triple_json(w.truth);
            wj["series"] = to_json(w.truth_series);
            wj["events"] = json::array();
            for (const auto& e : w.events)
                wj["events"].push_back({{"t", e.t},
                                        {"participant", t.participants[static_cast<std::size_t>(e.participant)]},
                                        {"kind", event_kind_name(e.kind)},
                                        {"payload", e.payload}});
            j["windows"].push_back(std::move(wj));
        }
        const auto path = fs::path(s.out) / (t.group_id + ".timeline.json");
        write_text(path, j.dump(1) + "\n");
        out << t.group_id << ": " << t.window_count() << " windows, " << t.n() << " participants -> "
            << path.string() << "\n";
    }
    return kExitOk;
}

int cmd_encode(const CliSettings& s, std::ostream& out) {
    if (s.out.empty()) throw ContractError("--out is required");
    const auto paradigm = paradigm_from_name(s.paradigm);
    const auto strategy = selection_from_name(s.selection);
    const auto p = prepare(s, paradigm == Paradigm::FewShot);
    const auto bcfg = bundle_config(s);
    int written = 0, max_tokens = 0;
    for (const auto& t : p.sessions) {
        if (t.window_count() < 2) continue;
        const auto profiles = profile_participants(t, p.models.profiles);
        for (int w = 0; w + 1 < t.window_count(); ++w) {
            const auto bundle = build_context_bundle(t, w, profiles, p.models.phases, bcfg);
            std::vector<Demonstration> shots;
            if (paradigm == Paradigm::FewShot)
                for (auto i : select_few_shot(*p.pool, t.group_id, bundle.embedding, strategy, s.shots, s.seed,
                                              static_cast<std::uint64_t>(w)))
                    shots.push_back((*p.pool)[i]);
            const auto prompt = render_prompt(bundle, shots, s.token_budget);
            char leaf[32];
            std::snprintf(leaf, sizeof leaf, "w%03d.txt", w + 1);
            write_text(fs::path(s.out) / "prompts" / t.group_id / leaf, prompt.text);
            max_tokens = std::max(max_tokens, prompt.token_estimate);
            ++written;
        }
    }
    write_config(s);
    out << "wrote " << written << " prompts (max " << max_tokens << " estimated tokens, budget " << s.token_budget
        << ") under " << (fs::path(s.out) / "prompts").string() << "\n";
    for (const auto& w : p.warnings) out << "warning: " << w << "\n";
    return kExitOk;
}

int cmd_predict(const CliSettings& s, std::ostream& out) {
    if (s.out.empty()) throw ContractError("--out is required");
    check_common(s);
    const bool few = paradigm_from_name(s.paradigm) == Paradigm::FewShot;
    const auto p = prepare(s, uses_llm(s) && few);
    const auto client = uses_llm(s) ? make_client(s, p) : nullptr;
    write_config(s);
    for (const auto& name : s.predictors) {
        const auto spec = predictor_spec(s, name);
        const auto predictor = make_predictor(spec, predictor_deps(s, p, client));
        const auto cfg = run_config(s, spec, EvalMode::SingleStep);
        int count = 0, skipped = 0;
        for (const auto* t : p.eval) {
            const auto rep = run_single_step(*t, *predictor, p.models, cfg);
            for (const auto& w : rep.windows) {
                if (w.skipped) {
                    ++skipped;
                    continue;
                }
                char leaf[32];
                std::snprintf(leaf, sizeof leaf, "w%03d.json", w.window);
                json j = {{"group", w.group_id}, {"predictor", w.predictor}, {"window", w.window},
                          {"series", to_json(w.prediction)}};
                write_text(fs::path(s.out) / "predictions" / w.group_id / w.predictor / leaf, j.dump() + "\n");
                ++count;
            }
        }
        out << predictor->name() << ": " << count << " windows predicted";
        if (skipped) out << ", " << skipped << " skipped";
        out << "\n";
        if (count == 0 && skipped > 0) throw PredictorUnavailable(predictor->name() + ": every window skipped");
    }
    for (const auto& w : p.warnings) out << "warning: " << w << "\n";
    return kExitOk;
}

std::string summary_line(const EvaluationReport& r) {
    const auto& a = r.overall;
    std::string line = r.predictor + " [" + std::string(eval_mode_name(r.mode)) + "] similarity=" +
                       fmt("%.4f", a.jaccard_avg) + " (conv " + fmt("%.4f", a.jaccard[0]) + ", prox " +
                       fmt("%.4f", a.jaccard[1]) + ", attn " + fmt("%.4f", a.jaccard[2]) + ") conv F1=" +
                       fmt("%.4f", a.confusion.per_modality[0].f1) + " MCC=" +
                       fmt("%.4f", a.confusion.per_modality[0].mcc) + " valid=" + fmt("%.3f", a.valid_window_rate) +
                       " windows=" + std::to_string(a.windows);
    if (a.skipped) line += " skipped=" + std::to_string(a.skipped);
    if (r.degradation_pct) line += " degradation=" + fmt("%+.2f%%", *r.degradation_pct);
    return line;
}

int cmd_evaluate(const CliSettings& s, std::ostream& out) {
    if (s.out.empty()) throw ContractError("--out is required");
    check_common(s);
    const bool few = paradigm_from_name(s.paradigm) == Paradigm::FewShot;
    const bool llm = uses_llm(s);
    const auto p = prepare(s, llm && (few || s.compare_selection));
    const auto client = llm ? make_client(s, p) : nullptr;
    const auto mode = s.mode == "simulation" ? EvalMode::Simulation : EvalMode::SingleStep;
    write_config(s);

    std::vector<EvaluationReport> reports;
    for (const auto& name : s.predictors) {
        const auto spec = predictor_spec(s, name);
        const auto predictor = make_predictor(spec, predictor_deps(s, p, client));
        const auto cfg = run_config(s, spec, mode);
        std::vector<EvaluationReport> parts;
        for (const auto* t : p.eval)
            parts.push_back(mode == EvalMode::Simulation ? run_simulation(*t, *predictor, s.horizon, p.models, cfg)
                                                         : run_single_step(*t, *predictor, p.models, cfg));
        reports.push_back(merge_reports(parts, s.valid_window_accuracy));
        out << summary_line(reports.back()) << "\n";
    }

    json extra;
    extra["split"] = {{"train", p.split.train}, {"eval", p.split.eval}};
    extra["data"] = data_note(s);
    extra["warnings"] = p.warnings;
    if (s.compare_selection) {
        auto spec = predictor_spec(s, "llm");
        const auto rows =
            compare_selection_strategies(p.eval, p.pool, client, p.models, run_config(s, spec, EvalMode::SingleStep));
        const auto table = render_strategy_table(rows);
        write_text(fs::path(s.out) / "strategy_comparison.txt", table);
        json jr = json::array();
        for (const auto& r : rows)
            jr.push_back({{"strategy", selection_name(r.strategy)},
                          {"similarity", r.similarity},
                          {"mean_candidates_scanned", r.mean_candidates_scanned},
                          {"reference", r.reference},
                          {"complexity", r.complexity}});
        extra["selection_comparison"] = jr;
        out << table;
    }
    write_report(reports, to_json(s), extra, s.out);
    for (const auto& w : p.warnings) out << "warning: " << w << "\n";
    out << "report: " << (fs::path(s.out) / "report.csv").string() << "\n";
    for (const auto& r : reports)
        if (r.overall.windows > 0 && r.overall.skipped == r.overall.windows) {
            const auto& first = std::find_if(r.windows.begin(), r.windows.end(), [](const auto& w) { return w.skipped; });
            throw PredictorUnavailable(r.predictor + ": every window skipped; first failure: " + first->skip_reason);
        }
    return kExitOk;
}

int cmd_report(const CliSettings& s, std::ostream& out) {
    const fs::path run = s.out.empty() ? fs::path(s.data) : fs::path(s.out);
    if (run.empty()) throw ContractError("--run is required");
    const auto summary = json::parse(slurp(run / "summary.json"), nullptr, false);
    if (summary.is_discarded() || !summary.contains("results"))
        throw SchemaError("malformed summary.json in " + run.string());
    out << "predictor                         mode        similarity  conv    prox    attn    F1(conv) MCC(conv) "
           "valid  degradation\n";
    for (const auto& r : summary["results"]) {
        const auto& o = r.at("aggregate");
        const auto& sim = o.at("weighted_jaccard");
        const auto& conv = o.at("confusion").at("conversation");
        char line[256];
        std::snprintf(line, sizeof line, "%-33s %-11s %-11.4f %-7.4f %-7.4f %-7.4f %-8.4f %-9.4f %-6.3f ",
                      r.at("predictor").get<std::string>().c_str(), r.at("mode").get<std::string>().c_str(),
                      sim.at("average").get<double>(), sim.at("conversation").get<double>(),
                      sim.at("proximity").get<double>(), sim.at("shared_attention").get<double>(),
                      conv.at("f1").get<double>(), conv.at("mcc").get<double>(),
                      o.at("valid_window_rate").get<double>());
        out << line;
        if (r.contains("degradation_pct") && r["degradation_pct"].is_number())
            out << fmt("%+.2f%%", r["degradation_pct"].get<double>());
        else
            out << "-";
        out << "\n";
        if (r.contains("per_depth") && r["per_depth"].size() > 1) {
            out << "    by depth:";
            int d = 1;
            for (const auto& a : r["per_depth"]) out << " d" << d++ << "=" << fmt("%.4f", a.at("weighted_jaccard").at("average").get<double>());
            out << "\n";
        }
    }
    if (fs::exists(run / "strategy_comparison.txt")) out << "\n" << slurp(run / "strategy_comparison.txt");
    return kExitOk;
}

int dispatch(CliSettings s, std::ostream& out) {
    if (s.command == "gen-synth") return cmd_gen_synth(s, out);
    if (s.command == "ingest") return cmd_ingest(s, out);
    if (s.command == "encode") return cmd_encode(s, out);
    if (s.command == "predict") return cmd_predict(s, out);
    if (s.command == "evaluate") return cmd_evaluate(s, out);
    if (s.command == "simulate") {
        s.mode = "simulation";
        return cmd_evaluate(s, out);
    }
    if (s.command == "report") return cmd_report(s, out);
    throw ContractError("unknown command '" + s.command + "'");
}

// ---- option wiring

void add_ingest_options(CLI::App& c, CliSettings& s) {
    c.add_option("--window", s.window_s, "Window length T in seconds")->group("Ingest");
    c.add_option("--stride", s.stride_s, "Window stride in seconds")->group("Ingest");
    c.add_option("--proximity-threshold", s.proximity_threshold_m, "Proximity distance threshold in metres (1.5 ft)")
        ->group("Ingest");
    c.add_option("--position-max-gap", s.position_max_gap_s, "Longest position gap bridged, in seconds")
        ->group("Ingest");
    c.add_option("--attention-ray-distance", s.attention_ray_distance_m,
                 "Gaze-ray closest-approach limit for unlabelled joint attention, in metres")
        ->group("Ingest");
    c.add_option("--attention-dwell", s.attention_dwell_s, "Joint-attention dwell per second, in seconds")
        ->group("Ingest");
    c.add_option("--speech-min-overlap", s.speech_min_overlap_s, "Speech coverage that makes a second active")
        ->group("Ingest");
}

void add_context_options(CLI::App& c, CliSettings& s) {
    c.add_option("--profile-k", s.profile_k, "Clusters per individual profile dimension")->group("Context");
    c.add_option("--phase-k", s.phase_k, "Temporal phase clusters")->group("Context");
    c.add_option("--history-windows", s.history_windows, "Pairwise history windows in the prompt")->group("Context");
    c.add_option("--event-windows", s.event_windows, "Windows of task events in the prompt")->group("Context");
    c.add_option("--trend-threshold", s.trend_threshold, "Metric change below which a trend is flat")
        ->group("Context");
    c.add_option("--token-budget", s.token_budget, "Prompt token budget")->group("Context");
}

void add_predictor_options(CLI::App& c, CliSettings& s) {
    c.add_option("--predictor,--backend", s.predictors,
                 "Predictors: persistence, smoothing, stratified-random, markov, llm (comma separated)")
        ->delimiter(',')
        ->group("Predictor");
    c.add_option("--smoothing-n", s.smoothing_n, "Windows averaged by the smoothing baseline")->group("Predictor");
    c.add_option("--smoothing-threshold", s.smoothing_threshold, "Mean weight above which smoothing predicts active")
        ->group("Predictor");
    c.add_option("--paradigm", s.paradigm, "LLM prompting: zeroshot or fewshot")->group("Predictor");
    c.add_option("--selection", s.selection, "Few-shot selection: random, similar or diverse")->group("Predictor");
    c.add_option("--shots", s.shots, "Few-shot demonstrations per prompt")->group("Predictor");
}

void add_backend_options(CLI::App& c, CliSettings& s) {
    c.add_option("--endpoint", s.endpoint, "Completion endpoint base URL (key from $GROUPCAST_API_KEY)")
        ->group("Backend");
    c.add_option("--model", s.model, "Model name sent to the endpoint")->group("Backend");
    c.add_option("--timeout", s.timeout_s, "Request timeout in seconds")->group("Backend");
    c.add_option("--max-in-flight", s.max_in_flight, "Concurrent requests")->group("Backend");
    c.add_option("--max-attempts", s.max_attempts, "Attempts per request (connection errors, 429, 5xx)")
        ->group("Backend");
    c.add_option("--max-new-tokens", s.max_new_tokens, "Generation limit")->group("Backend");
    c.add_option("--temperature", s.temperature, "Sampling temperature")->group("Backend");
    c.add_option("--mock", s.mock, "Offline backend: echo, context, example, fixed:FILE or replay:DIR")
        ->group("Backend");
    c.add_option("--mock-noise", s.mock_noise, "Mock Y/N flip probability")->group("Backend");
    c.add_option("--mock-error", s.mock_error, "Mock transport error probability")->group("Backend");
    c.add_option("--mock-latency", s.mock_latency_ms, "Mock latency in milliseconds")->group("Backend");
}

void add_eval_options(CLI::App& c, CliSettings& s, bool with_mode) {
    if (with_mode) c.add_option("--mode", s.mode, "single or simulation")->group("Evaluation");
    c.add_option("--horizon", s.horizon, "Simulation rollout depth")->group("Evaluation");
    c.add_option("--valid-accuracy", s.valid_window_accuracy, "Per-window accuracy counted as valid")
        ->group("Evaluation");
    c.add_option("--train-fraction", s.train_fraction, "Share of groups (sorted ids) used for training")
        ->group("Evaluation");
    c.add_option("--jobs", s.jobs, "Parallel windows; 1 keeps runs bit-reproducible")->group("Evaluation");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliSettings s;
    CLI::App app{"Group interaction forecasting from multimodal sociograms", "groupcast"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "Read options from a TOML/INI file; flags override it");
    app.require_subcommand(0, 1);
    std::string replay, replay_out;
    app.add_option("--replay", replay, "Repeat the run described by a config.json")->check(CLI::ExistingFile);
    app.add_option("--replay-out", replay_out, "Output directory of the repeated run (default <out>-replay)");

    auto* gen = app.add_subcommand("gen-synth", "Write a synthetic corpus of session directories");
    gen->add_option("--out", s.out, "Output directory")->required();
    gen->add_option("--groups", s.groups, "Number of groups");
    gen->add_option("--participants", s.participants, "Participants per group");
    gen->add_option("--duration", s.duration_s, "Session length in seconds");
    gen->add_option("--rho", s.rho, "Lag-1 autocorrelation of every latent chain");
    gen->add_option("--rates", s.rates, "Stationary rates: conversation proximity attention")->expected(3);
    gen->add_option("--phase-period", s.phase_period, "Windows between pairing redraws");
    gen->add_option("--addressing", s.addressing, "group or directed");
    gen->add_option("--gaze-hz", s.gaze_hz, "Gaze sampling rate");
    gen->add_option("--events-per-minute", s.events_per_minute, "Task event rate");
    gen->add_option("--window", s.window_s, "Window length T in seconds");
    gen->add_option("--stride", s.stride_s, "Window stride in seconds");
    gen->add_option("--seed", s.seed, "Corpus seed");

    auto* ing = app.add_subcommand("ingest", "Build per-window sociograms from session directories");
    ing->add_option("--data", s.data, "Session directory or corpus directory")->required();
    ing->add_option("--out", s.out, "Output directory")->required();
    add_ingest_options(*ing, s);

    auto* enc = app.add_subcommand("encode", "Write the prompt of every window");
    enc->add_option("--data", s.data, "Session directory or corpus directory")->required();
    enc->add_option("--out", s.out, "Output directory")->required();
    enc->add_option("--paradigm", s.paradigm, "zeroshot or fewshot");
    enc->add_option("--selection", s.selection, "Few-shot selection: random, similar or diverse");
    enc->add_option("--shots", s.shots, "Few-shot demonstrations per prompt");
    enc->add_option("--train-fraction", s.train_fraction, "Share of groups (sorted ids) used for training");
    enc->add_option("--seed", s.seed, "Seed for clustering and selection");
    add_ingest_options(*enc, s);
    add_context_options(*enc, s);

    auto* pred = app.add_subcommand("predict", "Single-step predictions with per-window artifacts");
    auto* eval = app.add_subcommand("evaluate", "Score predictors and write report.csv and summary.json");
    auto* sim = app.add_subcommand("simulate", "Autoregressive rollouts (evaluate --mode simulation)");
    for (auto* c : {pred, eval, sim}) {
        c->add_option("--data", s.data, "Session directory or corpus directory")->required();
        c->add_option("--out", s.out, "Run directory")->required();
        c->add_option("--seed", s.seed, "Seed for clustering, selection, random baselines and mocks");
        add_predictor_options(*c, s);
        add_backend_options(*c, s);
        add_eval_options(*c, s, c == eval);
        add_context_options(*c, s);
        add_ingest_options(*c, s);
    }
    eval->add_flag("--compare-selection", s.compare_selection,
                   "Also compare the three few-shot selection strategies");

    auto* rep = app.add_subcommand("report", "Print the summary of a run directory");
    rep->add_option("--run", s.out, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!replay.empty()) {
            const auto j = json::parse(slurp(replay), nullptr, false);
            if (j.is_discarded() || !j.is_object()) throw SchemaError("malformed config: " + replay);
            s = cli_settings_from_json(j);
            const std::string original = s.out;
            s.out = replay_out.empty() ? original + "-replay" : replay_out;
            // A live endpoint is not re-queried: its recorded answers are served instead.
            if (s.mock.empty() && uses_llm(s)) s.mock = "replay:" + original;
        } else {
            const auto subs = app.get_subcommands();
            if (subs.empty()) {
                out << app.help();
                return kExitUsage;
            }
            s.command = subs.front()->get_name();
        }
        return dispatch(s, out);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TransportError& e) {
        err << "endpoint error: " << e.what() << "\n";
        return kExitEndpoint;
    } catch (const EndpointError& e) {
        err << "endpoint error: " << e.what() << "\n";
        return kExitEndpoint;
    } catch (const PredictorUnavailable& e) {
        err << "endpoint error: " << e.what() << "\n";
        return kExitEndpoint;
    } catch (const Error& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"groupcast"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace groupcast
