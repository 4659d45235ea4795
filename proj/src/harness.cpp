#include "groupcast/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include "groupcast/errors.hpp"

namespace groupcast {

namespace fs = std::filesystem;

std::string_view eval_mode_name(EvalMode m) { return m == EvalMode::SingleStep ? "single" : "simulation"; }

ContextModels fit_context_models(const std::vector<const SessionTimeline*>& corpus, int profile_k, int phase_k,
                                 std::uint64_t seed) {
    if (corpus.empty()) throw ContractError("context models need at least one session");
    return {fit_profile_model(corpus, profile_k, mix_seed({seed, 11})),
            fit_phase_model(corpus, phase_k, mix_seed({seed, 12}))};
}

GroupSplit leave_group_out(std::vector<std::string> group_ids, double train_fraction) {
    if (group_ids.empty()) throw ContractError("no groups to split");
    if (!(train_fraction >= 0.0 && train_fraction < 1.0)) throw ContractError("train fraction must lie in [0, 1)");
    std::sort(group_ids.begin(), group_ids.end());
    GroupSplit s;
    if (group_ids.size() == 1) {
        s.eval = group_ids;
        s.warnings.push_back("single group: evaluated without held-out training groups");
        return s;
    }
    auto train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(group_ids.size())));
    train = std::min(train, group_ids.size() - 1);
    s.train.assign(group_ids.begin(), group_ids.begin() + static_cast<std::ptrdiff_t>(train));
    s.eval.assign(group_ids.begin() + static_cast<std::ptrdiff_t>(train), group_ids.end());
    return s;
}

// ---- scoring

WindowResult score_window(const BinarySeries& prediction, const WindowRecord& truth) {
    WindowResult r;
    r.window = truth.window().index;
    const auto confusion = pairwise_confusion(prediction, truth.truth_series);
    r.counts = confusion.counts;
    const auto pred = weighted_from_binary_series(prediction);
    double sum = 0.0;
    for (Modality m : kModalities) {
        const auto mi = modality_index(m);
        r.jaccard[mi] = weighted_jaccard(pred.get(m), truth.truth.get(m));
        sum += r.jaccard[mi].value;
        r.predicted_metrics[mi] = network_metrics(pred.get(m));
        r.truth_metrics[mi] = network_metrics(truth.truth.get(m));
    }
    r.jaccard_avg = sum / 3.0;
    r.prediction = prediction;
    return r;
}

Aggregate aggregate(const std::vector<const WindowResult*>& rows, double valid_threshold) {
    Aggregate a;
    a.windows = static_cast<int>(rows.size());
    std::array<ConfusionCounts, 3> pooled{};
    std::vector<ConfusionSummary> per_window;
    std::array<std::vector<NetworkMetrics>, 3> pred, truth;
    for (const auto* r : rows) {
        if (r->skipped) {
            ++a.skipped;
            continue;
        }
        for (std::size_t m = 0; m < 3; ++m) {
            a.jaccard[m] += r->jaccard[m].value;
            pooled[m] += r->counts[m];
            pred[m].push_back(r->predicted_metrics[m]);
            truth[m].push_back(r->truth_metrics[m]);
        }
        a.jaccard_avg += r->jaccard_avg;
        per_window.push_back(summarize(r->counts));
    }
    const auto used = per_window.size();
    if (used > 0) {
        for (auto& j : a.jaccard) j /= static_cast<double>(used);
        a.jaccard_avg /= static_cast<double>(used);
        a.valid_window_rate = valid_window_rate(per_window, valid_threshold);
    }
    a.confusion = summarize(pooled);
    if (used >= 3) {
        a.property_available = true;
        for (std::size_t m = 0; m < 3; ++m) a.property[m] = property_preservation(pred[m], truth[m]);
    }
    return a;
}

void audit_no_lookahead(const PredictionRequest& req, int t) {
    if (!req.history || req.history->empty()) throw ContractError("audit: request without history");
    for (const auto& g : *req.history)
        if (g.window.index > t) throw ContractError("audit: history holds window " + std::to_string(g.window.index));
    if (req.history->back().window.index != t) throw ContractError("audit: history does not end at window t");
    if (req.target.index != t + 1) throw ContractError("audit: target is not window t+1");
    if (req.bundle) {
        const auto& b = *req.bundle;
        if (b.window.index != t) throw ContractError("audit: bundle window is not t");
        for (const auto& g : b.pair_history)
            if (g.window.index > t) throw ContractError("audit: bundle history beyond t");
        for (const auto& e : b.events)
            if (e.t >= b.window.end_s) throw ContractError("audit: bundle event after window t");
    }
}

namespace {

double stride_of(const SessionTimeline& s, double fallback) {
    if (s.window_count() >= 2) return s.windows[1].window().start_s - s.windows[0].window().start_s;
    return fallback;
}

int seconds_of(const Window& w) { return static_cast<int>(std::lround(w.length_s())); }

fs::path artifact_dir(const RunConfig& cfg, const std::string& group, const std::string& predictor, EvalMode mode,
                      const std::string& leaf) {
    return *cfg.artifacts_dir / "windows" / group / predictor / std::string(eval_mode_name(mode)) / leaf;
}

std::string leaf_name(const char* fmt, int a, int b = 0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

/// Runs the predictor and scores it; PredictorUnavailable becomes a skipped row.
WindowResult predict_and_score(const Predictor& predictor, const PredictionRequest& req, const WindowRecord& truth,
                               int t, const RunConfig& cfg, const std::string& leaf, EvalMode mode) {
    audit_no_lookahead(req, t);
    WindowResult r;
    try {
        auto p = predictor.predict(req);
        r = score_window(p.series, truth);
        r.warnings = std::move(p.warnings);
        r.candidates_scanned = p.selection.candidates_scanned;
        if (p.llm) {
            r.parse = p.llm->diagnostics;
            r.ttft_ms = p.llm->ttft_ms;
            r.total_ms = p.llm->total_ms;
            if (cfg.artifacts_dir)
                write_window_artifacts(artifact_dir(cfg, req.group_id, predictor.name(), mode, leaf), *p.llm);
        }
    } catch (const PredictorUnavailable& e) {
        r = WindowResult{};
        r.window = truth.window().index;
        r.skipped = true;
        r.skip_reason = e.what();
    }
    r.group_id = req.group_id;
    r.predictor = predictor.name();
    r.mode = mode;
    return r;
}

}  // namespace

EvaluationReport run_single_step(const SessionTimeline& session, const Predictor& predictor,
                                 const ContextModels& models, const RunConfig& cfg) {
    if (session.window_count() < 2) throw ContractError("single-step evaluation needs at least 2 windows");
    const auto profiles = profile_participants(session, models.profiles);
    BundleConfig bcfg = cfg.bundle;
    bcfg.stride_s = stride_of(session, bcfg.stride_s);

    EvaluationReport rep;
    rep.predictor = predictor.name();
    rep.mode = EvalMode::SingleStep;
    rep.windows = ordered_parallel_map(
        static_cast<std::size_t>(session.window_count() - 1), cfg.jobs, [&](std::size_t idx) {
            const int t = static_cast<int>(idx);
            std::vector<SociogramTriple> history;
            for (int w = 0; w <= t; ++w) history.push_back(session.windows[static_cast<std::size_t>(w)].truth);
            const auto& truth = session.windows[idx + 1];
            std::optional<ContextBundle> bundle;
            if (predictor.needs_bundle()) bundle = build_context_bundle(session, t, profiles, models.phases, bcfg);
            PredictionRequest req{session.group_id, &history, truth.window(), seconds_of(truth.window()),
                                  bundle ? &*bundle : nullptr};
            auto r = predict_and_score(predictor, req, truth, t, cfg, leaf_name("w%03d", truth.window().index),
                                       EvalMode::SingleStep);
            r.anchor = t;
            r.depth = 1;
            return r;
        });
    std::vector<const WindowResult*> rows;
    for (const auto& r : rep.windows) rows.push_back(&r);
    rep.overall = aggregate(rows, cfg.valid_window_accuracy);
    rep.per_depth = {rep.overall};
    return rep;
}

EvaluationReport run_simulation(const SessionTimeline& session, const Predictor& predictor, int horizon,
                                const ContextModels& models, const RunConfig& cfg) {
    if (horizon < 1) throw ContractError("simulation horizon must be >= 1");
    const int W = session.window_count();
    if (W < horizon + 1)
        throw ContractError("simulation needs at least horizon + 1 = " + std::to_string(horizon + 1) + " windows");
    const auto profiles = profile_participants(session, models.profiles);
    BundleConfig bcfg = cfg.bundle;
    bcfg.stride_s = stride_of(session, bcfg.stride_s);

    const auto anchors = static_cast<std::size_t>(W - horizon);
    auto rollouts = ordered_parallel_map(anchors, cfg.jobs, [&](std::size_t a) {
        const int t0 = static_cast<int>(a);
        std::vector<SociogramTriple> history;
        std::vector<std::vector<TaskEvent>> events;
        for (int w = 0; w <= t0; ++w) {
            history.push_back(session.windows[static_cast<std::size_t>(w)].truth);
            events.push_back(session.windows[static_cast<std::size_t>(w)].events);
        }
        std::vector<WindowResult> out;
        std::string failed;
        for (int d = 1; d <= horizon; ++d) {
            const int t = t0 + d - 1;
            const auto& truth = session.windows[static_cast<std::size_t>(t + 1)];
            WindowResult r;
            if (!failed.empty()) {
                r.window = truth.window().index;
                r.group_id = session.group_id;
                r.predictor = predictor.name();
                r.mode = EvalMode::Simulation;
                r.skipped = true;
                r.skip_reason = "rollout stopped: " + failed;
            } else {
                std::optional<ContextBundle> bundle;
                if (predictor.needs_bundle())
                    bundle = build_context_bundle(session.group_id, session.participants, history, events, profiles,
                                                  models.phases, bcfg);
                PredictionRequest req{session.group_id, &history, truth.window(), seconds_of(truth.window()),
                                      bundle ? &*bundle : nullptr};
                r = predict_and_score(predictor, req, truth, t, cfg, leaf_name("a%03d_d%d", t0, d),
                                      EvalMode::Simulation);
                if (r.skipped) failed = r.skip_reason;
                else {
                    history.push_back(weighted_from_binary_series(r.prediction));
                    events.emplace_back();
                }
            }
            r.anchor = t0;
            r.depth = d;
            out.push_back(std::move(r));
        }
        return out;
    });

    EvaluationReport rep;
    rep.predictor = predictor.name();
    rep.mode = EvalMode::Simulation;
    rep.horizon = horizon;
    for (auto& r : rollouts)
        for (auto& w : r) rep.windows.push_back(std::move(w));
    std::vector<const WindowResult*> all;
    std::vector<std::vector<const WindowResult*>> by_depth(static_cast<std::size_t>(horizon));
    for (const auto& w : rep.windows) {
        all.push_back(&w);
        by_depth[static_cast<std::size_t>(w.depth - 1)].push_back(&w);
    }
    rep.overall = aggregate(all, cfg.valid_window_accuracy);
    for (const auto& rows : by_depth) rep.per_depth.push_back(aggregate(rows, cfg.valid_window_accuracy));

    const auto single = run_single_step(session, predictor, models, cfg);
    rep.single_step_avg = single.overall.jaccard_avg;
    rep.single_step_windows = single.overall.windows - single.overall.skipped;
    if (*rep.single_step_avg > 0.0)
        rep.degradation_pct = (rep.overall.jaccard_avg - *rep.single_step_avg) / *rep.single_step_avg * 100.0;
    return rep;
}

std::vector<Demonstration> build_demonstration_pool(const std::vector<const SessionTimeline*>& sessions,
                                                    const ContextModels& models, const BundleConfig& cfg) {
    std::vector<Demonstration> pool;
    for (const auto* s : sessions) {
        const auto profiles = profile_participants(*s, models.profiles);
        BundleConfig bcfg = cfg;
        bcfg.stride_s = stride_of(*s, cfg.stride_s);
        for (int t = 0; t + 1 < s->window_count(); ++t) {
            const auto bundle = build_context_bundle(*s, t, profiles, models.phases, bcfg);
            pool.push_back(make_demonstration(bundle, s->windows[static_cast<std::size_t>(t + 1)].truth_series));
        }
    }
    return pool;
}

EvaluationReport merge_reports(const std::vector<EvaluationReport>& parts, double valid_threshold) {
    if (parts.empty()) throw ContractError("merge_reports: nothing to merge");
    EvaluationReport out;
    out.predictor = parts.front().predictor;
    out.mode = parts.front().mode;
    out.horizon = parts.front().horizon;
    double single_sum = 0.0;
    int single_n = 0;
    for (const auto& p : parts) {
        if (p.predictor != out.predictor || p.mode != out.mode || p.horizon != out.horizon)
            throw ContractError("merge_reports: mixed predictors or modes");
        out.windows.insert(out.windows.end(), p.windows.begin(), p.windows.end());
        out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
        if (p.single_step_avg) {
            single_sum += *p.single_step_avg * p.single_step_windows;
            single_n += p.single_step_windows;
        }
    }
    std::vector<const WindowResult*> all;
    std::vector<std::vector<const WindowResult*>> by_depth(static_cast<std::size_t>(std::max(1, out.horizon)));
    for (const auto& w : out.windows) {
        all.push_back(&w);
        by_depth[static_cast<std::size_t>(w.depth - 1)].push_back(&w);
    }
    out.overall = aggregate(all, valid_threshold);
    for (const auto& rows : by_depth) out.per_depth.push_back(aggregate(rows, valid_threshold));
    if (out.mode == EvalMode::Simulation && single_n > 0) {
        out.single_step_avg = single_sum / single_n;
        out.single_step_windows = single_n;
        if (*out.single_step_avg > 0.0)
            out.degradation_pct = (out.overall.jaccard_avg - *out.single_step_avg) / *out.single_step_avg * 100.0;
    }
    return out;
}

// ---- selection strategy comparison

std::vector<StrategyRow> compare_selection_strategies(const std::vector<const SessionTimeline*>& eval,
                                                      std::shared_ptr<const std::vector<Demonstration>> pool,
                                                      std::shared_ptr<CompletionClient> client,
                                                      const ContextModels& models, const RunConfig& cfg) {
    static constexpr std::array<std::tuple<SelectionStrategy, double, const char*>, 3> rows = {{
        {SelectionStrategy::Random, 0.579, "O(1)"},
        {SelectionStrategy::PhaseSimilar, 0.582, "O(N log N)"},
        {SelectionStrategy::Diverse, 0.554, "O(N^2)"},
    }};
    if (eval.empty()) throw ContractError("strategy comparison needs evaluation sessions");
    std::vector<StrategyRow> out;
    for (const auto& [strategy, reference, complexity] : rows) {
        PredictorSpec spec = cfg.predictor;
        spec.kind = PredictorKind::Llm;
        spec.paradigm = Paradigm::FewShot;
        spec.selection = strategy;
        PredictorDeps deps;
        deps.client = client;
        deps.pool = pool;
        const auto predictor = make_predictor(spec, deps);
        std::vector<EvaluationReport> parts;
        for (const auto* s : eval) parts.push_back(run_single_step(*s, *predictor, models, cfg));
        const auto merged = merge_reports(parts, cfg.valid_window_accuracy);
        double scans = 0.0;
        int used = 0;
        for (const auto& w : merged.windows)
            if (!w.skipped) {
                scans += static_cast<double>(w.candidates_scanned);
                ++used;
            }
        out.push_back({strategy, merged.overall.jaccard_avg, used ? scans / used : 0.0, reference, complexity});
    }
    return out;
}

std::string render_strategy_table(const std::vector<StrategyRow>& rows) {
    std::string s = "strategy   similarity  scans/query  reference  complexity\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-10s %10.3f  %11.1f  %9.3f  %s\n", std::string(selection_name(r.strategy)).c_str(),
                      r.similarity, r.mean_candidates_scanned, r.reference, r.complexity.c_str());
        s += buf;
    }
    s += "Reference values come from a full-scale study with a fine-tuned language model and the original\n"
         "multimodal dataset; desk-scale runs on synthetic data are not expected to reproduce them.\n";
    return s;
}

// ---- reports

namespace {

std::string f6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json scores_json(const ClassificationScores& s) {
    return {{"accuracy", s.accuracy}, {"precision", s.precision}, {"recall", s.recall},
            {"f1", s.f1},             {"mcc", s.mcc},             {"mcc_undefined", s.mcc_undefined}};
}

nlohmann::json counts_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed: " + p.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

}  // namespace

std::string report_csv_header() {
    std::string h = "group,predictor,mode,depth,anchor,window,skipped";
    for (Modality m : kModalities) h += ",jaccard_" + std::string(modality_name(m));
    h += ",jaccard_avg";
    for (Modality m : kModalities)
        for (const char* c : {"tp", "fp", "tn", "fn"}) h += "," + std::string(modality_name(m)) + "_" + c;
    h += ",accuracy,f1,mcc,parse_strategy,seconds_recovered,fallback_filled,candidates_scanned\n";
    return h;
}

std::string report_csv_row(const WindowResult& r) {
    std::string s = csv_field(r.group_id) + "," + csv_field(r.predictor) + "," + std::string(eval_mode_name(r.mode)) +
                    "," + std::to_string(r.depth) + "," + std::to_string(r.anchor) + "," + std::to_string(r.window) +
                    "," + (r.skipped ? "1" : "0");
    for (const auto& j : r.jaccard) s += "," + f6(j.value);
    s += "," + f6(r.jaccard_avg);
    for (const auto& c : r.counts)
        s += "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.tn) + "," +
             std::to_string(c.fn);
    const auto overall = summarize(r.counts).overall;
    s += "," + f6(overall.accuracy) + "," + f6(overall.f1) + "," + f6(overall.mcc);
    if (r.parse)
        s += "," + std::string(strategy_name(r.parse->strategy_used)) + "," + std::to_string(r.parse->seconds_recovered) +
             "," + std::to_string(r.parse->fallback_filled);
    else
        s += ",,,";
    s += "," + std::to_string(r.candidates_scanned) + "\n";
    return s;
}

nlohmann::json aggregate_json(const Aggregate& a) {
    nlohmann::json j;
    j["windows"] = a.windows;
    j["skipped"] = a.skipped;
    nlohmann::json jac, conf, prop;
    for (Modality m : kModalities) {
        const auto mi = modality_index(m);
        const std::string name(modality_name(m));
        jac[name] = a.jaccard[mi];
        conf[name] = scores_json(a.confusion.per_modality[mi]);
        conf[name]["counts"] = counts_json(a.confusion.counts[mi]);
        if (a.property_available)
            for (StructuralMetric sm : kStructuralMetrics) {
                const auto& c = a.property[mi][static_cast<std::size_t>(sm)];
                prop[name][std::string(structural_metric_name(sm))] = {{"r", c.r}, {"degenerate", c.degenerate}};
            }
    }
    jac["average"] = a.jaccard_avg;
    conf["overall"] = scores_json(a.confusion.overall);
    conf["overall"]["counts"] = counts_json(a.confusion.overall_counts);
    j["weighted_jaccard"] = jac;
    j["confusion"] = conf;
    j["valid_window_rate"] = a.valid_window_rate;
    j["property_preservation"] = a.property_available ? prop : nlohmann::json(nullptr);
    return j;
}

nlohmann::json report_json(const EvaluationReport& r) {
    nlohmann::json j;
    j["predictor"] = r.predictor;
    j["mode"] = std::string(eval_mode_name(r.mode));
    j["horizon"] = r.horizon;
    j["aggregate"] = aggregate_json(r.overall);
    if (r.mode == EvalMode::Simulation) {
        nlohmann::json depths = nlohmann::json::array();
        for (std::size_t d = 0; d < r.per_depth.size(); ++d) {
            auto a = aggregate_json(r.per_depth[d]);
            a["depth"] = d + 1;
            depths.push_back(std::move(a));
        }
        j["per_depth"] = std::move(depths);
        j["single_step_average_similarity"] = r.single_step_avg ? nlohmann::json(*r.single_step_avg) : nullptr;
        j["degradation_pct"] = r.degradation_pct ? nlohmann::json(*r.degradation_pct) : nullptr;
    }
    std::vector<double> ttft, total;
    std::map<std::string, int> strategies;
    for (const auto& w : r.windows) {
        if (w.skipped || !w.parse) continue;
        ttft.push_back(w.ttft_ms);
        total.push_back(w.total_ms);
        ++strategies[std::string(strategy_name(w.parse->strategy_used))];
    }
    if (!ttft.empty()) {
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        j["latency_ms"] = {{"ttft_mean", mean(ttft)}, {"total_mean", mean(total)}, {"level", "transport"}};
        j["parse_strategies"] = strategies;
    }
    j["warnings"] = r.warnings;
    return j;
}

void write_report(const std::vector<EvaluationReport>& reports, const nlohmann::json& config,
                  const nlohmann::json& extra, const fs::path& dir) {
    if (reports.empty()) throw ContractError("write_report: no results");
    ensure_dir(dir);
    std::string csv = report_csv_header();
    for (const auto& r : reports)
        for (const auto& w : r.windows) csv += report_csv_row(w);
    write_text(dir / "report.csv", csv);

    nlohmann::json summary;
    summary["config"] = config;
    summary["results"] = nlohmann::json::array();
    for (const auto& r : reports) summary["results"].push_back(report_json(r));
    for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
    write_text(dir / "summary.json", summary.dump(2) + "\n");
}

void write_window_artifacts(const fs::path& dir, const LlmOutcome& outcome) {
    ensure_dir(dir);
    write_text(dir / "prompt.txt", outcome.prompt.text);
    write_text(dir / "response.txt", outcome.response);
    const auto& d = outcome.diagnostics;
    nlohmann::json j = {{"strategy_used", std::string(strategy_name(d.strategy_used))},
                        {"seconds_recovered", d.seconds_recovered},
                        {"entries_recovered", d.entries_recovered},
                        {"entries_expected", d.entries_expected},
                        {"fallback_filled", d.fallback_filled},
                        {"warnings", d.warnings},
                        {"token_estimate", outcome.prompt.token_estimate},
                        {"few_shot_examples", outcome.prompt.few_shot_examples},
                        {"demonstrations", outcome.demonstrations},
                        {"events_included", outcome.prompt.sections.events},
                        {"history_windows", outcome.prompt.sections.history_windows},
                        {"history_windows_dropped", outcome.prompt.sections.history_windows_dropped},
                        {"examples_dropped", outcome.prompt.sections.examples_dropped}};
    write_text(dir / "diagnostics.json", j.dump(2) + "\n");
}

}  // namespace groupcast
