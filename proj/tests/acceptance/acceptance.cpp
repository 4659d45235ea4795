// Acceptance checks AC1-AC10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

// Eigen first: <resolv.h>, pulled in by httplib, defines a `_res` macro that
// collides with Eigen parameter names.
#include "eigen_oracle.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "groupcast/errors.hpp"
#include "groupcast/harness.hpp"
#include "groupcast/response.hpp"
#include "groupcast/synth.hpp"
#include "helpers.hpp"

using namespace groupcast;
namespace gt = groupcast::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED " + what;
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string num(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::shared_ptr<Predictor> baseline(PredictorKind k, std::array<double, 3> rates = {0.5, 0.5, 0.5}) {
    PredictorSpec spec;
    spec.kind = k;
    PredictorDeps deps;
    deps.rates = rates;
    return make_predictor(spec, deps);
}

std::shared_ptr<Predictor> llm_with(std::shared_ptr<CompletionClient> client) {
    PredictorSpec spec;
    spec.kind = PredictorKind::Llm;
    PredictorDeps deps;
    deps.client = std::move(client);
    return make_predictor(spec, deps);
}

ContextModels models_for(const std::vector<const SessionTimeline*>& sessions) {
    return fit_context_models(sessions, 3, 4, 42);
}

SynthParams directed_params(std::uint64_t seed, double duration) {
    auto p = gt::small_params(seed, duration);
    p.gaze_hz = 4;
    return p;
}

// ---------------------------------------------------------------- AC1

double brute_jaccard(const Sociogram& a, const Sociogram& b) {
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < a.n(); ++i)
        for (int j = 0; j < a.n(); ++j) {
            if (i == j || (!a.directed() && j < i)) continue;
            lo += std::min(a.weight(i, j), b.weight(i, j));
            hi += std::max(a.weight(i, j), b.weight(i, j));
        }
    return hi == 0.0 ? 1.0 : lo / hi;
}

Sociogram from_mask(Modality m, int n, std::uint32_t mask) {
    Sociogram g(m, n, {});
    int bit = 0;
    for_each_edge(n, is_directed(m), [&](int i, int j) {
        if (mask & (1u << bit)) g.set_weight(i, j, 1.0);
        ++bit;
    });
    return g;
}

Outcome ac1() {
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(1001);
    double worst_j = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto m = kModalities[uniform_below(rng, 3)];
        const int n = 2 + static_cast<int>(uniform_below(rng, 5));
        const auto a = gt::random_sociogram(rng, m, n);
        const auto b = gt::random_sociogram(rng, m, n);
        worst_j = std::max(worst_j, std::abs(weighted_jaccard(a, b).value - brute_jaccard(a, b)));
    }
    o.require(worst_j <= 1e-12, "jaccard error " + sci(worst_j));

    double worst_c = 0.0;
    long graphs = 0;
    auto check = [&](const Sociogram& g) {
        worst_c = std::max(worst_c, gt::check_against_eigensolver(g).error);
        ++graphs;
    };
    // Every binary undirected graph with n <= 5 and every binary directed graph
    // with n <= 4; directed n = 5 (2^20 graphs) and weighted graphs are sampled.
    for (int n = 2; n <= 5; ++n)
        for (std::uint32_t mask = 1; mask < (1u << edge_count(n, false)); ++mask)
            check(from_mask(Modality::Proximity, n, mask));
    for (int n = 2; n <= 4; ++n)
        for (std::uint32_t mask = 1; mask < (1u << edge_count(n, true)); ++mask)
            check(from_mask(Modality::Conversation, n, mask));
    for (int k = 0; k < 60000; ++k) {
        const auto mask = static_cast<std::uint32_t>(1 + uniform_below(rng, (1u << 20) - 1));
        check(from_mask(Modality::Conversation, 5, mask));
    }
    for (int k = 0; k < 20000; ++k) {
        const auto m = kModalities[uniform_below(rng, 3)];
        const int n = 2 + static_cast<int>(uniform_below(rng, 4));
        const auto g = gt::random_sociogram(rng, m, n, {}, 0.2 + 0.5 * unit_uniform(rng));
        if (!g.empty()) check(g);
    }
    o.require(worst_c <= 1e-6, "centrality error " + sci(worst_c));
    const double secs = seconds_since(t0);
    o.require(secs < 10.0, "runtime " + num(secs, 1) + " s");
    o.note("jaccard max err " + sci(worst_j) + ", centrality max err " + sci(worst_c) + " over " +
           std::to_string(graphs) + " graphs, " + num(secs, 2) + " s");
    return o;
}

// ---------------------------------------------------------------- AC2

Outcome ac2() {
    Outcome o;
    const auto t0 = Clock::now();
    SynthParams p;  // conversation rate 0.9976, group addressing, 288 s
    const auto corpus = generate_synthetic_corpus(p, 16);
    std::vector<std::string> ids;
    for (const auto& s : corpus) ids.push_back(s.timeline.group_id);
    const auto split = leave_group_out(ids);
    std::vector<const SessionTimeline*> train, eval;
    for (const auto& s : corpus)
        (std::find(split.train.begin(), split.train.end(), s.timeline.group_id) != split.train.end() ? train : eval)
            .push_back(&s.timeline);
    const auto models = models_for(train);
    RunConfig cfg;
    const auto pred = baseline(PredictorKind::Persistence);
    std::vector<EvaluationReport> parts;
    for (const auto* s : eval) parts.push_back(run_single_step(*s, *pred, models, cfg));
    const auto rep = merge_reports(parts);
    const auto& conv = rep.overall.confusion.of(Modality::Conversation);
    o.require(conv.f1 >= 0.90, "conv F1 " + num(conv.f1));
    o.require(std::abs(conv.mcc) <= 0.05, "conv MCC " + num(conv.mcc));
    o.require(rep.overall.jaccard_avg <= 0.25, "similarity " + num(rep.overall.jaccard_avg));
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + num(secs, 1) + " s");
    o.note("conv F1 " + num(conv.f1) + ", MCC " + num(conv.mcc) + (conv.mcc_undefined ? " (undefined)" : "") +
           ", similarity " + num(rep.overall.jaccard_avg) + " on " + std::to_string(rep.overall.windows) +
           " held-out windows, " + num(secs, 2) + " s");
    return o;
}

// ---------------------------------------------------------------- AC3

Outcome ac3() {
    Outcome o;
    const std::array<double, 3> rates{0.3, 0.3, 0.3};
    long long on = 0, total = 0;
    for (int w = 0; w < 1000; ++w) {
        const auto s = stratified_random_predict(rates, 42, "G01", 4, {w, w * 16.0, w * 16.0 + 32.0}, 32);
        for (Modality m : kModalities)
            for_each_edge(4, is_directed(m), [&](int i, int j) {
                on += s.active_seconds(m, i, j);
                total += s.seconds();
            });
    }
    const double rate = static_cast<double>(on) / static_cast<double>(total);
    o.require(std::abs(rate - 0.3) <= 0.02, "empirical rate " + num(rate));

    const auto session = generate_synthetic_session(directed_params(5, 288.0));
    const std::vector<const SessionTimeline*> one{&session.timeline};
    const auto models = models_for(one);
    auto render = [&] {
        RunConfig cfg;
        cfg.jobs = 3;
        const auto rep = run_single_step(session.timeline, *baseline(PredictorKind::StratifiedRandom, rates), models, cfg);
        std::string bytes = report_csv_header();
        for (const auto& r : rep.windows) bytes += report_csv_row(r) + render_canonical(r.prediction);
        return bytes;
    };
    o.require(render() == render(), "seeded reruns differ");
    o.note("empirical rate " + num(rate) + " over 1000 windows, reruns identical");
    return o;
}

// ---------------------------------------------------------------- AC4

Outcome ac4() {
    Outcome o;
    Rng rng(4004);
    int exact = 0;
    for (int k = 0; k < 10000; ++k) {
        const int n = 2 + static_cast<int>(uniform_below(rng, 4));
        const int T = 1 + static_cast<int>(uniform_below(rng, 32));
        const Window w{k, k * 16.0, k * 16.0 + T};
        const auto s = gt::random_series(rng, n, T, unit_uniform(rng), w);
        exact += parse_response(render_canonical(s), n, T, w).series == s ? 1 : 0;
    }
    o.require(exact == 10000, std::to_string(10000 - exact) + " round trips differ");

    long long recovered = 0, correct = 0, expected = 0;
    for (int k = 0; k < 500; ++k) {
        const int n = 2 + static_cast<int>(uniform_below(rng, 3));
        const int T = 4 + static_cast<int>(uniform_below(rng, 29));
        const auto s = gt::random_series(rng, n, T, 0.4);
        const auto r = parse_response(gt::perturb_response(render_canonical(s), rng), n, T, s.window());
        recovered += r.diagnostics.entries_recovered;
        expected += r.diagnostics.entries_expected;
        for (Modality m : kModalities)
            for_each_edge(n, is_directed(m), [&](int i, int j) {
                for (int t = 0; t < T; ++t) correct += r.series.active(m, i, j, t) == s.active(m, i, j, t) ? 1 : 0;
            });
    }
    const double rec = static_cast<double>(recovered) / static_cast<double>(expected);
    const double cor = static_cast<double>(correct) / static_cast<double>(expected);
    o.require(rec >= 0.95, "recovered " + num(rec));
    o.require(cor >= 0.95, "correct " + num(cor));

    int crashes = 0;
    for (int k = 0; k < 10000; ++k) {
        std::string t(uniform_below(rng, 600), '\0');
        for (auto& c : t) c = static_cast<char>(uniform_below(rng, 256));
        if (k % 2 == 0) t = "Pair P1->P2:\nt=1: C=" + t;
        try {
            parse_response(t, 2 + static_cast<int>(k % 4), 1 + k % 32);
        } catch (...) {
            ++crashes;
        }
    }
    o.require(crashes == 0, std::to_string(crashes) + " exceptions on arbitrary bytes");
    o.note("10000/10000 exact round trips: " + std::to_string(exact) + ", perturbed recovered " + num(rec) +
           " correct " + num(cor) + ", " + std::to_string(crashes) + " crashes on 10000 byte strings");
    return o;
}

// ---------------------------------------------------------------- AC5

Outcome ac5() {
    Outcome o;
    // Noisy mock: 30 seeded rollouts, one session and mock seed each.
    double d1 = 0.0, d5 = 0.0;
    int usable = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = generate_synthetic_session(directed_params(500 + seed, 224.0));
        const std::vector<const SessionTimeline*> one{&s.timeline};
        MockOptions mo;
        mo.flip_probability = 0.10;
        mo.seed = seed;
        RunConfig cfg;
        const auto rep = run_simulation(s.timeline, *llm_with(MockCompletionClient::context_echo(mo)), 5,
                                        models_for(one), cfg);
        d1 += rep.per_depth.front().jaccard_avg;
        d5 += rep.per_depth.back().jaccard_avg;
        ++usable;
    }
    d1 /= usable;
    d5 /= usable;
    o.require(d5 < d1, "noisy depth-5 " + num(d5) + " not below depth-1 " + num(d1));

    // Perfect mock and persistence on directed sessions, where a predicted
    // window fed back as context equals the true one when it is exact.
    int perfect_mismatch = 0, persist_mismatch = 0, rows = 0;
    auto registry = std::make_shared<TruthRegistry>();
    std::vector<SynthSession> sessions;
    for (std::uint64_t seed = 0; seed < 5; ++seed) sessions.push_back(generate_synthetic_session(directed_params(900 + seed, 224.0)));
    std::vector<const SessionTimeline*> ptrs;
    for (const auto& s : sessions) {
        ptrs.push_back(&s.timeline);
        for (const auto& w : s.timeline.windows) registry->add(s.timeline.group_id, w.window().index, w.truth_series);
    }
    const auto models = models_for(ptrs);
    RunConfig cfg;
    for (const auto* tl : ptrs) {
        const auto perfect = llm_with(MockCompletionClient::echo_truth(registry));
        const auto sim = run_simulation(*tl, *perfect, 5, models, cfg);
        const auto single = run_single_step(*tl, *perfect, models, cfg);
        for (const auto& r : sim.windows) {
            const auto& ref = single.windows[static_cast<std::size_t>(r.window - 1)];
            ++rows;
            if (r.skipped || !(r.prediction == ref.prediction) || r.jaccard_avg != ref.jaccard_avg) ++perfect_mismatch;
        }
        const auto persist = baseline(PredictorKind::Persistence);
        const auto psim = run_simulation(*tl, *persist, 5, models, cfg);
        const auto psingle = run_single_step(*tl, *persist, models, cfg);
        for (const auto& r : psim.windows) {
            const auto& first = psingle.windows[static_cast<std::size_t>(r.anchor)].prediction;
            for (Modality m : kModalities)
                for_each_edge(tl->n(), is_directed(m), [&](int i, int j) {
                    if (r.prediction.active_seconds(m, i, j) != first.active_seconds(m, i, j)) ++persist_mismatch;
                });
        }
    }
    o.require(perfect_mismatch == 0, std::to_string(perfect_mismatch) + " perfect-mock rows differ");
    o.require(persist_mismatch == 0, std::to_string(persist_mismatch) + " persistence entries drift");
    o.note("noisy depth-1 " + num(d1) + " > depth-5 " + num(d5) + " over " + std::to_string(usable) +
           " rollouts; perfect mock equal on " + std::to_string(rows) + " rows; persistence fixed point at all depths");
    return o;
}

// ---------------------------------------------------------------- AC6

Outcome ac6() {
    Outcome o;
    const auto t0 = Clock::now();
    std::string summary;
    for (double rho : {0.53, 0.60, 0.73}) {
        SynthParams p;
        p.rho = rho;
        p.rates = {0.5, 0.5, 0.5};
        p.duration_s = 32.0 + 499 * 16.0;  // 500 windows
        p.seed = 6000 + static_cast<std::uint64_t>(rho * 100);
        const auto s = generate_synthetic_session(p);
        o.require(s.timeline.window_count() == 500, "window count " + std::to_string(s.timeline.window_count()));
        double worst = 0.0, mean = 0.0;
        int chains = 0;
        for (const auto* group : {&s.latent.speaking, &s.latent.prox_slots, &s.latent.attn_slots})
            for (const auto& c : *group) {
                const double r = lag1_autocorrelation(c);
                worst = std::max(worst, std::abs(r - rho));
                mean += r;
                ++chains;
            }
        mean /= chains;
        o.require(worst <= 0.1, "rho " + num(rho, 2) + " worst deviation " + num(worst));
        summary += (summary.empty() ? "" : ", ") + std::string("rho ") + num(rho, 2) + " -> " + num(mean, 3) +
                   " (max dev " + num(worst, 3) + ")";
    }
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + num(secs, 1) + " s");
    o.note(summary + ", " + num(secs, 2) + " s");
    return o;
}

// ---------------------------------------------------------------- AC7

Outcome ac7() {
    Outcome o;
    o.require(make_window_index(288.0, 32.0, 16.0).size() == 17, "288 s");
    o.require(make_window_index(96.0, 32.0, 16.0).size() == 5, "96 s");
    o.require(make_window_index(32.0, 32.0, 16.0).size() == 1, "32 s");
    Rng rng(7007);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
        const double duration = 32.0 + unit_uniform(rng) * 2000.0;
        std::vector<Window> slide;
        for (int i = 0;; ++i) {
            const double start = i * 16.0;
            if (start + 32.0 > duration) break;
            slide.push_back({i, start, start + 32.0});
        }
        if (make_window_index(duration, 32.0, 16.0) != slide) ++bad;
    }
    o.require(bad == 0, std::to_string(bad) + " durations disagree with the sliding enumerator");
    o.note("17/5/1 windows, 1000 random durations agree");
    return o;
}

// ---------------------------------------------------------------- AC8

// HTTP front for a mock client, so the check runs the real transport.
class MockServer {
public:
    explicit MockServer(std::shared_ptr<CompletionClient> backend) : backend_(std::move(backend)) {
        server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            CompletionRequest r;
            r.prompt = body["prompt"].get<std::string>();
            r.max_new_tokens = body["max_tokens"].get<int>();
            const auto reply = backend_->complete(r);
            res.set_content(nlohmann::json{{"choices", {{{"text", reply.text}}}}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    std::shared_ptr<CompletionClient> backend_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

Outcome ac8() {
    Outcome o;
    const auto s = generate_synthetic_session(directed_params(808, 32.0 + 9 * 16.0));
    o.require(s.timeline.window_count() == 10, "session has " + std::to_string(s.timeline.window_count()) + " windows");
    auto registry = std::make_shared<TruthRegistry>();
    for (const auto& w : s.timeline.windows) registry->add(s.timeline.group_id, w.window().index, w.truth_series);
    MockServer server(MockCompletionClient::echo_truth(registry));
    EndpointConfig ec;
    ec.base_url = server.url();
    ec.api_key_env = "GROUPCAST_ACCEPTANCE_NO_KEY";
    const std::vector<const SessionTimeline*> one{&s.timeline};
    RunConfig cfg;
    const auto rep = run_single_step(s.timeline, *llm_with(std::make_shared<HttpCompletionClient>(ec)),
                                     models_for(one), cfg);
    for (Modality m : kModalities)
        o.require(rep.overall.jaccard[modality_index(m)] == 1.0,
                  std::string(modality_name(m)) + " similarity " + num(rep.overall.jaccard[modality_index(m)], 6));
    o.require(rep.overall.valid_window_rate == 1.0, "valid rate " + num(rep.overall.valid_window_rate));
    o.require(rep.overall.skipped == 0, std::to_string(rep.overall.skipped) + " skipped");
    o.note("similarity " + num(rep.overall.jaccard_avg, 6) + " on all modalities, valid rate " +
           num(rep.overall.valid_window_rate, 3) + " over " + std::to_string(rep.overall.windows) +
           " windows via HTTP");
    return o;
}

// ---------------------------------------------------------------- AC9

Outcome ac9() {
    Outcome o;
    Rng rng(9009);
    auto pool_of = [&](int size, int groups) {
        std::vector<Demonstration> pool;
        for (int k = 0; k < size; ++k) {
            Demonstration d;
            d.group_id = "G" + std::to_string(uniform_below(rng, static_cast<std::uint64_t>(groups)));
            d.window_index = k;
            for (int c = 0; c < 9; ++c) d.embedding.push_back(unit_uniform(rng) * 4.0 - 2.0);
            pool.push_back(std::move(d));
        }
        return pool;
    };
    int argmax_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pool = pool_of(100, 8);
        Point q;
        for (int c = 0; c < 9; ++c) q.push_back(unit_uniform(rng) * 4.0 - 2.0);
        const std::string target = "G" + std::to_string(uniform_below(rng, 8));
        std::size_t best = pool.size();
        double score = -2.0;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (pool[i].group_id != target && cosine_similarity(q, pool[i].embedding) > score) {
                score = cosine_similarity(q, pool[i].embedding);
                best = i;
            }
        const auto got = select_few_shot(pool, target, q, SelectionStrategy::PhaseSimilar, 1);
        if (got.size() != 1 || got[0] != best) ++argmax_bad;
    }
    o.require(argmax_bad == 0, std::to_string(argmax_bad) + " argmax mismatches");

    int leaks = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pool = pool_of(10 + static_cast<int>(uniform_below(rng, 90)), 4);
        const std::string target = "G" + std::to_string(uniform_below(rng, 4));
        if (std::all_of(pool.begin(), pool.end(), [&](const auto& d) { return d.group_id == target; })) continue;
        const auto strategy = static_cast<SelectionStrategy>(trial % 3);
        const int k = 1 + static_cast<int>(uniform_below(rng, 5));
        for (auto i : select_few_shot(pool, target, pool[0].embedding, strategy, k, static_cast<std::uint64_t>(trial),
                                      static_cast<std::uint64_t>(trial)))
            leaks += pool[i].group_id == target ? 1 : 0;
    }
    o.require(leaks == 0, std::to_string(leaks) + " same-group demonstrations");

    const auto corpus = generate_synthetic_corpus(directed_params(99, 176.0), 4);
    std::vector<const SessionTimeline*> train{&corpus[0].timeline, &corpus[1].timeline, &corpus[2].timeline};
    std::vector<const SessionTimeline*> eval{&corpus[3].timeline};
    const auto models = models_for(train);
    auto pool = std::make_shared<const std::vector<Demonstration>>(build_demonstration_pool(train, models));
    RunConfig cfg;
    cfg.predictor.kind = PredictorKind::Llm;
    cfg.predictor.paradigm = Paradigm::FewShot;
    const auto rows = compare_selection_strategies(eval, pool, MockCompletionClient::example_echo(), models, cfg);
    const auto table = render_strategy_table(rows);
    o.require(rows.size() == 3, std::to_string(rows.size()) + " strategy rows");
    std::set<SelectionStrategy> seen;
    for (const auto& r : rows) seen.insert(r.strategy);
    o.require(seen.size() == 3, "strategies repeated");
    o.require(table.find("not expected to reproduce") != std::string::npos, "table lacks the reference caveat");
    std::cout << table;
    o.note("argmax exact on 1000 pools of 100, no cross-group leaks in 1000 trials, 3-row table emitted");
    return o;
}

// ---------------------------------------------------------------- AC10

Outcome ac10() {
    Outcome o;
    const auto corpus = generate_synthetic_corpus(directed_params(1010, 224.0), 4);
    std::vector<const SessionTimeline*> ptrs;
    for (const auto& s : corpus) ptrs.push_back(&s.timeline);
    const auto models = models_for(ptrs);
    MockOptions mo;
    mo.flip_probability = 0.1;
    const std::vector<std::shared_ptr<Predictor>> predictors{
        baseline(PredictorKind::Persistence), baseline(PredictorKind::Smoothing), baseline(PredictorKind::Markov),
        baseline(PredictorKind::StratifiedRandom), llm_with(MockCompletionClient::context_echo(mo))};
    Rng rng(10010);
    RunConfig cfg;
    int changed = 0;
    for (int k = 0; k < 100; ++k) {
        const auto& tl = *ptrs[uniform_below(rng, ptrs.size())];
        const int t = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(tl.window_count() - 1)));
        const auto& p = predictors[static_cast<std::size_t>(k) % predictors.size()];
        const auto full = run_single_step(tl, *p, models, cfg);
        const auto cut = run_single_step(tl.truncated(t + 1), *p, models, cfg);
        const auto& a = full.windows[static_cast<std::size_t>(t)];
        const auto& b = cut.windows[static_cast<std::size_t>(t)];
        if (!(a.prediction == b.prediction) || report_csv_row(a) != report_csv_row(b)) ++changed;
    }
    o.require(changed == 0, std::to_string(changed) + " of 100 pairs changed");
    o.note("100 (session, t) pairs over 5 predictors unchanged after truncation");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 metric oracles", ac1},       {"AC2 persistence paradox", ac2}, {"AC3 stratified calibration", ac3},
        {"AC4 parser", ac4},               {"AC5 simulation", ac5},          {"AC6 generator autocorrelation", ac6},
        {"AC7 windows", ac7},              {"AC8 end-to-end identity", ac8}, {"AC9 few-shot selection", ac9},
        {"AC10 no lookahead", ac10},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
