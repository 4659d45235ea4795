#include "groupcast/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "groupcast/errors.hpp"
#include "groupcast/kmeans.hpp"

namespace groupcast {

std::string_view predictor_kind_name(PredictorKind k) {
    switch (k) {
        case PredictorKind::Persistence: return "persistence";
        case PredictorKind::Smoothing: return "smoothing";
        case PredictorKind::StratifiedRandom: return "stratified-random";
        case PredictorKind::Markov: return "markov";
        case PredictorKind::Llm: return "llm";
    }
    return "persistence";
}

std::string_view paradigm_name(Paradigm p) { return p == Paradigm::ZeroShot ? "zero-shot" : "few-shot"; }

std::string_view selection_name(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::Random: return "random";
        case SelectionStrategy::PhaseSimilar: return "similar";
        case SelectionStrategy::Diverse: return "diverse";
    }
    return "similar";
}

namespace {

std::string normalized(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == ' ') c = '-';
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

PredictorKind predictor_kind_from_name(std::string_view s) {
    const auto n = normalized(s);
    if (n == "persistence") return PredictorKind::Persistence;
    if (n == "smoothing") return PredictorKind::Smoothing;
    if (n == "stratified-random" || n == "stratified" || n == "random") return PredictorKind::StratifiedRandom;
    if (n == "markov") return PredictorKind::Markov;
    if (n == "llm") return PredictorKind::Llm;
    throw ContractError("unknown predictor '" + std::string(s) + "'");
}

Paradigm paradigm_from_name(std::string_view s) {
    const auto n = normalized(s);
    if (n == "zero-shot" || n == "zeroshot") return Paradigm::ZeroShot;
    if (n == "few-shot" || n == "fewshot") return Paradigm::FewShot;
    throw ContractError("unknown paradigm '" + std::string(s) + "'");
}

SelectionStrategy selection_from_name(std::string_view s) {
    const auto n = normalized(s);
    if (n == "random") return SelectionStrategy::Random;
    if (n == "similar" || n == "phase-similar") return SelectionStrategy::PhaseSimilar;
    if (n == "diverse") return SelectionStrategy::Diverse;
    throw ContractError("unknown selection strategy '" + std::string(s) + "'");
}

std::string PredictorSpec::label() const {
    switch (kind) {
        case PredictorKind::Smoothing: return "smoothing-" + std::to_string(smoothing_n);
        case PredictorKind::Llm:
            return paradigm == Paradigm::ZeroShot ? "llm-zero-shot"
                                                  : "llm-few-shot-" + std::string(selection_name(selection));
        default: return std::string(predictor_kind_name(kind));
    }
}

// ---- baselines

namespace {

void fill_edge(BinarySeries& s, Modality m, int i, int j, bool on) {
    if (!on) return;
    for (int t = 0; t < s.seconds(); ++t) s.set(m, i, j, t, true);
}

void check_target(int n, int seconds) {
    if (n < 2) throw ContractError("prediction needs n >= 2");
    if (seconds < 1) throw ContractError("prediction needs T >= 1");
}

}  // namespace

BinarySeries persistence_predict(const SociogramTriple& last, Window target, int seconds) {
    check_target(last.n(), seconds);
    BinarySeries out(target, last.n(), seconds);
    for (Modality m : kModalities) {
        const auto& g = last.get(m);
        for_each_edge(g.n(), g.directed(), [&](int i, int j) { fill_edge(out, m, i, j, g.weight(i, j) > 0.0); });
    }
    return out;
}

BinarySeries smoothing_predict(const std::vector<SociogramTriple>& last_n, Window target, int seconds,
                               double threshold) {
    if (last_n.empty()) throw ContractError("smoothing needs at least one prior window");
    if (last_n.size() == 1) return persistence_predict(last_n.front(), target, seconds);
    const int n = last_n.front().n();
    check_target(n, seconds);
    BinarySeries out(target, n, seconds);
    for (Modality m : kModalities)
        for_each_edge(n, is_directed(m), [&](int i, int j) {
            double sum = 0.0;
            for (const auto& g : last_n) sum += g.get(m).weight(i, j);
            fill_edge(out, m, i, j, sum / static_cast<double>(last_n.size()) > threshold);
        });
    return out;
}

BinarySeries stratified_random_predict(const std::array<double, 3>& rates, std::uint64_t seed,
                                       const std::string& group_id, int n, Window target, int seconds) {
    check_target(n, seconds);
    for (double r : rates)
        if (!(r >= 0.0 && r <= 1.0)) throw ContractError("stratified random: rates must lie in [0, 1]");
    Rng rng(mix_seed({seed, fnv1a(group_id), static_cast<std::uint64_t>(target.index)}));
    BinarySeries out(target, n, seconds);
    for (Modality m : kModalities)
        for_each_edge(n, is_directed(m),
                      [&](int i, int j) { fill_edge(out, m, i, j, bernoulli(rng, rates[modality_index(m)])); });
    return out;
}

std::array<double, 3> empirical_rates(const std::vector<const SessionTimeline*>& sessions) {
    std::array<double, 3> active{}, total{};
    for (const auto* s : sessions)
        for (const auto& w : s->windows)
            for (Modality m : kModalities) {
                const auto& series = w.truth_series;
                for_each_edge(series.n(), is_directed(m), [&](int i, int j) {
                    active[modality_index(m)] += series.active_seconds(m, i, j);
                    total[modality_index(m)] += series.seconds();
                });
            }
    std::array<double, 3> out{};
    for (std::size_t m = 0; m < 3; ++m) out[m] = total[m] > 0.0 ? active[m] / total[m] : 0.0;
    return out;
}

double markov_next_probability(const std::vector<bool>& states) {
    if (states.empty()) throw ContractError("markov: empty state history");
    std::array<std::array<double, 2>, 2> counts{};
    for (std::size_t k = 1; k < states.size(); ++k) counts[states[k - 1]][states[k]] += 1.0;
    const auto& row = counts[states.back()];
    return (row[1] + 1.0) / (row[0] + row[1] + 2.0);
}

BinarySeries markov_predict(const std::vector<SociogramTriple>& history, Window target, int seconds,
                            std::vector<std::string>* warnings) {
    if (history.empty()) throw ContractError("markov needs at least one prior window");
    if (history.size() < 2) {
        if (warnings) warnings->push_back("markov: fewer than 2 windows; persistence fallback");
        return persistence_predict(history.back(), target, seconds);
    }
    const int n = history.front().n();
    check_target(n, seconds);
    BinarySeries out(target, n, seconds);
    std::vector<bool> states(history.size());
    for (Modality m : kModalities)
        for_each_edge(n, is_directed(m), [&](int i, int j) {
            for (std::size_t w = 0; w < history.size(); ++w) states[w] = history[w].get(m).weight(i, j) > 0.0;
            const double p = markov_next_probability(states);
            fill_edge(out, m, i, j, p > 0.5 || (p == 0.5 && states.back()));
        });
    return out;
}

// ---- few-shot selection

double cosine_similarity(const Point& a, const Point& b) {
    if (a.size() != b.size()) throw ContractError("cosine: dimension mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    if (aa == 0.0 && bb == 0.0) return 1.0;
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

std::vector<std::size_t> select_few_shot(const std::vector<Demonstration>& pool, const std::string& target_group,
                                         const Point& query, SelectionStrategy strategy, int k, std::uint64_t seed,
                                         std::uint64_t query_key, SelectionStats* stats) {
    if (k < 1) throw ContractError("few-shot selection needs k >= 1");
    std::vector<std::size_t> eligible;
    for (std::size_t c = 0; c < pool.size(); ++c)
        if (pool[c].group_id != target_group) eligible.push_back(c);
    if (eligible.empty())
        throw ContractError("few-shot pool has no candidates outside group '" + target_group + "'");
    const auto want = std::min(static_cast<std::size_t>(k), eligible.size());
    SelectionStats local;
    std::vector<std::size_t> out;

    switch (strategy) {
        case SelectionStrategy::Random: {
            Rng rng(mix_seed({seed, fnv1a(target_group), query_key}));
            std::vector<std::size_t> left = eligible;
            for (std::size_t d = 0; d < want; ++d) {
                const auto pick = static_cast<std::size_t>(uniform_below(rng, left.size()));
                out.push_back(left[pick]);
                left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
                ++local.candidates_scanned;
            }
            break;
        }
        case SelectionStrategy::PhaseSimilar: {
            std::vector<std::pair<double, std::size_t>> scored;
            for (auto c : eligible) {
                scored.emplace_back(cosine_similarity(query, pool[c].embedding), c);
                ++local.candidates_scanned;
            }
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            for (std::size_t d = 0; d < want; ++d) out.push_back(scored[d].second);
            break;
        }
        case SelectionStrategy::Diverse: {
            std::vector<Point> points;
            for (auto c : eligible) points.push_back(pool[c].embedding);
            Rng rng(mix_seed({seed, fnv1a(target_group)}));
            const auto idx = kmeanspp_seed_indices(points, static_cast<int>(want), rng);
            local.candidates_scanned = static_cast<long long>(points.size() * idx.size());
            for (auto i : idx) out.push_back(eligible[i]);
            break;
        }
    }
    if (stats) *stats = local;
    return out;
}

// ---- LLM

LlmOutcome llm_predict(const ContextBundle& bundle, const std::vector<Demonstration>& examples,
                       CompletionClient& client, const LlmOptions& opts) {
    LlmOutcome out;
    out.prompt = render_prompt(bundle, examples, opts.budget_tokens);
    for (int d = 0; d < out.prompt.few_shot_examples; ++d)
        out.demonstrations.push_back(examples[static_cast<std::size_t>(d)].group_id + ":" +
                                     std::to_string(examples[static_cast<std::size_t>(d)].window_index));
    CompletionRequest req{out.prompt.text, opts.max_new_tokens, opts.temperature, opts.stop_sequences};
    CompletionResult res;
    try {
        res = client.complete(req);
    } catch (const TransportError& e) {
        throw PredictorUnavailable(std::string("llm backend unavailable: ") + e.what());
    }
    out.response = res.text;
    out.ttft_ms = res.ttft_ms;
    out.total_ms = res.total_ms;
    auto parsed = parse_response(res.text, bundle.n(), bundle.seconds(), bundle.target);
    out.series = std::move(parsed.series);
    out.diagnostics = std::move(parsed.diagnostics);
    return out;
}

// ---- predictor objects

namespace {

const std::vector<SociogramTriple>& history_of(const PredictionRequest& req) {
    if (!req.history || req.history->empty()) throw ContractError("prediction request without history");
    return *req.history;
}

class PersistencePredictor : public Predictor {
public:
    std::string name() const override { return "persistence"; }
    Prediction predict(const PredictionRequest& req) const override {
        return {persistence_predict(history_of(req).back(), req.target, req.seconds), {}, {}, {}};
    }
};

class SmoothingPredictor : public Predictor {
public:
    SmoothingPredictor(int n, double threshold) : n_(n), threshold_(threshold) {
        if (n_ < 1) throw ContractError("smoothing N must be >= 1");
    }
    std::string name() const override { return "smoothing-" + std::to_string(n_); }
    Prediction predict(const PredictionRequest& req) const override {
        const auto& h = history_of(req);
        const auto take = std::min(h.size(), static_cast<std::size_t>(n_));
        std::vector<SociogramTriple> last(h.end() - static_cast<std::ptrdiff_t>(take), h.end());
        return {smoothing_predict(last, req.target, req.seconds, threshold_), {}, {}, {}};
    }

private:
    int n_;
    double threshold_;
};

class StratifiedPredictor : public Predictor {
public:
    StratifiedPredictor(std::array<double, 3> rates, std::uint64_t seed) : rates_(rates), seed_(seed) {}
    std::string name() const override { return "stratified-random"; }
    Prediction predict(const PredictionRequest& req) const override {
        const int n = history_of(req).back().n();
        return {stratified_random_predict(rates_, seed_, req.group_id, n, req.target, req.seconds), {}, {}, {}};
    }

private:
    std::array<double, 3> rates_;
    std::uint64_t seed_;
};

class MarkovPredictor : public Predictor {
public:
    std::string name() const override { return "markov"; }
    Prediction predict(const PredictionRequest& req) const override {
        Prediction p;
        p.series = markov_predict(history_of(req), req.target, req.seconds, &p.warnings);
        return p;
    }
};

class LlmPredictor : public Predictor {
public:
    LlmPredictor(PredictorSpec spec, PredictorDeps deps) : spec_(spec), deps_(std::move(deps)) {
        if (!deps_.client) throw ContractError("llm predictor needs a completion client");
        if (spec_.paradigm == Paradigm::FewShot && (!deps_.pool || deps_.pool->empty()))
            throw ContractError("few-shot llm predictor needs a demonstration pool");
    }
    std::string name() const override { return spec_.label(); }
    bool needs_bundle() const override { return true; }
    Prediction predict(const PredictionRequest& req) const override {
        if (!req.bundle) throw ContractError("llm predictor needs a context bundle");
        Prediction p;
        std::vector<Demonstration> examples;
        if (spec_.paradigm == Paradigm::FewShot) {
            const auto idx = select_few_shot(*deps_.pool, req.group_id, req.bundle->embedding, spec_.selection,
                                             spec_.k, spec_.seed, static_cast<std::uint64_t>(req.bundle->window.index),
                                             &p.selection);
            for (auto i : idx) examples.push_back((*deps_.pool)[i]);
        }
        auto outcome = llm_predict(*req.bundle, examples, *deps_.client, deps_.llm);
        p.series = outcome.series;
        p.warnings = outcome.diagnostics.warnings;
        p.llm = std::move(outcome);
        return p;
    }

private:
    PredictorSpec spec_;
    PredictorDeps deps_;
};

}  // namespace

std::unique_ptr<Predictor> make_predictor(const PredictorSpec& spec, const PredictorDeps& deps) {
    switch (spec.kind) {
        case PredictorKind::Persistence: return std::make_unique<PersistencePredictor>();
        case PredictorKind::Smoothing:
            return std::make_unique<SmoothingPredictor>(spec.smoothing_n, spec.smoothing_threshold);
        case PredictorKind::StratifiedRandom: return std::make_unique<StratifiedPredictor>(deps.rates, spec.seed);
        case PredictorKind::Markov: return std::make_unique<MarkovPredictor>();
        case PredictorKind::Llm: return std::make_unique<LlmPredictor>(spec, deps);
    }
    throw ContractError("unknown predictor kind");
}

}  // namespace groupcast
