#include "groupcast/netmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "groupcast/errors.hpp"

namespace groupcast {

PowerIterationResult power_iteration(std::span<const double> a, int n, int max_iterations, double tolerance) {
    const auto un = static_cast<std::size_t>(n);
    PowerIterationResult out;
    std::vector<double> x(un, 1.0), next(un);
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i < un; ++i) {
            double acc = x[i];
            for (std::size_t j = 0; j < un; ++j) acc += a[j * un + i] * x[j];
            next[i] = acc;
        }
        const double top = *std::max_element(next.begin(), next.end());
        if (!(top > 0.0)) break;
        double delta = 0.0;
        for (std::size_t i = 0; i < un; ++i) {
            next[i] /= top;
            delta = std::max(delta, std::abs(next[i] - x[i]));
        }
        x.swap(next);
        out.iterations = it;
        if (delta < tolerance) {
            out.converged = true;
            break;
        }
    }
    out.vector = std::move(x);
    return out;
}

std::vector<double> dominant_direction(std::span<const double> a, int n, int squarings) {
    const auto un = static_cast<std::size_t>(n);
    // M = A^T + I, rescaled after every squaring so entries stay in [0, 1].
    std::vector<double> m(un * un), sq(un * un);
    for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = 0; j < un; ++j) m[i * un + j] = a[j * un + i] + (i == j ? 1.0 : 0.0);
    for (int step = 0; step < squarings; ++step) {
        double top = 0.0;
        for (std::size_t i = 0; i < un; ++i)
            for (std::size_t j = 0; j < un; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < un; ++k) acc += m[i * un + k] * m[k * un + j];
                sq[i * un + j] = acc;
                top = std::max(top, acc);
            }
        for (auto& v : sq) v /= top;
        m.swap(sq);
    }
    std::vector<double> x(un, 0.0);
    for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = 0; j < un; ++j) x[i] += m[i * un + j];
    const double top = *std::max_element(x.begin(), x.end());
    for (auto& v : x) v /= top;
    return x;
}

NetworkMetrics network_metrics(const Sociogram& g) {
    const int n = g.n();
    if (n < 2) throw ContractError("network metrics need n >= 2");
    const Sociogram b = binarize(g, 0.0);
    NetworkMetrics out;

    int active = 0;
    for_each_edge(n, g.directed(), [&](int i, int j) { active += b.weight(i, j) > 0.0 ? 1 : 0; });
    out.density = static_cast<double>(active) / edge_count(n, g.directed());

    if (g.directed()) {
        int reciprocated = 0;
        for_each_edge(n, true, [&](int i, int j) {
            if (b.weight(i, j) > 0.0 && b.weight(j, i) > 0.0) ++reciprocated;
        });
        out.reciprocity = active > 0 ? static_cast<double>(reciprocated) / active : 0.0;
    }

    if (g.empty()) {
        out.degenerate = true;
        out.eigenvector_centrality.assign(static_cast<std::size_t>(n), 1.0);
    } else {
        out.eigenvector_centrality = dominant_direction(g.matrix(), n);
    }

    // Local clustering on the undirected shadow of the binarized graph.
    auto linked = [&](int i, int j) { return b.weight(i, j) > 0.0 || b.weight(j, i) > 0.0; };
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
        std::vector<int> nb;
        for (int u = 0; u < n; ++u)
            if (u != v && linked(v, u)) nb.push_back(u);
        const auto k = nb.size();
        if (k < 2) continue;
        int closed = 0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) closed += linked(nb[p], nb[q]) ? 1 : 0;
        total += 2.0 * closed / static_cast<double>(k * (k - 1));
    }
    out.clustering = total / n;
    return out;
}

Similarity weighted_jaccard(const Sociogram& pred, const Sociogram& truth) {
    if (pred.modality() != truth.modality())
        throw ContractError("weighted_jaccard: modality mismatch (" + std::string(modality_name(pred.modality())) +
                            " vs " + std::string(modality_name(truth.modality())) + ")");
    if (pred.n() != truth.n()) throw ContractError("weighted_jaccard: node count mismatch");
    double lo = 0.0, hi = 0.0;
    for_each_edge(pred.n(), pred.directed(), [&](int i, int j) {
        const double a = pred.weight(i, j);
        const double b = truth.weight(i, j);
        lo += std::min(a, b);
        hi += std::max(a, b);
    });
    if (hi == 0.0) return {1.0, true};
    return {lo / hi, false};
}

ClassificationScores score_counts(const ConfusionCounts& c) {
    ClassificationScores s;
    const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const auto tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    const double total = tp + fp + tn + fn;
    s.accuracy = total > 0.0 ? (tp + tn) / total : 1.0;
    // No predicted (or true) positives: perfect only if the other side agrees.
    s.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : (fn == 0.0 ? 1.0 : 0.0);
    s.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : (fp == 0.0 ? 1.0 : 0.0);
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom > 0.0) {
        s.mcc = (tp * tn - fp * fn) / std::sqrt(denom);
    } else {
        s.mcc = 0.0;
        s.mcc_undefined = true;
    }
    return s;
}

ConfusionSummary summarize(const std::array<ConfusionCounts, 3>& counts) {
    ConfusionSummary out;
    out.counts = counts;
    for (std::size_t m = 0; m < 3; ++m) {
        out.per_modality[m] = score_counts(counts[m]);
        out.overall_counts += counts[m];
    }
    out.overall = score_counts(out.overall_counts);
    return out;
}

ConfusionSummary pairwise_confusion(const BinarySeries& pred, const BinarySeries& truth) {
    if (pred.n() != truth.n() || pred.seconds() != truth.seconds())
        throw ContractError("pairwise_confusion: series shapes differ");
    if (pred.window().index != truth.window().index) throw ContractError("pairwise_confusion: windows differ");
    std::array<ConfusionCounts, 3> counts{};
    for (Modality m : kModalities) {
        auto& c = counts[modality_index(m)];
        for_each_edge(pred.n(), is_directed(m), [&](int i, int j) {
            for (int s = 0; s < pred.seconds(); ++s) {
                const bool p = pred.active(m, i, j, s);
                const bool t = truth.active(m, i, j, s);
                if (p && t) ++c.tp;
                else if (p) ++c.fp;
                else if (t) ++c.fn;
                else ++c.tn;
            }
        });
    }
    return summarize(counts);
}

double valid_window_rate(const std::vector<ConfusionSummary>& windows, double threshold) {
    if (windows.empty()) throw ContractError("valid_window_rate: no windows");
    const auto ok = std::count_if(windows.begin(), windows.end(),
                                  [&](const ConfusionSummary& w) { return w.overall.accuracy >= threshold; });
    return static_cast<double>(ok) / static_cast<double>(windows.size());
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("pearson: length mismatch");
    const auto n = static_cast<double>(x.size());
    if (x.empty()) return {0.0, true};
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx, dy = y[k] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return {0.0, true};
    return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

std::string_view structural_metric_name(StructuralMetric m) {
    switch (m) {
        case StructuralMetric::Density: return "density";
        case StructuralMetric::Reciprocity: return "reciprocity";
        case StructuralMetric::Clustering: return "clustering";
    }
    return "unknown";
}

double structural_value(const NetworkMetrics& m, StructuralMetric which) {
    switch (which) {
        case StructuralMetric::Density: return m.density;
        case StructuralMetric::Reciprocity: return m.reciprocity;
        case StructuralMetric::Clustering: return m.clustering;
    }
    return 0.0;
}

std::array<Correlation, 3> property_preservation(const std::vector<NetworkMetrics>& pred,
                                                 const std::vector<NetworkMetrics>& truth) {
    if (pred.size() != truth.size()) throw ContractError("property_preservation: series lengths differ");
    if (pred.size() < 3) throw ContractError("property_preservation: need at least 3 windows");
    std::array<Correlation, 3> out{};
    for (StructuralMetric m : kStructuralMetrics) {
        std::vector<double> x, y;
        for (std::size_t k = 0; k < pred.size(); ++k) {
            x.push_back(structural_value(pred[k], m));
            y.push_back(structural_value(truth[k], m));
        }
        out[static_cast<std::size_t>(m)] = pearson(x, y);
    }
    return out;
}

}  // namespace groupcast
