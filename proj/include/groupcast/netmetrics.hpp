#pragma once

#include <array>
#include <vector>

#include "groupcast/domain.hpp"

namespace groupcast {

struct NetworkMetrics {
    double density = 0.0;
    /// Fraction of active directed edges whose reverse is active; 1 for undirected graphs.
    double reciprocity = 1.0;
    /// Per node, scaled so the largest entry is 1.
    std::vector<double> eigenvector_centrality;
    double clustering = 0.0;
    /// Zero graph: centrality reported uniform.
    bool degenerate = false;
};

/// Density, reciprocity and clustering are computed on binarize(g, 0);
/// centrality is dominant_direction of the weight matrix (in-edges for
/// directed graphs). Clustering treats a directed graph as its undirected shadow.
NetworkMetrics network_metrics(const Sociogram& g);

struct PowerIterationResult {
    std::vector<double> vector;  // unit max
    int iterations = 0;
    bool converged = false;
};

/// Dominant eigenvector of a non-negative n*n row-major matrix, iterating
/// x <- (A^T + I) x from the uniform vector (the shift removes the
/// oscillation bipartite graphs show under plain A). Stops after
/// `max_iterations` or when the max-norm change drops below `tolerance`.
PowerIterationResult power_iteration(std::span<const double> matrix, int n, int max_iterations = 100,
                                     double tolerance = 1e-8);

/// Limit of (A^T + I)^k 1, scaled to max 1, as k grows: the shifted power
/// iteration taken to k = 2^squarings by repeated squaring. Unlike a capped
/// iteration count this also settles when the dominant root is repeated or
/// defective (acyclic graphs), where plain iteration converges like 1/k.
std::vector<double> dominant_direction(std::span<const double> matrix, int n, int squarings = 64);

struct Similarity {
    double value = 0.0;
    /// Both graphs all-zero: value is 1 by convention.
    bool degenerate = false;
};

/// Sum of edge-wise minima over sum of maxima. Throws ContractError when the
/// graphs differ in modality or size.
Similarity weighted_jaccard(const Sociogram& pred, const Sociogram& truth);

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;

    long long total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp; fp += o.fp; tn += o.tn; fn += o.fn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ClassificationScores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mcc = 0.0;
    /// MCC denominator was zero; mcc is reported as 0.
    bool mcc_undefined = false;
};

ClassificationScores score_counts(const ConfusionCounts& c);

struct ConfusionSummary {
    std::array<ConfusionCounts, 3> counts{};  // by modality
    std::array<ClassificationScores, 3> per_modality{};
    ConfusionCounts overall_counts;
    ClassificationScores overall;

    const ClassificationScores& of(Modality m) const { return per_modality[modality_index(m)]; }
};

/// Counts over every (pair, second, modality): ordered pairs for conversation,
/// unordered pairs for the undirected modalities.
ConfusionSummary pairwise_confusion(const BinarySeries& pred, const BinarySeries& truth);
ConfusionSummary summarize(const std::array<ConfusionCounts, 3>& counts);

/// Fraction of windows whose overall accuracy is at least `threshold`.
double valid_window_rate(const std::vector<ConfusionSummary>& windows, double threshold = 0.80);

struct Correlation {
    double r = 0.0;
    /// Either series constant; r reported as 0.
    bool degenerate = false;
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

enum class StructuralMetric { Density = 0, Reciprocity = 1, Clustering = 2 };
inline constexpr std::array<StructuralMetric, 3> kStructuralMetrics = {
    StructuralMetric::Density, StructuralMetric::Reciprocity, StructuralMetric::Clustering};
std::string_view structural_metric_name(StructuralMetric m);
double structural_value(const NetworkMetrics& m, StructuralMetric which);

/// Pearson r per metric between predicted and true per-window series.
/// Requires equal lengths >= 3.
std::array<Correlation, 3> property_preservation(const std::vector<NetworkMetrics>& pred,
                                                 const std::vector<NetworkMetrics>& truth);

}  // namespace groupcast
