#include "groupcast/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "groupcast/errors.hpp"

namespace groupcast {

double squared_distance(const Point& a, const Point& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
    return d;
}

int count_distinct(const std::vector<Point>& points) {
    std::vector<Point> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

std::vector<std::size_t> kmeanspp_seed_indices(const std::vector<Point>& points, int k, Rng& rng) {
    if (points.empty()) throw ContractError("k-means++ on an empty point set");
    std::vector<std::size_t> chosen{static_cast<std::size_t>(uniform_below(rng, points.size()))};
    std::vector<double> d2(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) d2[p] = squared_distance(points[p], points[chosen[0]]);
    while (static_cast<int>(chosen.size()) < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        if (!(total > 0.0)) break;
        const double target = unit_uniform(rng) * total;
        double acc = 0.0;
        std::size_t pick = points.size() - 1;
        for (std::size_t p = 0; p < points.size(); ++p) {
            acc += d2[p];
            if (d2[p] > 0.0 && acc > target) {
                pick = p;
                break;
            }
        }
        while (d2[pick] == 0.0 && pick > 0) --pick;  // float slack at the tail
        chosen.push_back(pick);
        for (std::size_t p = 0; p < points.size(); ++p)
            d2[p] = std::min(d2[p], squared_distance(points[p], points[pick]));
    }
    return chosen;
}

namespace {

KMeansResult lloyd(const std::vector<Point>& points, std::vector<Point> centroids, int max_iterations) {
    KMeansResult r;
    r.labels.assign(points.size(), -1);
    const std::size_t dim = points.front().size();
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t p = 0; p < points.size(); ++p) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < centroids.size(); ++c) {
                const double d = squared_distance(points[p], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (r.labels[p] != best) {
                r.labels[p] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<Point> sums(centroids.size(), Point(dim, 0.0));
        std::vector<int> counts(centroids.size(), 0);
        for (std::size_t p = 0; p < points.size(); ++p) {
            const auto c = static_cast<std::size_t>(r.labels[p]);
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[p][d];
            ++counts[c];
        }
        for (std::size_t c = 0; c < centroids.size(); ++c)
            if (counts[c] > 0)  // an emptied cluster keeps its centre
                for (std::size_t d = 0; d < dim; ++d) centroids[c][d] = sums[c][d] / counts[c];
    }
    r.centroids = std::move(centroids);
    r.inertia = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p)
        r.inertia += squared_distance(points[p], r.centroids[static_cast<std::size_t>(r.labels[p])]);
    return r;
}

}  // namespace

KMeansResult kmeans(const std::vector<Point>& points, int k, std::uint64_t seed, int restarts, int max_iterations) {
    if (points.empty()) throw ContractError("k-means on an empty point set");
    if (k < 1) throw ContractError("k-means needs k >= 1");
    k = std::min(k, count_distinct(points));
    KMeansResult best;
    bool have = false;
    for (int run = 0; run < std::max(1, restarts); ++run) {
        Rng rng(mix_seed({seed, static_cast<std::uint64_t>(run)}));
        const auto idx = kmeanspp_seed_indices(points, k, rng);
        std::vector<Point> centres;
        for (auto i : idx) centres.push_back(points[i]);
        auto r = lloyd(points, std::move(centres), max_iterations);
        if (!have || r.inertia < best.inertia - 1e-12) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

ZScore ZScore::fit(const std::vector<Point>& points) {
    ZScore z;
    if (points.empty()) return z;
    const std::size_t dim = points.front().size();
    z.mean.assign(dim, 0.0);
    z.scale.assign(dim, 1.0);
    const auto n = static_cast<double>(points.size());
    for (const auto& p : points)
        for (std::size_t d = 0; d < dim; ++d) z.mean[d] += p[d] / n;
    for (std::size_t d = 0; d < dim; ++d) {
        double var = 0.0;
        for (const auto& p : points) var += (p[d] - z.mean[d]) * (p[d] - z.mean[d]);
        const double sd = std::sqrt(var / n);
        // Spreads at rounding level count as constant columns.
        if (sd > 1e-12 * std::max(1.0, std::abs(z.mean[d]))) z.scale[d] = sd;
        else z.scale[d] = 0.0;
    }
    return z;
}

Point ZScore::apply(const Point& p) const {
    Point out(p.size(), 0.0);
    for (std::size_t d = 0; d < p.size(); ++d)
        if (scale[d] > 0.0) out[d] = (p[d] - mean[d]) / scale[d];
    return out;
}

}  // namespace groupcast
