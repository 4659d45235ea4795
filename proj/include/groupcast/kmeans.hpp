#pragma once

#include <cstdint>
#include <vector>

#include "groupcast/rng.hpp"

namespace groupcast {

using Point = std::vector<double>;

struct KMeansResult {
    std::vector<Point> centroids;
    std::vector<int> labels;
    double inertia = 0.0;
};

double squared_distance(const Point& a, const Point& b);

/// k-means++ seeding: first centre uniform, later centres drawn with
/// probability proportional to squared distance to the nearest chosen centre.
/// Returns point indices. Stops early when every remaining point coincides
/// with a chosen centre.
std::vector<std::size_t> kmeanspp_seed_indices(const std::vector<Point>& points, int k, Rng& rng);

/// Lloyd iterations from k-means++ seeds; best of `restarts` runs by inertia.
/// `k` is clamped to the number of distinct points. Deterministic in `seed`.
KMeansResult kmeans(const std::vector<Point>& points, int k, std::uint64_t seed, int restarts = 5,
                    int max_iterations = 100);

int count_distinct(const std::vector<Point>& points);

/// Column-wise z-scoring parameters; zero-variance columns (scale 0) map to 0.
struct ZScore {
    std::vector<double> mean;
    std::vector<double> scale;

    static ZScore fit(const std::vector<Point>& points);
    Point apply(const Point& p) const;
};

}  // namespace groupcast
