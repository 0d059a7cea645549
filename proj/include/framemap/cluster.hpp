#pragma once

// Seeded k-means (k-means++ init, Lloyd iterations, canonical size-ordered
// relabeling), silhouette scores, and the Adjusted Rand Index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "framemap/rng.hpp"

namespace framemap::cluster {

using Matrix = std::vector<std::vector<double>>;

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct ClusterRun {
    std::uint64_t seed = 0;
    int k = 0;
    std::vector<int> labels;
    Matrix centroids;
    double inertia = 0.0;
    double silhouette = 0.0;
};

namespace detail {

inline std::vector<std::size_t> kmeanspp_init(const Matrix& points, int k, det::Rng& rng) {
    std::vector<std::size_t> centers;
    centers.push_back(rng.below(points.size()));
    std::vector<double> d2(points.size(), std::numeric_limits<double>::max());
    while (centers.size() < static_cast<std::size_t>(k)) {
        const auto& latest = points[centers.back()];
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], sq_dist(points[i], latest));
        }
        centers.push_back(rng.discrete(d2));
    }
    return centers;
}

// Relabels clusters by descending size; ties break toward the smaller
// original index. Keeps topic ids stable across re-runs and seeds.
inline void canonical_relabel(std::vector<int>& labels, Matrix& centroids) {
    const int k = static_cast<int>(centroids.size());
    std::vector<int> sizes(k, 0);
    for (int l : labels) sizes[static_cast<std::size_t>(l)]++;
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (sizes[static_cast<std::size_t>(a)] != sizes[static_cast<std::size_t>(b)])
            return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)];
        return a < b;
    });
    std::vector<int> remap(static_cast<std::size_t>(k));
    Matrix new_centroids(static_cast<std::size_t>(k));
    for (int pos = 0; pos < k; ++pos) {
        remap[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
        new_centroids[static_cast<std::size_t>(pos)] =
            centroids[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
    }
    for (auto& l : labels) l = remap[static_cast<std::size_t>(l)];
    centroids = std::move(new_centroids);
}

}  // namespace detail

inline ClusterRun kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter = 300) {
    const std::size_t n = points.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("kmeans: need 1 <= K <= N");
    }
    det::Rng rng(det::mix(seed, 0x6b6d65616e73ULL));
    const auto init = detail::kmeanspp_init(points, k, rng);
    Matrix centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    for (auto idx : init) centroids.push_back(points[idx]);

    std::vector<int> labels(n, -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(points[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        Matrix sums(static_cast<std::size_t>(k),
                    std::vector<double>(points[0].size(), 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            counts[static_cast<std::size_t>(labels[i])]++;
            auto& sum = sums[static_cast<std::size_t>(labels[i])];
            for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += points[i][d];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                // empty cluster: re-seed at the point farthest from its centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        sq_dist(points[i], centroids[static_cast<std::size_t>(labels[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[static_cast<std::size_t>(c)] = points[far];
                labels[far] = c;
            } else {
                auto& sum = sums[static_cast<std::size_t>(c)];
                for (std::size_t d = 0; d < sum.size(); ++d) {
                    centroids[static_cast<std::size_t>(c)][d] =
                        sum[d] / counts[static_cast<std::size_t>(c)];
                }
            }
        }
    }

    detail::canonical_relabel(labels, centroids);
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inertia += sq_dist(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    }
    ClusterRun run;
    run.seed = seed;
    run.k = k;
    run.labels = std::move(labels);
    run.centroids = std::move(centroids);
    run.inertia = inertia;
    return run;
}

// Full Euclidean distance matrix; silhouette over a grid of runs reuses it.
inline std::vector<std::vector<double>> distance_matrix(const Matrix& points) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = std::sqrt(sq_dist(points[i], points[j]));
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    return d;
}

inline double silhouette_from_distances(const std::vector<std::vector<double>>& dist,
                                        const std::vector<int>& labels) {
    const std::size_t n = labels.size();
    if (dist.size() != n) throw std::invalid_argument("silhouette: size mismatch");
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    if (k < 2) throw std::invalid_argument("silhouette: need at least 2 clusters");
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) sizes[static_cast<std::size_t>(l)]++;
    for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] == 0)
            throw std::invalid_argument("silhouette: empty cluster");
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sum_to(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sum_to[static_cast<std::size_t>(labels[j])] += dist[i][j];
        }
        const int own = labels[i];
        const int own_size = sizes[static_cast<std::size_t>(own)];
        if (own_size == 1) continue;  // convention: s(i) = 0 for singleton clusters
        const double a = sum_to[static_cast<std::size_t>(own)] / (own_size - 1);
        double b = std::numeric_limits<double>::max();
        for (int c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, sum_to[static_cast<std::size_t>(c)] / sizes[static_cast<std::size_t>(c)]);
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

inline double silhouette(const Matrix& points, const std::vector<int>& labels) {
    return silhouette_from_distances(distance_matrix(points), labels);
}

// Permutation-adjusted Rand index via the pair-counting contingency table.
inline double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand: length mismatch");
    const double n = static_cast<double>(a.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_joint = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, c] : joint) sum_joint += choose2(c);
    for (const auto& [key, c] : rows) sum_rows += choose2(c);
    for (const auto& [key, c] : cols) sum_cols += choose2(c);
    const double expected = sum_rows * sum_cols / choose2(n);
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;  // both partitions trivial and equal
    return (sum_joint - expected) / denom;
}

}  // namespace framemap::cluster
