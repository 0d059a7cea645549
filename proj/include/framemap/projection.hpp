#pragma once

// 2-D projections of the embedding space. Default is a seeded neighbor
// embedding (fuzzy kNN graph + attraction/repulsion SGD); PCA is the exact,
// fast alternative and also supplies the neighbor embedding's init.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "framemap/rng.hpp"

namespace framemap::proj {

using Matrix = std::vector<std::vector<double>>;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
    if (m.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()),
                        static_cast<Eigen::Index>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != m[0].size()) throw std::invalid_argument("ragged matrix");
        for (std::size_t j = 0; j < m[i].size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
        }
    }
    return out;
}

inline Matrix from_eigen(const Eigen::MatrixXd& m) {
    Matrix out(static_cast<std::size_t>(m.rows()),
               std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
        }
    }
    return out;
}

// PCA scores for the top `dims` components. Component signs are fixed so the
// largest-magnitude loading of each component is positive.
inline Matrix pca_project(const Matrix& points, int dims = 2) {
    const std::size_t n = points.size();
    if (n == 0) return {};
    Eigen::MatrixXd x = to_eigen(points);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& u = svd.matrixU();
    const auto& v = svd.matrixV();
    const auto& s = svd.singularValues();
    Matrix out(n, std::vector<double>(static_cast<std::size_t>(dims), 0.0));
    const Eigen::Index avail = std::min<Eigen::Index>(dims, s.size());
    for (Eigen::Index c = 0; c < avail; ++c) {
        Eigen::Index arg = 0;
        v.col(c).cwiseAbs().maxCoeff(&arg);
        const double sign = v(arg, c) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i][static_cast<std::size_t>(c)] =
                sign * u(static_cast<Eigen::Index>(i), c) * s(c);
        }
    }
    return out;
}

namespace detail {

struct KnnGraph {
    std::vector<std::vector<std::size_t>> idx;
    std::vector<std::vector<double>> dist;
};

inline KnnGraph exact_knn(const Matrix& points, std::size_t k) {
    const std::size_t n = points.size();
    KnnGraph g;
    g.idx.assign(n, {});
    g.dist.assign(n, {});
    std::vector<std::pair<double, std::size_t>> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                const double d = points[i][c] - points[j][c];
                d2 += d * d;
            }
            row[j] = {std::sqrt(d2), j};
        }
        row[i].first = std::numeric_limits<double>::max();  // exclude self
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
        for (std::size_t r = 0; r < k; ++r) {
            g.dist[i].push_back(row[r].first);
            g.idx[i].push_back(row[r].second);
        }
        row[i].first = 0.0;
    }
    return g;
}

// Per-point bandwidth calibration: sigma_i solves
// sum_j exp(-(max(0, d_ij - rho_i)) / sigma_i) = log2(k).
inline void smooth_weights(const KnnGraph& g, std::vector<std::vector<double>>& w) {
    const double target = std::log2(static_cast<double>(g.idx[0].size()));
    w.assign(g.idx.size(), {});
    for (std::size_t i = 0; i < g.idx.size(); ++i) {
        double rho = 0.0;
        for (double d : g.dist[i]) {
            if (d > 0.0) {
                rho = d;
                break;
            }
        }
        double lo = 0.0, hi = std::numeric_limits<double>::max(), mid = 1.0;
        for (int it = 0; it < 64; ++it) {
            double sum = 0.0;
            for (double d : g.dist[i]) {
                const double gap = d - rho;
                sum += gap > 0.0 ? std::exp(-gap / mid) : 1.0;
            }
            if (std::abs(sum - target) < 1e-5) break;
            if (sum > target) {
                hi = mid;
                mid = (lo + hi) / 2.0;
            } else {
                lo = mid;
                mid = hi == std::numeric_limits<double>::max() ? mid * 2.0 : (lo + hi) / 2.0;
            }
        }
        w[i].resize(g.dist[i].size());
        for (std::size_t r = 0; r < g.dist[i].size(); ++r) {
            const double gap = g.dist[i][r] - rho;
            w[i][r] = gap > 0.0 ? std::exp(-gap / mid) : 1.0;
        }
    }
}

struct Edge {
    std::size_t head = 0;
    std::size_t tail = 0;
    double weight = 0.0;
};

}  // namespace detail

struct NeighborEmbeddingConfig {
    int n_neighbors = 15;
    int n_epochs = 200;
    double learning_rate = 1.0;
    int negative_sample_rate = 5;
    // curve constants for min_dist 0.1, spread 1.0
    double a = 1.5769434603113077;
    double b = 0.8950608779109733;
};

inline Matrix neighbor_embed(const Matrix& points, std::uint64_t seed,
                             const NeighborEmbeddingConfig& cfg = {}) {
    const std::size_t n = points.size();
    if (n < 4) return pca_project(points, 2);
    const std::size_t k =
        std::min<std::size_t>(std::max(2, cfg.n_neighbors), n - 1);

    auto g = detail::exact_knn(points, k);
    std::vector<std::vector<double>> w;
    detail::smooth_weights(g, w);

    // symmetrize: w_sym = w_ij + w_ji - w_ij * w_ji, listed in both directions
    std::vector<std::vector<double>> dense_w(n);
    std::vector<std::vector<std::size_t>> dense_i(n);
    {
        std::vector<std::vector<std::pair<std::size_t, double>>> directed(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < g.idx[i].size(); ++r) {
                directed[i].push_back({g.idx[i][r], w[i][r]});
            }
        }
        auto lookup = [&](std::size_t a, std::size_t b) {
            for (const auto& [j, val] : directed[a]) {
                if (j == b) return val;
            }
            return 0.0;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& [j, wij] : directed[i]) {
                if (j < i && lookup(j, i) > 0.0) continue;  // already emitted from j
                const double wji = lookup(j, i);
                const double sym = wij + wji - wij * wji;
                dense_i[i].push_back(j);
                dense_w[i].push_back(sym);
                dense_i[j].push_back(i);
                dense_w[j].push_back(sym);
            }
        }
    }
    std::vector<detail::Edge> edges;
    double max_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < dense_i[i].size(); ++r) {
            edges.push_back({i, dense_i[i][r], dense_w[i][r]});
            max_w = std::max(max_w, dense_w[i][r]);
        }
    }
    if (edges.empty() || max_w <= 0.0) return pca_project(points, 2);

    // init from PCA, rescaled to a +-10 box, with a tiny seeded jitter
    Matrix emb = pca_project(points, 2);
    double max_abs = 0.0;
    for (const auto& row : emb) {
        for (double v : row) max_abs = std::max(max_abs, std::abs(v));
    }
    det::Rng rng(det::mix(seed, 0x6e65696768ULL));
    const double scale = max_abs > 0.0 ? 10.0 / max_abs : 1.0;
    for (auto& row : emb) {
        for (double& v : row) v = v * scale + rng.normal() * 1e-4;
    }

    std::vector<double> epochs_per_sample(edges.size());
    std::vector<double> next_sample(edges.size());
    std::vector<double> epochs_per_negative(edges.size());
    std::vector<double> next_negative(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        epochs_per_sample[e] = max_w / edges[e].weight;
        next_sample[e] = epochs_per_sample[e];
        epochs_per_negative[e] = epochs_per_sample[e] / cfg.negative_sample_rate;
        next_negative[e] = epochs_per_negative[e];
    }

    const double a = cfg.a, b = cfg.b;
    auto clamp4 = [](double v) { return std::max(-4.0, std::min(4.0, v)); };
    for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        const double alpha =
            cfg.learning_rate * (1.0 - static_cast<double>(epoch) / cfg.n_epochs);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (next_sample[e] > epoch + 1) continue;
            auto& head = emb[edges[e].head];
            auto& tail = emb[edges[e].tail];
            double d2 = 0.0;
            for (int c = 0; c < 2; ++c) {
                const double d = head[static_cast<std::size_t>(c)] - tail[static_cast<std::size_t>(c)];
                d2 += d * d;
            }
            if (d2 > 0.0) {
                double coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
                for (int c = 0; c < 2; ++c) {
                    const double gd = clamp4(
                        coeff * (head[static_cast<std::size_t>(c)] - tail[static_cast<std::size_t>(c)]));
                    head[static_cast<std::size_t>(c)] += alpha * gd;
                    tail[static_cast<std::size_t>(c)] -= alpha * gd;
                }
            }
            next_sample[e] += epochs_per_sample[e];

            const int n_neg = static_cast<int>((epoch + 1 - next_negative[e]) / epochs_per_negative[e]);
            for (int neg = 0; neg < n_neg; ++neg) {
                const std::size_t other = rng.below(n);
                if (other == edges[e].head) continue;
                auto& point = emb[edges[e].head];
                const auto& off = emb[other];
                double nd2 = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const double d =
                        point[static_cast<std::size_t>(c)] - off[static_cast<std::size_t>(c)];
                    nd2 += d * d;
                }
                double coeff = 2.0 * b / ((0.001 + nd2) * (a * std::pow(nd2, b) + 1.0));
                for (int c = 0; c < 2; ++c) {
                    double gd = 4.0;
                    if (nd2 > 0.0) {
                        gd = clamp4(coeff * (point[static_cast<std::size_t>(c)] -
                                             off[static_cast<std::size_t>(c)]));
                    }
                    point[static_cast<std::size_t>(c)] += alpha * gd;
                }
            }
            next_negative[e] += n_neg * epochs_per_negative[e];
        }
    }
    return emb;
}

// Dispatch on the configured projection method.
inline Matrix project2d(const Matrix& points, const std::string& method, std::uint64_t seed,
                        const NeighborEmbeddingConfig& cfg = {}) {
    if (method == "pca") return pca_project(points, 2);
    if (method == "neighbor") return neighbor_embed(points, seed, cfg);
    throw std::invalid_argument("project2d: unknown method '" + method + "'");
}

}  // namespace framemap::proj
