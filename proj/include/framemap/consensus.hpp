#pragma once

// Consensus 2-D map: orthogonal Procrustes alignment of per-seed projections
// onto a reference run, averaged axes, anchor-based sign orientation, and
// derived topic geometry / pole vocabulary summaries.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "framemap/projection.hpp"

namespace framemap::consensus {

using Matrix = proj::Matrix;

struct ProcrustesResult {
    Matrix reference;  // centered, unit Frobenius norm
    Matrix aligned;    // other matrix mapped onto the reference
    double scale = 0.0;
    double disparity = 0.0;  // squared Frobenius distance after alignment
};

inline ProcrustesResult procrustes_align(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("procrustes_align: shape mismatch");
    }
    Eigen::MatrixXd ma = proj::to_eigen(a);
    Eigen::MatrixXd mb = proj::to_eigen(b);
    if (ma.cols() != mb.cols()) throw std::invalid_argument("procrustes_align: shape mismatch");
    ma.rowwise() -= ma.colwise().mean().eval();
    mb.rowwise() -= mb.colwise().mean().eval();
    const double na = ma.norm();
    const double nb = mb.norm();
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("procrustes_align: degenerate (zero-variance) input");
    }
    ma /= na;
    mb /= nb;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ma.transpose() * mb,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd r = svd.matrixU() * svd.matrixV().transpose();
    const double s = svd.singularValues().sum();
    const Eigen::MatrixXd aligned = s * mb * r.transpose();

    ProcrustesResult res;
    res.reference = proj::from_eigen(ma);
    res.aligned = proj::from_eigen(aligned);
    res.scale = s;
    res.disparity = (ma - aligned).squaredNorm();
    return res;
}

struct ConsensusResult {
    Matrix axes;                      // N x 2, mean of aligned runs
    std::vector<double> disparities;  // per run; 0 for the reference run
};

inline ConsensusResult consensus_axes(const std::vector<Matrix>& runs,
                                      std::size_t reference_index = 0) {
    if (runs.empty()) throw std::invalid_argument("consensus_axes: no runs");
    if (reference_index >= runs.size()) {
        throw std::invalid_argument("consensus_axes: reference index out of range");
    }
    const std::size_t n = runs[reference_index].size();

    // standardize the reference the same way alignment does
    Eigen::MatrixXd ref = proj::to_eigen(runs[reference_index]);
    ref.rowwise() -= ref.colwise().mean().eval();
    const double ref_norm = ref.norm();
    if (ref_norm == 0.0) throw std::invalid_argument("consensus_axes: degenerate reference");
    ref /= ref_norm;
    const Matrix ref_std = proj::from_eigen(ref);

    ConsensusResult res;
    res.disparities.assign(runs.size(), 0.0);
    res.axes.assign(n, std::vector<double>(2, 0.0));
    for (std::size_t r = 0; r < runs.size(); ++r) {
        Matrix contribution;
        if (r == reference_index) {
            contribution = ref_std;
        } else {
            auto pr = procrustes_align(runs[reference_index], runs[r]);
            contribution = std::move(pr.aligned);
            res.disparities[r] = pr.disparity;
        }
        for (std::size_t i = 0; i < n; ++i) {
            res.axes[i][0] += contribution[i][0];
            res.axes[i][1] += contribution[i][1];
        }
    }
    for (auto& row : res.axes) {
        row[0] /= static_cast<double>(runs.size());
        row[1] /= static_cast<double>(runs.size());
    }
    return res;
}

// Per-axis min-max rescale onto [-1, 1]; a constant axis collapses to 0.
inline void rescale_axes(Matrix& axes) {
    if (axes.empty()) return;
    for (std::size_t c = 0; c < axes[0].size(); ++c) {
        double lo = axes[0][c], hi = axes[0][c];
        for (const auto& row : axes) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        for (auto& row : axes) {
            row[c] = hi > lo ? 2.0 * (row[c] - lo) / (hi - lo) - 1.0 : 0.0;
        }
    }
}

struct AnchorSet {
    std::vector<std::string> d1_positive = {"neural", "model", "training"};
    std::vector<std::string> d2_positive = {"copyright", "lawsuit", "statutory"};
};

struct OrientResult {
    bool flipped_d1 = false;
    bool flipped_d2 = false;
    bool matched_d1 = false;
    bool matched_d2 = false;
};

// Flips each axis so sections containing the positive-pole anchor terms sit,
// on average, on the positive side. Axes with no anchor hits are left alone.
inline OrientResult orient_axes(Matrix& axes,
                                const std::vector<std::vector<std::string>>& section_tokens,
                                const AnchorSet& anchors = {}) {
    if (axes.size() != section_tokens.size()) {
        throw std::invalid_argument("orient_axes: size mismatch");
    }
    OrientResult res;
    const std::vector<std::string>* anchor_lists[2] = {&anchors.d1_positive,
                                                       &anchors.d2_positive};
    bool* matched[2] = {&res.matched_d1, &res.matched_d2};
    bool* flipped[2] = {&res.flipped_d1, &res.flipped_d2};
    for (int axis = 0; axis < 2; ++axis) {
        double sum = 0.0;
        int hits = 0;
        for (std::size_t i = 0; i < section_tokens.size(); ++i) {
            bool hit = false;
            for (const auto& tok : section_tokens[i]) {
                for (const auto& anchor : *anchor_lists[axis]) {
                    if (tok == anchor) {
                        hit = true;
                        break;
                    }
                }
                if (hit) break;
            }
            if (hit) {
                sum += axes[i][static_cast<std::size_t>(axis)];
                ++hits;
            }
        }
        if (hits > 0) {
            *matched[axis] = true;
            if (sum / hits < 0.0) {
                *flipped[axis] = true;
                for (auto& row : axes) {
                    row[static_cast<std::size_t>(axis)] = -row[static_cast<std::size_t>(axis)];
                }
            }
        }
    }
    return res;
}

// Quadrants use the mathematical convention; a zero coordinate counts as
// positive so every topic lands in exactly one quadrant.
inline int quadrant_of(double d1, double d2) {
    if (d1 >= 0.0) return d2 >= 0.0 ? 1 : 4;
    return d2 >= 0.0 ? 2 : 3;
}

struct TopicGeometry {
    int topic_id = 0;
    int size = 0;
    double d1 = 0.0;
    double d2 = 0.0;
    int quadrant = 0;
};

inline std::vector<TopicGeometry> topic_geometry(const Matrix& axes,
                                                 const std::vector<int>& labels, int k) {
    if (axes.size() != labels.size()) throw std::invalid_argument("topic_geometry: size mismatch");
    std::vector<TopicGeometry> out(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) out[static_cast<std::size_t>(c)].topic_id = c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& t = out[static_cast<std::size_t>(labels[i])];
        t.size++;
        t.d1 += axes[i][0];
        t.d2 += axes[i][1];
    }
    for (auto& t : out) {
        if (t.size > 0) {
            t.d1 /= t.size;
            t.d2 /= t.size;
        }
        t.quadrant = quadrant_of(t.d1, t.d2);
    }
    return out;
}

struct PoleVocab {
    std::string axis;  // "d1" or "d2"
    std::string pole;  // "positive" or "negative"
    std::vector<std::pair<std::string, long long>> terms;
};

// Uni/bigram counts over the extreme tail of each axis, keeping only terms
// absent from the opposite tail so the two pole lists never overlap.
inline std::vector<PoleVocab> axis_extreme_vocab(
    const Matrix& axes, const std::vector<std::vector<std::string>>& section_tokens,
    double fraction = 0.05, std::size_t top_n = 20) {
    if (axes.size() != section_tokens.size()) {
        throw std::invalid_argument("axis_extreme_vocab: size mismatch");
    }
    const std::size_t n = axes.size();
    const std::size_t n_take =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));

    auto count_ngrams = [&](const std::vector<std::size_t>& idxs) {
        std::map<std::string, long long> counts;
        for (auto i : idxs) {
            const auto& toks = section_tokens[i];
            for (std::size_t t = 0; t < toks.size(); ++t) {
                counts[toks[t]]++;
                if (t + 1 < toks.size()) counts[toks[t] + " " + toks[t + 1]]++;
            }
        }
        return counts;
    };

    std::vector<PoleVocab> out;
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = axes[a][static_cast<std::size_t>(axis)];
            const double vb = axes[b][static_cast<std::size_t>(axis)];
            if (va != vb) return va > vb;
            return a < b;
        });
        std::vector<std::size_t> pos(order.begin(),
                                     order.begin() + static_cast<std::ptrdiff_t>(n_take));
        std::vector<std::size_t> neg(order.end() - static_cast<std::ptrdiff_t>(n_take),
                                     order.end());
        const auto pos_counts = count_ngrams(pos);
        const auto neg_counts = count_ngrams(neg);

        auto pick = [&](const std::map<std::string, long long>& own,
                        const std::map<std::string, long long>& other) {
            std::vector<std::pair<std::string, long long>> ranked;
            for (const auto& [term, c] : own) {
                if (!other.count(term)) ranked.push_back({term, c});
            }
            std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            if (ranked.size() > top_n) ranked.resize(top_n);
            return ranked;
        };
        const std::string axis_name = axis == 0 ? "d1" : "d2";
        out.push_back({axis_name, "positive", pick(pos_counts, neg_counts)});
        out.push_back({axis_name, "negative", pick(neg_counts, pos_counts)});
    }
    return out;
}

}  // namespace framemap::consensus
