#pragma once

// Seeded random-forest classifier: CART trees on bootstrap samples, Gini
// splits over sqrt(P) sampled features, majority-vote prediction, and
// per-tree-normalized impurity importances averaged across the forest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "framemap/rng.hpp"

namespace framemap::forest {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;  // >= 0 marks a leaf
};

inline double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

inline int majority(const std::vector<int>& counts) {
    int best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    return best;
}

}  // namespace detail

class RandomForest {
public:
    RandomForest(int n_trees, std::uint64_t seed) : n_trees_(n_trees), seed_(seed) {
        if (n_trees < 1) throw std::invalid_argument("RandomForest: need at least one tree");
    }

    void fit(const Matrix& x, const std::vector<int>& y) {
        if (x.empty() || x.size() != y.size()) {
            throw std::invalid_argument("RandomForest::fit: bad shapes");
        }
        n_features_ = x[0].size();
        classes_ = y;
        std::sort(classes_.begin(), classes_.end());
        classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
        std::vector<int> y0(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y0[i] = static_cast<int>(
                std::lower_bound(classes_.begin(), classes_.end(), y[i]) - classes_.begin());
        }
        mtry_ = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features_))));

        trees_.clear();
        importances_.assign(n_features_, 0.0);
        std::vector<double> tree_imp(n_features_, 0.0);
        for (int t = 0; t < n_trees_; ++t) {
            det::Rng rng(det::mix(seed_, static_cast<std::uint64_t>(t) + 1));
            std::vector<std::size_t> sample(x.size());
            for (auto& s : sample) s = rng.below(x.size());
            std::fill(tree_imp.begin(), tree_imp.end(), 0.0);
            trees_.emplace_back();
            build_node(trees_.back(), x, y0, sample, rng, tree_imp);
            double total = 0.0;
            for (double v : tree_imp) total += v;
            if (total > 0.0) {
                for (std::size_t f = 0; f < n_features_; ++f) {
                    importances_[f] += tree_imp[f] / total;
                }
            }
        }
        for (auto& v : importances_) v /= n_trees_;
    }

    int predict(const std::vector<double>& row) const {
        std::vector<int> votes(classes_.size(), 0);
        for (const auto& tree : trees_) {
            int node = 0;
            while (tree[static_cast<std::size_t>(node)].label < 0) {
                const auto& nd = tree[static_cast<std::size_t>(node)];
                node = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                                 : nd.right;
            }
            votes[static_cast<std::size_t>(tree[static_cast<std::size_t>(node)].label)]++;
        }
        return classes_[static_cast<std::size_t>(detail::majority(votes))];
    }

    std::vector<int> predict(const Matrix& x) const {
        std::vector<int> out;
        out.reserve(x.size());
        for (const auto& row : x) out.push_back(predict(row));
        return out;
    }

    const std::vector<double>& importances() const { return importances_; }
    const std::vector<int>& classes() const { return classes_; }
    int n_trees() const { return n_trees_; }

private:
    using TreeNodes = std::vector<detail::Node>;

    void build_node(TreeNodes& tree, const Matrix& x, const std::vector<int>& y,
                    const std::vector<std::size_t>& idx, det::Rng& rng,
                    std::vector<double>& imp) {
        const int node_id = static_cast<int>(tree.size());
        tree.emplace_back();

        std::vector<int> counts(classes_.size(), 0);
        for (auto i : idx) counts[static_cast<std::size_t>(y[i])]++;
        const double node_gini = detail::gini(counts, static_cast<int>(idx.size()));
        if (node_gini == 0.0 || idx.size() < 2) {
            tree[static_cast<std::size_t>(node_id)].label = detail::majority(counts);
            return;
        }

        // sample mtry distinct features (partial Fisher-Yates over 0..P-1)
        std::vector<std::size_t> feats(n_features_);
        std::iota(feats.begin(), feats.end(), 0);
        for (std::size_t f = 0; f < mtry_; ++f) {
            std::swap(feats[f], feats[f + rng.below(n_features_ - f)]);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_decrease = 0.0;
        std::vector<std::pair<double, int>> vals(idx.size());
        std::vector<int> left_counts(classes_.size());
        for (std::size_t f = 0; f < mtry_; ++f) {
            const std::size_t feat = feats[f];
            for (std::size_t r = 0; r < idx.size(); ++r) {
                vals[r] = {x[idx[r]][feat], y[idx[r]]};
            }
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;
            std::fill(left_counts.begin(), left_counts.end(), 0);
            for (std::size_t r = 0; r + 1 < vals.size(); ++r) {
                left_counts[static_cast<std::size_t>(vals[r].second)]++;
                if (vals[r].first == vals[r + 1].first) continue;
                const int nl = static_cast<int>(r + 1);
                const int nr = static_cast<int>(vals.size()) - nl;
                double left_sq = 0.0, right_sq = 0.0;
                for (std::size_t c = 0; c < classes_.size(); ++c) {
                    const double lc = left_counts[c];
                    const double rc = counts[c] - left_counts[c];
                    left_sq += lc * lc;
                    right_sq += rc * rc;
                }
                const double gl = 1.0 - left_sq / (static_cast<double>(nl) * nl);
                const double gr = 1.0 - right_sq / (static_cast<double>(nr) * nr);
                const double decrease =
                    node_gini - (nl * gl + nr * gr) / static_cast<double>(vals.size());
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = static_cast<int>(feat);
                    best_threshold = (vals[r].first + vals[r + 1].first) / 2.0;
                }
            }
        }

        if (best_feature < 0) {
            tree[static_cast<std::size_t>(node_id)].label = detail::majority(counts);
            return;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (auto i : idx) {
            (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_idx
                                                                            : right_idx)
                .push_back(i);
        }
        imp[static_cast<std::size_t>(best_feature)] +=
            static_cast<double>(idx.size()) * best_decrease;

        tree[static_cast<std::size_t>(node_id)].feature = best_feature;
        tree[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const int left_id = static_cast<int>(tree.size());
        tree[static_cast<std::size_t>(node_id)].left = left_id;
        build_node(tree, x, y, left_idx, rng, imp);
        const int right_id = static_cast<int>(tree.size());
        tree[static_cast<std::size_t>(node_id)].right = right_id;
        build_node(tree, x, y, right_idx, rng, imp);
    }

    int n_trees_;
    std::uint64_t seed_;
    std::size_t n_features_ = 0;
    std::size_t mtry_ = 1;
    std::vector<int> classes_;
    std::vector<TreeNodes> trees_;
    std::vector<double> importances_;
};

}  // namespace framemap::forest
