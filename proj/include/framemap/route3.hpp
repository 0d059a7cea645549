#pragma once

// Geometric prediction route: n-gram + style feature matrices, quartile and
// quadrant targets from the consensus map, random-forest ensembles over a
// tree-count grid, and confusion/importance summaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "framemap/consensus.hpp"
#include "framemap/forest.hpp"
#include "framemap/linguistics.hpp"
#include "framemap/tokenize.hpp"

namespace framemap::route3 {

using Matrix = forest::Matrix;

struct FeatureMatrix {
    std::vector<std::string> names;  // n-gram columns first, then style columns
    Matrix rows;
    std::size_t ngram_columns = 0;
};

// Count features for the corpus-wide top_n most frequent n-grams (lengths 1
// to ngram_max), plus the named style columns.
inline FeatureMatrix build_features(
    const std::vector<std::vector<std::string>>& section_tokens,
    const std::vector<ling::LinguisticProfile>& profiles,
    const std::vector<double>& confidences, std::size_t top_n = 12000, int ngram_max = 3) {
    if (section_tokens.empty()) throw std::invalid_argument("build_features: empty corpus");
    if (section_tokens.size() != profiles.size() || profiles.size() != confidences.size()) {
        throw std::invalid_argument("build_features: size mismatch");
    }

    std::unordered_map<std::string, long long> freq;
    std::vector<std::vector<std::string>> section_ngrams(section_tokens.size());
    for (std::size_t i = 0; i < section_tokens.size(); ++i) {
        section_ngrams[i] = text::ngrams(section_tokens[i], ngram_max);
        for (const auto& g : section_ngrams[i]) freq[g]++;
    }
    std::vector<std::pair<std::string, long long>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_n) ranked.resize(top_n);

    FeatureMatrix fm;
    fm.ngram_columns = ranked.size();
    std::unordered_map<std::string, std::size_t> col_of;
    for (std::size_t c = 0; c < ranked.size(); ++c) {
        fm.names.push_back(ranked[c].first);
        col_of[ranked[c].first] = c;
    }
    const std::vector<std::string> style = {"lexical_diversity", "log_fk_grade",
                                            "tb_subjectivity",   "tb_polarity",
                                            "tw_sent",           "prob_consensus"};
    for (const auto& s : style) fm.names.push_back(s);

    fm.rows.assign(section_tokens.size(), std::vector<double>(fm.names.size(), 0.0));
    for (std::size_t i = 0; i < section_tokens.size(); ++i) {
        auto& row = fm.rows[i];
        for (const auto& g : section_ngrams[i]) {
            const auto it = col_of.find(g);
            if (it != col_of.end()) row[it->second] += 1.0;
        }
        const auto& p = profiles[i];
        std::size_t c = fm.ngram_columns;
        row[c++] = p.lexical_diversity;
        row[c++] = std::log(1.0 + std::max(p.fk_grade, 0.0));
        row[c++] = p.tb_subjectivity;
        row[c++] = p.tb_polarity;
        row[c++] = p.tw_sent;
        row[c] = confidences[i];
    }
    return fm;
}

struct GeoTargets {
    std::vector<int> d1_q;   // 1..4, rank quartiles on d1
    std::vector<int> d2_q;   // 1..4, rank quartiles on d2
    std::vector<int> quad4;  // 1..4, sign quadrants
};

namespace detail {

// Rank quartiles: label 1 = lowest quarter; value ties break by input order.
inline std::vector<int> rank_quartiles(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    std::vector<int> labels(n, 0);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const int bin = static_cast<int>(4 * rank / n) + 1;
        labels[order[rank]] = bin;
    }
    return labels;
}

}  // namespace detail

inline GeoTargets make_targets(const Matrix& axes) {
    if (axes.empty()) throw std::invalid_argument("make_targets: empty map");
    std::vector<double> d1(axes.size()), d2(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        d1[i] = axes[i][0];
        d2[i] = axes[i][1];
    }
    for (const auto* axis : {&d1, &d2}) {
        if (std::all_of(axis->begin(), axis->end(),
                        [&](double v) { return v == (*axis)[0]; })) {
            throw std::invalid_argument("make_targets: constant axis");
        }
    }
    GeoTargets t;
    t.d1_q = detail::rank_quartiles(d1);
    t.d2_q = detail::rank_quartiles(d2);
    t.quad4.reserve(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        t.quad4.push_back(consensus::quadrant_of(d1[i], d2[i]));
    }
    return t;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Stratified holdout: shuffle each class's members with a seeded generator
// and send ~test_fraction of each class to the test side.
inline SplitIndices stratified_split(const std::vector<int>& y, double test_fraction,
                                     std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    SplitIndices split;
    for (auto& [label, members] : by_class) {
        det::Rng rng(det::mix(seed, static_cast<std::uint64_t>(label) + 0x73706c69ULL));
        rng.shuffle(members);
        std::size_t n_test = static_cast<std::size_t>(
            std::floor(test_fraction * static_cast<double>(members.size()) + 0.5));
        if (n_test >= members.size()) n_test = members.size() - 1;
        for (std::size_t i = 0; i < members.size(); ++i) {
            (i < n_test ? split.test : split.train).push_back(members[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    if (split.train.empty()) throw std::invalid_argument("stratification failed");
    std::map<int, bool> in_train;
    for (auto i : split.train) in_train[y[i]] = true;
    for (const auto& [label, members] : by_class) {
        if (!in_train.count(label)) throw std::invalid_argument("stratification failed");
    }
    return split;
}

inline std::vector<int> default_tree_counts() { return {500, 1000, 2000, 3000, 4000, 5000}; }

struct EnsembleResult {
    std::string target;
    std::vector<int> tree_counts;
    std::vector<int> classes;  // sorted class labels over all of y
    std::vector<std::size_t> test_indices;
    std::vector<std::vector<int>> per_classifier;  // test predictions per grid entry
    std::vector<int> ensembled;                    // majority vote, ties -> smallest label
    std::vector<std::vector<long long>> confusion; // rows: true class, cols: predicted
    std::vector<std::vector<double>> confusion_norm;
    double weighted_accuracy = 0.0;
    double macro_accuracy = 0.0;
    std::vector<double> importances;  // min-max normalized per classifier, averaged
};

inline EnsembleResult train_rf_ensemble(const Matrix& x, const std::vector<int>& y,
                                        const std::string& target_name,
                                        const std::vector<int>& tree_counts,
                                        std::uint64_t split_seed,
                                        double test_fraction = 0.2) {
    if (x.size() != y.size()) throw std::invalid_argument("train_rf_ensemble: size mismatch");
    if (x.size() < 40) throw std::invalid_argument("train_rf_ensemble: need at least 40 rows");
    if (tree_counts.empty()) throw std::invalid_argument("train_rf_ensemble: empty grid");

    EnsembleResult res;
    res.target = target_name;
    res.tree_counts = tree_counts;
    res.classes = y;
    std::sort(res.classes.begin(), res.classes.end());
    res.classes.erase(std::unique(res.classes.begin(), res.classes.end()), res.classes.end());
    if (res.classes.size() < 2) throw std::invalid_argument("train_rf_ensemble: single class");

    const auto split = stratified_split(y, test_fraction, split_seed);
    res.test_indices = split.test;
    Matrix x_train, x_test;
    std::vector<int> y_train, y_test;
    for (auto i : split.train) {
        x_train.push_back(x[i]);
        y_train.push_back(y[i]);
    }
    for (auto i : split.test) {
        x_test.push_back(x[i]);
        y_test.push_back(y[i]);
    }

    const std::size_t p = x[0].size();
    res.importances.assign(p, 0.0);
    for (std::size_t g = 0; g < tree_counts.size(); ++g) {
        forest::RandomForest rf(tree_counts[g], det::mix(split_seed, g + 0x7266ULL));
        rf.fit(x_train, y_train);
        res.per_classifier.push_back(rf.predict(x_test));
        const auto& imp = rf.importances();
        double lo = imp[0], hi = imp[0];
        for (double v : imp) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi > lo) {
            for (std::size_t f = 0; f < p; ++f) res.importances[f] += (imp[f] - lo) / (hi - lo);
        }
    }
    for (auto& v : res.importances) v /= static_cast<double>(tree_counts.size());

    // majority vote across grid entries; ties toward the smallest label
    res.ensembled.resize(y_test.size());
    for (std::size_t i = 0; i < y_test.size(); ++i) {
        std::map<int, int> votes;
        for (const auto& preds : res.per_classifier) votes[preds[i]]++;
        int best_label = res.per_classifier[0][i];
        int best_votes = 0;
        for (const auto& [label, v] : votes) {
            if (v > best_votes) {
                best_votes = v;
                best_label = label;
            }
        }
        res.ensembled[i] = best_label;
    }

    const std::size_t k = res.classes.size();
    auto class_index = [&](int label) {
        return static_cast<std::size_t>(
            std::lower_bound(res.classes.begin(), res.classes.end(), label) -
            res.classes.begin());
    };
    res.confusion.assign(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < y_test.size(); ++i) {
        res.confusion[class_index(y_test[i])][class_index(res.ensembled[i])]++;
    }
    res.confusion_norm.assign(k, std::vector<double>(k, 0.0));
    long long total = 0, diag = 0;
    double macro_sum = 0.0;
    std::size_t macro_rows = 0;
    for (std::size_t r = 0; r < k; ++r) {
        long long row_total = 0;
        for (auto c : res.confusion[r]) row_total += c;
        total += row_total;
        diag += res.confusion[r][r];
        if (row_total > 0) {
            for (std::size_t c = 0; c < k; ++c) {
                res.confusion_norm[r][c] =
                    static_cast<double>(res.confusion[r][c]) / static_cast<double>(row_total);
            }
            macro_sum += res.confusion_norm[r][r];
            ++macro_rows;
        }
    }
    res.weighted_accuracy = total > 0 ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
    res.macro_accuracy = macro_rows > 0 ? macro_sum / static_cast<double>(macro_rows) : 0.0;
    return res;
}

struct ImportanceRow {
    std::string feature;
    std::vector<double> per_target;
    double mean = 0.0;
};

inline std::vector<ImportanceRow> importance_summary(
    const std::vector<EnsembleResult>& results, const std::vector<std::string>& feature_names,
    std::size_t top_k = 15) {
    if (results.empty()) throw std::invalid_argument("importance_summary: no results");
    for (const auto& r : results) {
        if (r.importances.size() != feature_names.size()) {
            throw std::invalid_argument("importance_summary: feature-space mismatch");
        }
    }
    std::vector<ImportanceRow> rows(feature_names.size());
    for (std::size_t f = 0; f < feature_names.size(); ++f) {
        rows[f].feature = feature_names[f];
        double sum = 0.0;
        for (const auto& r : results) {
            rows[f].per_target.push_back(r.importances[f]);
            sum += r.importances[f];
        }
        rows[f].mean = sum / static_cast<double>(results.size());
    }
    std::sort(rows.begin(), rows.end(), [](const ImportanceRow& a, const ImportanceRow& b) {
        if (a.mean != b.mean) return a.mean > b.mean;
        return a.feature < b.feature;
    });
    if (rows.size() > top_k) rows.resize(top_k);
    return rows;
}

}  // namespace framemap::route3
