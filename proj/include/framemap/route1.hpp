#pragma once

// Distributional frame alignment: clamped half-axis products turn consensus
// coordinates into per-section frame weights, whose corpus means are tested
// against survey benchmark proportions with one-sample z-tests.

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "framemap/stats.hpp"

namespace framemap::route1 {

struct FrameSign {
    std::string name;
    int sign_d1 = 1;
    int sign_d2 = 1;
};

inline std::vector<FrameSign> default_frame_signs() {
    return {{"Threat", -1, -1},
            {"Utility", +1, -1},
            {"Transparency", +1, +1},
            {"Ownership", -1, +1}};
}

// Survey benchmark in the same frame order, before normalization.
inline std::vector<double> default_benchmark_raw() { return {0.619, 0.449, 0.802, 0.414}; }

inline void validate_signs(const std::vector<FrameSign>& signs) {
    std::set<std::pair<int, int>> seen;
    for (const auto& f : signs) {
        if ((f.sign_d1 != 1 && f.sign_d1 != -1) || (f.sign_d2 != 1 && f.sign_d2 != -1)) {
            throw std::invalid_argument("frame sign must be +1 or -1");
        }
        if (!seen.insert({f.sign_d1, f.sign_d2}).second) {
            throw std::invalid_argument("frames must occupy distinct sign pairs");
        }
    }
}

// Weights per frame for one section at rescaled coordinates (d1, d2).
// raw_f = max(s1*d1, 0) * max(s2*d2, 0); zero total mass goes uniform.
inline std::vector<double> frame_weights(double d1, double d2,
                                         const std::vector<FrameSign>& signs) {
    std::vector<double> raw(signs.size(), 0.0);
    double total = 0.0;
    for (std::size_t f = 0; f < signs.size(); ++f) {
        const double a = std::max(signs[f].sign_d1 * d1, 0.0);
        const double b = std::max(signs[f].sign_d2 * d2, 0.0);
        raw[f] = a * b;
        total += raw[f];
    }
    if (total == 0.0) {
        const double uniform = 1.0 / static_cast<double>(signs.size());
        for (auto& w : raw) w = uniform;
        return raw;
    }
    for (auto& w : raw) w /= total;
    return raw;
}

inline std::vector<std::vector<double>> frame_weight_matrix(
    const std::vector<std::vector<double>>& axes, const std::vector<FrameSign>& signs) {
    validate_signs(signs);
    std::vector<std::vector<double>> out;
    out.reserve(axes.size());
    for (const auto& row : axes) out.push_back(frame_weights(row[0], row[1], signs));
    return out;
}

inline std::vector<double> mean_weights(const std::vector<std::vector<double>>& weights) {
    if (weights.empty()) throw std::invalid_argument("mean_weights: empty");
    std::vector<double> mean(weights[0].size(), 0.0);
    for (const auto& row : weights) {
        for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += row[f];
    }
    for (auto& m : mean) m /= static_cast<double>(weights.size());
    return mean;
}

inline std::vector<double> normalize_benchmark(const std::vector<double>& raw) {
    double total = 0.0;
    for (double v : raw) {
        if (v < 0.0) throw std::invalid_argument("benchmark values must be nonnegative");
        total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("benchmark sums to zero");
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / total;
    return out;
}

struct ZTestResult {
    std::string frame;
    double p_hat = 0.0;
    double p0 = 0.0;
    double z = 0.0;
    double p_value = 1.0;
};

// One-sample proportion z-test with the sample proportion in the variance.
inline std::pair<double, double> ztest_proportion(double p_hat, double p0, std::size_t n) {
    if (p_hat <= 0.0 || p_hat >= 1.0) throw std::invalid_argument("degenerate proportion");
    if (n == 0) throw std::invalid_argument("ztest_proportion: n must be positive");
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
    const double z = (p_hat - p0) / se;
    return {z, stats::two_sided_p(z)};
}

inline std::vector<ZTestResult> route1_table(const std::vector<double>& p_hat,
                                             const std::vector<double>& benchmark,
                                             std::size_t n,
                                             const std::vector<FrameSign>& signs) {
    if (p_hat.size() != benchmark.size() || p_hat.size() != signs.size()) {
        throw std::invalid_argument("route1_table: size mismatch");
    }
    std::vector<ZTestResult> out;
    out.reserve(signs.size());
    for (std::size_t f = 0; f < signs.size(); ++f) {
        ZTestResult r;
        r.frame = signs[f].name;
        r.p_hat = p_hat[f];
        r.p0 = benchmark[f];
        auto [z, p] = ztest_proportion(p_hat[f], benchmark[f], n);
        r.z = z;
        r.p_value = p;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace framemap::route1
