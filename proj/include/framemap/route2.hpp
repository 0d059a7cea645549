#pragma once

// Prototype-similarity route: per-section cosine similarity to frame
// prototype sentences, yearly aggregation, and pre/post milestone rank-sum
// tests with Benjamini-Hochberg correction within each frame.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "framemap/embedding.hpp"
#include "framemap/stats.hpp"

namespace framemap::route2 {

using PrototypeSet = std::map<std::string, std::vector<std::string>>;

inline PrototypeSet default_prototypes() {
    return {
        {"Threat",
         {"generative models threaten the livelihoods of working artists",
          "ai image generators put illustrators and designers out of work",
          "artists fear being replaced by automated image synthesis",
          "machine generated art undercuts the market for human creative labor",
          "the spread of ai art endangers creative careers and commissions"}},
        {"Utility",
         {"generative tools help artists work faster and explore new ideas",
          "ai assists the creative process as a powerful new instrument",
          "image models expand what artists can make and lower barriers",
          "practitioners adopt ai to speed up production and prototyping",
          "ai art tools open new markets and creative opportunities"}},
        {"Transparency",
         {"companies should disclose what data trained their models",
          "training datasets must be documented and open to scrutiny",
          "opaque model training hides whether artists work was used",
          "clear provenance labeling of ai generated images is needed",
          "audits of training corpora would make model behavior accountable"}},
        {"Ownership",
         {"artists should keep the rights to works used for training",
          "copyright law must decide who owns machine generated images",
          "lawsuits test whether scraping artwork for training is infringement",
          "consent and licensing should govern the use of artists images",
          "statutory protection for creators against unauthorized training data"}}};
}

inline std::map<int, std::string> default_milestones() {
    return {{2014, "GANs introduced"},
            {2015, "DeepDream release"},
            {2017, "Transformer architecture published"},
            {2018, "Christie's AI art auction; BERT release"},
            {2019, "GPT-2 release"},
            {2020, "GPT-3 public API"},
            {2022, "Stable Diffusion open source; GPT-3.5"},
            {2023, "GPT-4 release; Andersen v. Stability AI lawsuit"},
            {2024, "GPT-4o launch"},
            {2025, "EU AI Act; Christie's AI auction"}};
}

inline std::vector<int> default_split_years() {
    std::vector<int> years;
    for (int y = 2014; y <= 2025; ++y) years.push_back(y);
    return years;
}

// Mean cosine between one section vector and a frame's prototype vectors.
inline double frame_similarity(const embed::Vector& section,
                               const std::vector<embed::Vector>& prototypes) {
    if (prototypes.empty()) throw std::invalid_argument("frame_similarity: empty prototype set");
    double total = 0.0;
    for (const auto& p : prototypes) total += embed::cosine(section, p);
    return total / static_cast<double>(prototypes.size());
}

using YearScores = std::vector<std::pair<int, double>>;  // (year, score) per section

inline std::map<int, double> yearly_mean(const YearScores& scores) {
    std::map<int, std::pair<double, int>> acc;
    for (const auto& [year, score] : scores) {
        acc[year].first += score;
        acc[year].second += 1;
    }
    std::map<int, double> out;
    for (const auto& [year, pair] : acc) out[year] = pair.first / pair.second;
    return out;
}

struct RankSumResult {
    bool na = false;
    double z = 0.0;
    double p = 1.0;
    std::string direction = "none";  // "up" = post ranks higher
};

// Two-sided Mann-Whitney/Wilcoxon rank-sum, normal approximation with
// midranks, tie-corrected variance, and a 0.5 continuity correction.
inline RankSumResult wilcoxon_prepost(const YearScores& values, int split_year) {
    std::vector<double> pre, post;
    for (const auto& [year, score] : values) {
        (year < split_year ? pre : post).push_back(score);
    }
    RankSumResult res;
    if (pre.size() < 2 || post.size() < 2) {
        res.na = true;
        res.direction = "NA";
        return res;
    }
    const std::size_t n1 = pre.size(), n2 = post.size(), n = n1 + n2;
    std::vector<std::pair<double, int>> pooled;  // (value, group: 0 pre / 1 post)
    pooled.reserve(n);
    for (double v : pre) pooled.push_back({v, 0});
    for (double v : post) pooled.push_back({v, 1});
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double post_rank_sum = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t r = i; r < j; ++r) {
            if (pooled[r].second == 1) post_rank_sum += midrank;
        }
        tie_term += t * t * t - t;
        i = j;
    }

    const double dn = static_cast<double>(n);
    const double mu = static_cast<double>(n2) * (dn + 1.0) / 2.0;
    const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                       ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var <= 0.0) return res;  // every value tied: z = 0, p = 1

    double diff = post_rank_sum - mu;
    diff = std::abs(diff) > 0.5 ? diff - (diff > 0.0 ? 0.5 : -0.5) : 0.0;
    res.z = diff / std::sqrt(var);
    res.p = stats::two_sided_p(res.z);
    res.direction = res.z > 0.0 ? "up" : (res.z < 0.0 ? "down" : "none");
    return res;
}

// Benjamini-Hochberg step-up: q_(i) = min over j >= i of p_(j) * m / j.
inline std::vector<double> bh_fdr(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (p_values[a] != p_values[b]) return p_values[a] < p_values[b];
        return a < b;
    });
    std::vector<double> q(m, 0.0);
    double running = 1.0;
    for (std::size_t rank = m; rank >= 1; --rank) {
        const std::size_t idx = order[rank - 1];
        running = std::min(running, p_values[idx] * static_cast<double>(m) /
                                        static_cast<double>(rank));
        q[idx] = running;
    }
    return q;
}

struct PrePostTest {
    std::string frame;
    int split_year = 0;
    bool na = false;
    double z = 0.0;
    double p = 1.0;
    double q = 1.0;
    std::string direction = "NA";
    std::string milestone = "-";
    std::string sig;  // "**" q<0.05, "*" p<0.05, "+" p<0.10
};

// One row per frame x split year; BH runs within each frame across its
// splits, with NA rows entering the correction as p = 1.
inline std::vector<PrePostTest> route2_report(
    const std::vector<std::pair<std::string, YearScores>>& frame_scores,
    const std::map<int, std::string>& milestones, const std::vector<int>& split_years) {
    std::vector<PrePostTest> out;
    for (const auto& [frame, scores] : frame_scores) {
        std::vector<PrePostTest> rows;
        std::vector<double> p_family;
        for (int split : split_years) {
            const auto rs = wilcoxon_prepost(scores, split);
            PrePostTest row;
            row.frame = frame;
            row.split_year = split;
            row.na = rs.na;
            row.z = rs.z;
            row.p = rs.p;
            row.direction = rs.direction;
            const auto it = milestones.find(split);
            row.milestone = it == milestones.end() ? "-" : it->second;
            rows.push_back(std::move(row));
            p_family.push_back(rs.na ? 1.0 : rs.p);
        }
        const auto q = bh_fdr(p_family);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].q = q[i];
            if (!rows[i].na) {
                if (rows[i].q < 0.05) {
                    rows[i].sig = "**";
                } else if (rows[i].p < 0.05) {
                    rows[i].sig = "*";
                } else if (rows[i].p < 0.10) {
                    rows[i].sig = "+";
                }
            }
            out.push_back(std::move(rows[i]));
        }
    }
    return out;
}

}  // namespace framemap::route2
