#pragma once

// Topic-model layer on top of k-means: multi-seed stability scan, K
// selection, class-based TF-IDF term extraction, and assignment confidence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "framemap/cluster.hpp"

namespace framemap::topics {

using cluster::Matrix;

struct ScanEntry {
    int k = 0;
    std::vector<double> silhouettes;  // one per seed, scan seed order
    double mean_silhouette = 0.0;
    double mean_ari = 0.0;  // mean pairwise ARI across seed labelings
};

struct StabilityScan {
    std::vector<std::uint64_t> seeds;
    std::vector<ScanEntry> entries;  // ascending K
};

inline StabilityScan stability_scan(const Matrix& points,
                                    const std::vector<std::uint64_t>& seeds,
                                    int k_min, int k_max) {
    if (seeds.empty()) throw std::invalid_argument("stability_scan: no seeds");
    if (k_min < 2 || k_max < k_min) {
        throw std::invalid_argument("stability_scan: need 2 <= k_min <= k_max");
    }
    const auto dist = cluster::distance_matrix(points);
    StabilityScan scan;
    scan.seeds = seeds;
    for (int k = k_min; k <= k_max; ++k) {
        if (static_cast<std::size_t>(k) > points.size()) break;
        ScanEntry entry;
        entry.k = k;
        std::vector<std::vector<int>> labelings;
        labelings.reserve(seeds.size());
        for (auto seed : seeds) {
            auto run = cluster::kmeans(points, k, seed);
            entry.silhouettes.push_back(
                cluster::silhouette_from_distances(dist, run.labels));
            labelings.push_back(std::move(run.labels));
        }
        double sil_sum = 0.0;
        for (double s : entry.silhouettes) sil_sum += s;
        entry.mean_silhouette = sil_sum / static_cast<double>(seeds.size());
        double ari_sum = 0.0;
        int pairs = 0;
        for (std::size_t a = 0; a < labelings.size(); ++a) {
            for (std::size_t b = a + 1; b < labelings.size(); ++b) {
                ari_sum += cluster::adjusted_rand(labelings[a], labelings[b]);
                ++pairs;
            }
        }
        entry.mean_ari = pairs > 0 ? ari_sum / pairs : 1.0;
        scan.entries.push_back(std::move(entry));
    }
    if (scan.entries.empty()) throw std::invalid_argument("stability_scan: empty K grid");
    return scan;
}

struct KSelection {
    int k = 0;
    bool overridden = false;
    std::string rationale;
};

// Shortlists K values whose silhouette ranks in the top 2 for a majority of
// seeds, then picks the shortlisted K (>= min_k) with the highest mean ARI.
// Falls back to the ARI maximum over K >= min_k when the shortlist is empty.
inline KSelection select_k(const StabilityScan& scan, int min_k = 4, int k_override = 0) {
    KSelection sel;
    std::ostringstream why;
    why.setf(std::ios::fixed);
    why.precision(4);
    if (k_override > 0) {
        sel.k = k_override;
        sel.overridden = true;
        why << "K=" << k_override << " fixed by override; scan consulted for diagnostics only.";
        sel.rationale = why.str();
        return sel;
    }

    const std::size_t n_seeds = scan.seeds.size();
    std::map<int, int> top2_votes;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        std::vector<const ScanEntry*> order;
        for (const auto& e : scan.entries) order.push_back(&e);
        std::sort(order.begin(), order.end(), [&](const ScanEntry* a, const ScanEntry* b) {
            if (a->silhouettes[s] != b->silhouettes[s])
                return a->silhouettes[s] > b->silhouettes[s];
            return a->k < b->k;
        });
        for (std::size_t rank = 0; rank < order.size() && rank < 2; ++rank) {
            top2_votes[order[rank]->k]++;
        }
    }
    std::set<int> shortlist;
    for (const auto& [k, votes] : top2_votes) {
        if (2 * static_cast<std::size_t>(votes) > n_seeds) shortlist.insert(k);
    }

    const ScanEntry* best = nullptr;
    bool from_shortlist = true;
    for (const auto& e : scan.entries) {
        if (e.k < min_k) continue;
        if (!shortlist.count(e.k)) continue;
        if (!best || e.mean_ari > best->mean_ari) best = &e;
    }
    if (!best) {
        from_shortlist = false;
        for (const auto& e : scan.entries) {
            if (e.k < min_k) continue;
            if (!best || e.mean_ari > best->mean_ari) best = &e;
        }
    }
    if (!best) throw std::invalid_argument("select_k: no K >= min_k in scan");

    sel.k = best->k;
    why << "K=" << best->k << " selected (mean ARI " << best->mean_ari
        << ", mean silhouette " << best->mean_silhouette << "). ";
    if (from_shortlist) {
        why << "Shortlist by top-2 silhouette rank across seeds: {";
        bool first = true;
        for (int k : shortlist) {
            if (!first) why << ", ";
            why << k;
            first = false;
        }
        why << "}; highest mean ARI among shortlisted K >= " << min_k << " wins.";
    } else {
        why << "No K >= " << min_k
            << " reached a top-2 silhouette majority; fell back to the ARI maximum over K >= "
            << min_k << ".";
    }
    sel.rationale = why.str();
    return sel;
}

struct TermScore {
    std::string term;
    double score = 0.0;
};

// Class-based TF-IDF: raw term count within the cluster, damped by how
// common the term is corpus-wide relative to the average cluster length.
inline std::vector<std::vector<TermScore>> ctfidf_terms(
    const std::vector<std::vector<std::string>>& section_tokens,
    const std::vector<int>& labels, int k, std::size_t top_n = 10) {
    if (section_tokens.size() != labels.size()) {
        throw std::invalid_argument("ctfidf_terms: size mismatch");
    }
    std::vector<std::unordered_map<std::string, double>> tf(static_cast<std::size_t>(k));
    std::unordered_map<std::string, double> corpus_freq;
    double total_tokens = 0.0;
    for (std::size_t i = 0; i < section_tokens.size(); ++i) {
        const int c = labels[i];
        if (c < 0 || c >= k) throw std::invalid_argument("ctfidf_terms: label out of range");
        for (const auto& tok : section_tokens[i]) {
            tf[static_cast<std::size_t>(c)][tok] += 1.0;
            corpus_freq[tok] += 1.0;
            total_tokens += 1.0;
        }
    }
    const double avg_cluster_tokens = total_tokens / static_cast<double>(k);

    std::vector<std::vector<TermScore>> out(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        auto& scored = out[static_cast<std::size_t>(c)];
        scored.reserve(tf[static_cast<std::size_t>(c)].size());
        for (const auto& [term, count] : tf[static_cast<std::size_t>(c)]) {
            const double idf = std::log(1.0 + avg_cluster_tokens / corpus_freq[term]);
            scored.push_back({term, count * idf});
        }
        std::sort(scored.begin(), scored.end(), [](const TermScore& a, const TermScore& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.term < b.term;
        });
        if (scored.size() > top_n) scored.resize(top_n);
    }
    return out;
}

// Soft assignment weight of each point's own cluster: inverse-distance
// weights over all centroids, normalized to sum to one.
inline std::vector<double> cluster_confidence(const Matrix& points,
                                              const Matrix& centroids,
                                              const std::vector<int>& labels) {
    constexpr double kEps = 1e-12;
    std::vector<double> conf(points.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double total = 0.0;
        double own = 0.0;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double w = 1.0 / (std::sqrt(cluster::sq_dist(points[i], centroids[c])) + kEps);
            total += w;
            if (static_cast<int>(c) == labels[i]) own = w;
        }
        conf[i] = own / total;
    }
    return conf;
}

struct TopicSummary {
    int topic_id = 0;
    int size = 0;
    double share = 0.0;
    std::string label;
    std::vector<TermScore> top_terms;
};

inline std::vector<TopicSummary> summarize_topics(
    const std::vector<std::vector<std::string>>& section_tokens,
    const std::vector<int>& labels, int k, std::size_t top_n = 10) {
    auto terms = ctfidf_terms(section_tokens, labels, k, top_n);
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) sizes[static_cast<std::size_t>(l)]++;
    std::vector<TopicSummary> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        TopicSummary t;
        t.topic_id = c;
        t.size = sizes[static_cast<std::size_t>(c)];
        t.share = labels.empty() ? 0.0
                                 : static_cast<double>(t.size) / static_cast<double>(labels.size());
        t.top_terms = terms[static_cast<std::size_t>(c)];
        std::string label;
        for (std::size_t j = 0; j < t.top_terms.size() && j < 3; ++j) {
            if (!label.empty()) label += "-";
            label += t.top_terms[j].term;
        }
        t.label = label.empty() ? ("topic" + std::to_string(c)) : label;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace framemap::topics
