#pragma once

// Per-section style metrics: readability, lexical diversity, article length,
// and pluggable sentiment/subjectivity scorers, plus correlation matrices
// and per-topic temporal aggregates.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "framemap/stats.hpp"
#include "framemap/tokenize.hpp"

namespace framemap::ling {

// -- readability --------------------------------------------------------------

// Vowel-group syllable count with a silent-e correction; minimum one.
inline int count_syllables(const std::string& word) {
    std::string w;
    for (char c : word) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (w.empty()) return 0;
    auto is_vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    };
    int groups = 0;
    bool in_group = false;
    for (char c : w) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if (groups > 1 && w.size() >= 2 && w.back() == 'e' && !is_vowel(w[w.size() - 2])) {
        // silent final e ("code", "e" after consonant), but keep "-le" ("table")
        if (w[w.size() - 2] != 'l') --groups;
    }
    return std::max(groups, 1);
}

struct TextStats {
    int words = 0;
    int sentences = 0;
    int syllables = 0;
};

inline TextStats text_stats(const std::string& text) {
    TextStats st;
    std::string current;
    bool sentence_has_word = false;
    auto flush_word = [&]() {
        if (current.empty()) return;
        for (char c : current) {
            if (std::isalnum(static_cast<unsigned char>(c))) {
                st.words++;
                st.syllables += count_syllables(current);
                sentence_has_word = true;
                break;
            }
        }
        current.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush_word();
        } else if (c == '.' || c == '!' || c == '?') {
            flush_word();
            if (sentence_has_word) {
                st.sentences++;
                sentence_has_word = false;
            }
        } else {
            current.push_back(c);
        }
    }
    flush_word();
    if (sentence_has_word) st.sentences++;
    return st;
}

inline double fk_grade(const std::string& text) {
    const TextStats st = text_stats(text);
    if (st.words == 0) throw std::invalid_argument("fk_grade: no words");
    const double words = st.words;
    const double sentences = std::max(st.sentences, 1);
    return 0.39 * (words / sentences) + 11.8 * (st.syllables / words) - 15.59;
}

// -- simple metrics -----------------------------------------------------------

inline double lexical_diversity(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw std::invalid_argument("lexical_diversity: no tokens");
    std::set<std::string> unique(tokens.begin(), tokens.end());
    return static_cast<double>(unique.size()) / static_cast<double>(tokens.size());
}

inline double log_length(long long word_count) {
    if (word_count < 0) throw std::invalid_argument("log_length: negative word count");
    return std::log(1.0 + static_cast<double>(word_count));
}

// -- sentiment / subjectivity --------------------------------------------------

class SentimentScorer {
public:
    virtual ~SentimentScorer() = default;
    virtual std::string scorer_id() const = 0;
    virtual double score(const std::string& text) const = 0;
};

// Stub used when no sentiment model is wired in; scores everything 0.
class NeutralScorer final : public SentimentScorer {
public:
    std::string scorer_id() const override { return "neutral"; }
    double score(const std::string&) const override { return 0.0; }
};

struct WordSense {
    double polarity = 0.0;      // [-1, 1]
    double subjectivity = 0.0;  // [0, 1]
};

// Compact offline lexicon for the rule-based polarity/subjectivity scores.
inline const std::map<std::string, WordSense>& sense_lexicon() {
    static const std::map<std::string, WordSense> lex = {
        {"amazing", {0.8, 0.9}},      {"angry", {-0.6, 0.9}},
        {"bad", {-0.7, 0.65}},        {"beautiful", {0.85, 1.0}},
        {"best", {1.0, 0.3}},         {"boring", {-0.6, 0.8}},
        {"breakthrough", {0.6, 0.5}}, {"brilliant", {0.9, 0.9}},
        {"broken", {-0.4, 0.4}},      {"cheap", {-0.2, 0.6}},
        {"concern", {-0.3, 0.6}},     {"creative", {0.5, 0.75}},
        {"danger", {-0.6, 0.7}},      {"dangerous", {-0.65, 0.8}},
        {"dead", {-0.6, 0.4}},        {"destroy", {-0.7, 0.6}},
        {"dread", {-0.7, 0.85}},      {"excellent", {1.0, 1.0}},
        {"exciting", {0.7, 0.85}},    {"fail", {-0.6, 0.5}},
        {"fair", {0.45, 0.55}},       {"fake", {-0.55, 0.7}},
        {"fear", {-0.65, 0.8}},       {"free", {0.4, 0.5}},
        {"fraud", {-0.8, 0.7}},       {"good", {0.7, 0.6}},
        {"great", {0.8, 0.75}},       {"harm", {-0.6, 0.6}},
        {"hate", {-0.8, 0.9}},        {"helpful", {0.55, 0.5}},
        {"hope", {0.5, 0.7}},         {"impressive", {0.75, 0.8}},
        {"innovative", {0.6, 0.7}},   {"lawsuit", {-0.25, 0.4}},
        {"lazy", {-0.5, 0.75}},       {"love", {0.5, 0.6}},
        {"new", {0.15, 0.45}},        {"nice", {0.6, 1.0}},
        {"old", {-0.1, 0.2}},         {"original", {0.4, 0.6}},
        {"poor", {-0.6, 0.6}},        {"powerful", {0.5, 0.6}},
        {"problem", {-0.4, 0.5}},     {"promising", {0.55, 0.65}},
        {"risk", {-0.45, 0.55}},      {"sad", {-0.6, 1.0}},
        {"scary", {-0.6, 0.9}},       {"steal", {-0.7, 0.6}},
        {"strong", {0.45, 0.55}},     {"stunning", {0.85, 0.95}},
        {"terrible", {-1.0, 1.0}},    {"theft", {-0.7, 0.6}},
        {"threat", {-0.6, 0.7}},      {"ugly", {-0.7, 0.9}},
        {"unfair", {-0.5, 0.8}},      {"useful", {0.45, 0.4}},
        {"useless", {-0.5, 0.5}},     {"weak", {-0.4, 0.5}},
        {"wonderful", {0.9, 1.0}},    {"wrong", {-0.5, 0.55}},
    };
    return lex;
}

struct SenseScores {
    double polarity = 0.0;
    double subjectivity = 0.0;
};

// Mean polarity/subjectivity over lexicon-matched tokens; no match -> (0, 0).
inline SenseScores sense_scores(const std::vector<std::string>& tokens) {
    const auto& lex = sense_lexicon();
    double pol = 0.0, sub = 0.0;
    int hits = 0;
    for (const auto& t : tokens) {
        const auto it = lex.find(t);
        if (it != lex.end()) {
            pol += it->second.polarity;
            sub += it->second.subjectivity;
            ++hits;
        }
    }
    if (hits == 0) return {};
    return {pol / hits, sub / hits};
}

// Lexicon-backed alternative to the neutral stub for the tw_sent channel.
class LexiconScorer final : public SentimentScorer {
public:
    std::string scorer_id() const override { return "lexicon"; }
    double score(const std::string& text) const override {
        return sense_scores(text::tokenize(text::lowercase(text))).polarity;
    }
};

inline std::unique_ptr<SentimentScorer> make_scorer(const std::string& id) {
    if (id == "neutral") return std::make_unique<NeutralScorer>();
    if (id == "lexicon") return std::make_unique<LexiconScorer>();
    throw std::invalid_argument("unknown sentiment scorer '" + id + "'");
}

// -- per-section profile --------------------------------------------------------

struct LinguisticProfile {
    double fk_grade = 0.0;
    double lexical_diversity = 0.0;
    double log_len = 0.0;
    double tw_sent = 0.0;
    double tb_polarity = 0.0;
    double tb_subjectivity = 0.0;
};

inline LinguisticProfile profile_section(const std::string& raw_text,
                                         const std::vector<std::string>& tokens,
                                         long long article_words,
                                         const SentimentScorer& scorer) {
    LinguisticProfile p;
    p.fk_grade = fk_grade(raw_text);
    p.lexical_diversity = lexical_diversity(tokens);
    p.log_len = log_length(article_words);
    p.tw_sent = scorer.score(raw_text);
    const auto sense = sense_scores(text::tokenize(text::lowercase(raw_text)));
    p.tb_polarity = sense.polarity;
    p.tb_subjectivity = sense.subjectivity;
    return p;
}

// -- correlation matrix ----------------------------------------------------------

inline const std::vector<std::string>& metric_keys() {
    static const std::vector<std::string> keys = {
        "tw_sent",   "tb_polarity",       "tb_subjectivity",
        "fk_grade",  "lexical_diversity", "log_len",
        "d1",        "d2",                "prob_consensus"};
    return keys;
}

inline const std::vector<std::string>& metric_display_names() {
    static const std::vector<std::string> names = {
        "Sentiment",         "TextBlob Polarity", "TextBlob Subjectivity",
        "Flesch-Kincaid Grade", "Lexical Diversity", "Log Article Length",
        "D1 Axis",           "D2 Axis",           "Cluster Confidence"};
    return names;
}

// Pairwise Pearson r. A zero-variance metric gets NaN across its whole row
// and column (including the diagonal) rather than a misleading 0.
inline std::vector<std::vector<double>> correlation_matrix(
    const std::vector<std::vector<double>>& metrics) {
    const std::size_t m = metrics.size();
    for (const auto& col : metrics) {
        if (col.size() < 3) throw std::invalid_argument("correlation_matrix: need >= 3 sections");
        if (col.size() != metrics[0].size()) {
            throw std::invalid_argument("correlation_matrix: ragged input");
        }
    }
    std::vector<bool> degenerate(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        const double first = metrics[i][0];
        degenerate[i] = std::all_of(metrics[i].begin(), metrics[i].end(),
                                    [&](double v) { return v == first; });
    }
    std::vector<std::vector<double>> r(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (degenerate[i] || degenerate[j]) {
                r[i][j] = std::numeric_limits<double>::quiet_NaN();
            } else if (i == j) {
                r[i][j] = 1.0;
            } else if (j > i) {
                r[i][j] = stats::pearson(metrics[i], metrics[j]);
            } else {
                r[i][j] = r[j][i];
            }
        }
    }
    return r;
}

// -- temporal aggregates -----------------------------------------------------------

// Per-year topic shares; each year's proportions sum to 1.
inline std::map<int, std::vector<double>> topic_share_by_year(const std::vector<int>& labels,
                                                              const std::vector<int>& years,
                                                              int k) {
    if (labels.size() != years.size()) {
        throw std::invalid_argument("topic_share_by_year: size mismatch");
    }
    std::map<int, std::vector<double>> out;
    std::map<int, int> totals;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& row = out[years[i]];
        if (row.empty()) row.assign(static_cast<std::size_t>(k), 0.0);
        row[static_cast<std::size_t>(labels[i])] += 1.0;
        totals[years[i]] += 1;
    }
    for (auto& [year, row] : out) {
        for (auto& v : row) v /= totals[year];
    }
    return out;
}

// Per-(topic, year) summary of a metric; statistic is "median" or "mean".
inline std::map<std::pair<int, int>, double> topic_metric_timeseries(
    const std::vector<double>& values, const std::vector<int>& labels,
    const std::vector<int>& years, const std::string& statistic = "median") {
    if (values.size() != labels.size() || values.size() != years.size()) {
        throw std::invalid_argument("topic_metric_timeseries: size mismatch");
    }
    if (statistic != "median" && statistic != "mean") {
        throw std::invalid_argument("topic_metric_timeseries: unknown statistic");
    }
    std::map<std::pair<int, int>, std::vector<double>> buckets;
    for (std::size_t i = 0; i < values.size(); ++i) {
        buckets[{labels[i], years[i]}].push_back(values[i]);
    }
    std::map<std::pair<int, int>, double> out;
    for (auto& [key, vals] : buckets) {
        out[key] = statistic == "median" ? stats::median(vals) : stats::mean(vals);
    }
    return out;
}

}  // namespace framemap::ling
