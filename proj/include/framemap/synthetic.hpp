#pragma once

// Deterministic demo corpus: themed documents over 2013-2025 whose vocabulary
// pools give the pipeline visible topic structure, anchor terms, sentiment
// hits, and year-dependent drift. Same seed, same bytes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "framemap/corpus.hpp"
#include "framemap/csv.hpp"
#include "framemap/fsutil.hpp"
#include "framemap/rng.hpp"

namespace framemap::synth {

namespace detail {

struct Theme {
    const char* name;
    std::vector<const char*> vocab;
};

inline const std::vector<Theme>& themes() {
    static const std::vector<Theme> t = {
        {"technical",
         {"neural", "model", "training", "network", "diffusion", "transformer", "gradient",
          "dataset", "parameter", "inference", "architecture", "compute", "algorithm",
          "benchmark", "layer", "embedding", "generative", "sampling", "latent", "checkpoint"}},
        {"market",
         {"auction", "market", "price", "gallery", "collector", "sale", "value", "bid",
          "commission", "brand", "startup", "investor", "revenue", "platform", "subscription",
          "product", "demand", "customer", "earnings", "buyer"}},
        {"community",
         {"community", "artist", "painter", "studio", "craft", "style", "portfolio",
          "exhibition", "inspiration", "practice", "sketch", "canvas", "identity",
          "expression", "culture", "movement", "collective", "workshop", "tradition",
          "voice"}},
        {"legal",
         {"copyright", "lawsuit", "statutory", "court", "infringement", "plaintiff",
          "regulation", "policy", "consent", "licensing", "attorney", "ruling",
          "legislation", "liability", "compliance", "doctrine", "jurisdiction",
          "settlement", "statute", "tribunal"}},
        {"transparency",
         {"transparency", "disclosure", "provenance", "audit", "documentation",
          "accountability", "openness", "traceability", "scrutiny", "governance",
          "oversight", "register", "labeling", "watermark", "attribution", "metadata",
          "verification", "integrity", "standard", "protocol"}}};
    return t;
}

inline const std::vector<const char*>& filler() {
    static const std::vector<const char*> words = {
        "people", "work",    "time",    "year",    "world",  "report", "story",  "public",
        "debate", "question", "idea",   "change",  "future", "image",  "picture", "tool",
        "system", "way",     "part",    "case",    "point",  "result", "example", "interest",
        "group",  "number",  "level",   "issue",   "process", "research", "think", "piece",
        "medium", "writer",  "reader",  "audience", "series", "moment", "effect", "detail"};
    return words;
}

inline const std::vector<const char*>& mood() {
    static const std::vector<const char*> words = {
        "good",  "great",   "exciting", "promising", "impressive", "useful",
        "fear",  "threat",  "concern",  "risk",      "problem",    "unfair",
        "hope",  "creative", "innovative", "dangerous", "wrong",    "fair"};
    return words;
}

// Theme mix drifts across the period: community/technical early, technical/
// transparency in the middle, market/legal late.
inline std::vector<double> theme_weights(int year) {
    std::vector<double> w(5, 1.0);
    if (year <= 2016) {
        w[2] += 4.0;
        w[0] += 2.0;
    } else if (year <= 2020) {
        w[0] += 4.0;
        w[4] += 2.5;
    } else {
        w[1] += 3.5;
        w[3] += 3.5;
    }
    return w;
}

inline std::string make_sentence(det::Rng& rng, const Theme& theme) {
    const std::size_t n_words = 6 + rng.below(14);
    std::string s;
    for (std::size_t w = 0; w < n_words; ++w) {
        std::string word;
        const double roll = rng.uniform();
        if (roll < 0.55) {
            word = theme.vocab[rng.below(theme.vocab.size())];
        } else if (roll < 0.85) {
            word = filler()[rng.below(filler().size())];
        } else if (roll < 0.95) {
            word = mood()[rng.below(mood().size())];
        } else if (roll < 0.98) {
            word = std::to_string(2013 + rng.below(13));
        } else {
            word = "https://example.org/item/" + std::to_string(rng.below(1000));
        }
        if (!s.empty()) s.push_back(' ');
        if (s.empty() && word[0] >= 'a' && word[0] <= 'z') {
            word[0] = static_cast<char>(word[0] - 'a' + 'A');
        }
        s += word;
    }
    const double punct = rng.uniform();
    s.push_back(punct < 0.8 ? '.' : (punct < 0.9 ? '?' : '!'));
    return s;
}

}  // namespace detail

struct DemoSpec {
    int n_docs = 40;
    std::uint64_t seed = 7;
    int min_words = 420;
    int max_words = 1400;
};

// Writes manifest.csv plus docs/<doc_id>.txt files; returns the manifest path.
inline std::filesystem::path write_demo_corpus(const std::filesystem::path& dir,
                                               const DemoSpec& spec = {}) {
    const auto& themes = detail::themes();
    const std::vector<std::string> media = {"article", "blog", "talk", "podcast", "legal"};

    csv::Table manifest;
    manifest.header = {"doc_id", "url",         "media_type", "subgenre",
                       "year",   "access_date", "text_path"};
    std::filesystem::create_directories(dir / "docs");

    for (int d = 0; d < spec.n_docs; ++d) {
        det::Rng rng(det::mix(spec.seed, static_cast<std::uint64_t>(d) + 0xd0c5ULL));
        const int year = 2013 + static_cast<int>(d) % 13;
        const auto weights = detail::theme_weights(year);
        const std::size_t theme_idx = rng.discrete(weights);
        const auto& theme = themes[theme_idx];

        const int target_words =
            spec.min_words + static_cast<int>(rng.below(
                                 static_cast<std::size_t>(spec.max_words - spec.min_words)));
        std::string body;
        int words = 0;
        while (words < target_words) {
            const std::string sentence = detail::make_sentence(rng, theme);
            if (!body.empty()) body.push_back(' ');
            body += sentence;
            for (char c : sentence) {
                if (c == ' ') ++words;
            }
            ++words;
        }

        char doc_id[16];
        std::snprintf(doc_id, sizeof(doc_id), "doc%03d", d);
        const std::string file_name = std::string(doc_id) + ".txt";
        fsutil::write_file_atomic(dir / "docs" / file_name, body + "\n");

        char access_date[16];
        std::snprintf(access_date, sizeof(access_date), "2025-%02d-%02d",
                      1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28)));
        manifest.rows.push_back({doc_id,
                                 "https://example.org/" + std::string(theme.name) + "/" + doc_id,
                                 media[static_cast<std::size_t>(d) % media.size()],
                                 theme.name,
                                 std::to_string(year),
                                 access_date,
                                 "docs/" + file_name});
    }
    const auto manifest_path = dir / "manifest.csv";
    fsutil::write_file_atomic(manifest_path, csv::to_string(manifest));
    return manifest_path;
}

}  // namespace framemap::synth
