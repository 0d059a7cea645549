#pragma once

// Corpus ingestion and segmentation. A manifest row becomes a
// DocumentRecord; documents are deduplicated, segmented into non-overlapping
// fixed-length sections, and each section carries a cleaned token list.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "framemap/csv.hpp"
#include "framemap/fsutil.hpp"
#include "framemap/tokenize.hpp"

namespace framemap::corpus {

enum class MediaType { article, podcast, peer_reviewed, blog, legal, talk, other };

inline std::string to_string(MediaType m) {
    switch (m) {
        case MediaType::article: return "article";
        case MediaType::podcast: return "podcast";
        case MediaType::peer_reviewed: return "peer_reviewed";
        case MediaType::blog: return "blog";
        case MediaType::legal: return "legal";
        case MediaType::talk: return "talk";
        case MediaType::other: return "other";
    }
    return "other";
}

inline MediaType media_type_from_string(const std::string& s) {
    if (s == "article") return MediaType::article;
    if (s == "podcast") return MediaType::podcast;
    if (s == "peer_reviewed") return MediaType::peer_reviewed;
    if (s == "blog") return MediaType::blog;
    if (s == "legal") return MediaType::legal;
    if (s == "talk") return MediaType::talk;
    return MediaType::other;
}

struct DocumentRecord {
    std::string doc_id;
    std::string url;
    MediaType media_type = MediaType::other;
    std::string subgenre;
    int year = 0;
    std::string access_date;  // ISO-8601
    std::string raw_text;
};

struct Section {
    std::string section_id;
    std::string doc_id;
    int index = 0;
    std::vector<std::string> tokens;  // post-preprocessing
    std::string text;                 // pre-tokenization word slice
    int word_count = 0;
    int year = 0;
};

struct StopConfig {
    std::set<std::string> general_stopwords = text::default_stopwords();
    std::set<std::string> domain_stoplist = text::default_domain_stoplist();
    bool lemmatize = true;
};

struct IngestError {
    std::size_t row = 0;  // 1-based data row in the manifest
    std::string doc_id;
    std::string message;
};

struct IngestResult {
    std::vector<DocumentRecord> records;
    std::vector<IngestError> errors;
};

// -- ingest -----------------------------------------------------------------

inline IngestResult ingest_manifest(const std::string& manifest_path) {
    if (!std::filesystem::exists(manifest_path)) {
        throw std::runtime_error("manifest not found: " + manifest_path);
    }
    const csv::Table table = csv::read_file(manifest_path);
    auto require = [&](const char* name) {
        const int idx = table.column(name);
        if (idx < 0) throw std::runtime_error(std::string("manifest missing column: ") + name);
        return idx;
    };
    const int c_id = require("doc_id");
    const int c_url = require("url");
    const int c_media = require("media_type");
    const int c_sub = require("subgenre");
    const int c_year = require("year");
    const int c_access = require("access_date");
    const int c_text = table.column("text");
    const int c_path = table.column("text_path");
    if (c_text < 0 && c_path < 0) {
        throw std::runtime_error("manifest needs a 'text' or 'text_path' column");
    }

    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    IngestResult result;
    std::set<std::string> seen_ids;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto field = [&](int idx) -> std::string {
            return idx >= 0 && static_cast<std::size_t>(idx) < row.size() ? row[idx] : "";
        };
        DocumentRecord rec;
        rec.doc_id = field(c_id);
        if (rec.doc_id.empty()) {
            result.errors.push_back({r + 1, "", "missing doc_id"});
            continue;
        }
        if (!seen_ids.insert(rec.doc_id).second) {
            result.errors.push_back({r + 1, rec.doc_id, "duplicate doc_id: " + rec.doc_id});
            continue;
        }
        rec.url = field(c_url);
        rec.media_type = media_type_from_string(field(c_media));
        rec.subgenre = field(c_sub);
        try {
            rec.year = std::stoi(field(c_year));
        } catch (const std::exception&) {
            result.errors.push_back({r + 1, rec.doc_id, "invalid year: '" + field(c_year) + "'"});
            continue;
        }
        rec.access_date = field(c_access);

        std::string body = field(c_text);
        if (body.empty() && c_path >= 0 && !field(c_path).empty()) {
            const std::filesystem::path p = base / field(c_path);
            if (!std::filesystem::exists(p)) {
                result.errors.push_back({r + 1, rec.doc_id, "text file not found: " + p.string()});
                continue;
            }
            body = fsutil::read_file(p);
        }
        if (body.empty()) {
            result.errors.push_back({r + 1, rec.doc_id, "empty text"});
            continue;
        }
        rec.raw_text = std::move(body);
        result.records.push_back(std::move(rec));
    }
    return result;
}

// -- deduplicate ------------------------------------------------------------

namespace detail {
inline std::string normalize_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // also trims leading space
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}
}  // namespace detail

// Keeps at most one record per canonical URL (earliest access_date wins) and
// collapses mirrored copies detected by exact normalized-text equality.
inline std::vector<DocumentRecord> deduplicate(const std::vector<DocumentRecord>& records) {
    std::vector<DocumentRecord> out;
    std::map<std::string, std::size_t> by_url;   // url -> index into out
    std::map<std::string, std::size_t> by_text;  // normalized text -> index into out
    for (const auto& rec : records) {
        const std::string norm = detail::normalize_whitespace(rec.raw_text);
        if (!rec.url.empty()) {
            auto it = by_url.find(rec.url);
            if (it != by_url.end()) {
                if (rec.access_date < out[it->second].access_date) {
                    out[it->second] = rec;
                    by_text[norm] = it->second;
                }
                continue;
            }
        }
        if (by_text.count(norm)) continue;  // mirrored copy
        const std::size_t idx = out.size();
        out.push_back(rec);
        if (!rec.url.empty()) by_url[rec.url] = idx;
        by_text[norm] = idx;
    }
    return out;
}

// -- preprocess -------------------------------------------------------------

inline std::vector<std::string> preprocess(const std::string& raw_text, const StopConfig& cfg) {
    const std::string without_urls = text::strip_urls(raw_text);
    std::vector<std::string> tokens = text::tokenize(without_urls);
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (auto& t : tokens) {
        if (text::is_numeric_token(t)) continue;
        if (cfg.general_stopwords.count(t) || cfg.domain_stoplist.count(t)) continue;
        std::string lemma = cfg.lemmatize ? text::lemmatize(t) : t;
        if (cfg.general_stopwords.count(lemma) || cfg.domain_stoplist.count(lemma)) continue;
        out.push_back(std::move(lemma));
    }
    return out;
}

// -- segment ----------------------------------------------------------------

// Consecutive slices of section_len whitespace words. A trailing remainder
// shorter than section_len/5 is folded into the previous section; otherwise
// it stands as a final short section.
inline std::vector<Section> segment(const DocumentRecord& doc, int section_len = 500) {
    if (section_len < 1) throw std::invalid_argument("segment: section_len must be >= 1");
    if (doc.raw_text.empty()) throw std::invalid_argument("segment: empty document " + doc.doc_id);

    std::vector<std::string> words;
    {
        std::istringstream is(doc.raw_text);
        std::string w;
        while (is >> w) words.push_back(w);
    }
    std::vector<std::pair<std::size_t, std::size_t>> slices;  // [begin, end)
    for (std::size_t begin = 0; begin < words.size(); begin += section_len) {
        slices.emplace_back(begin, std::min(words.size(), begin + section_len));
    }
    if (slices.size() >= 2) {
        auto& last = slices.back();
        const std::size_t tail = last.second - last.first;
        if (tail < static_cast<std::size_t>(section_len) / 5) {
            slices[slices.size() - 2].second = last.second;
            slices.pop_back();
        }
    }

    std::vector<Section> sections;
    sections.reserve(slices.size());
    for (std::size_t i = 0; i < slices.size(); ++i) {
        Section s;
        s.doc_id = doc.doc_id;
        s.index = static_cast<int>(i);
        s.section_id = doc.doc_id + "#" + std::to_string(i);
        s.year = doc.year;
        s.word_count = static_cast<int>(slices[i].second - slices[i].first);
        std::string textbuf;
        for (std::size_t w = slices[i].first; w < slices[i].second; ++w) {
            if (w != slices[i].first) textbuf.push_back(' ');
            textbuf += words[w];
        }
        s.text = std::move(textbuf);
        sections.push_back(std::move(s));
    }
    return sections;
}

// -- persistence ------------------------------------------------------------

inline nlohmann::json to_json(const Section& s) {
    return nlohmann::json{{"section_id", s.section_id}, {"doc_id", s.doc_id},
                          {"index", s.index},           {"tokens", s.tokens},
                          {"text", s.text},             {"word_count", s.word_count},
                          {"year", s.year}};
}

inline Section section_from_json(const nlohmann::json& j) {
    Section s;
    s.section_id = j.at("section_id").get<std::string>();
    s.doc_id = j.at("doc_id").get<std::string>();
    s.index = j.at("index").get<int>();
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.text = j.at("text").get<std::string>();
    s.word_count = j.at("word_count").get<int>();
    s.year = j.at("year").get<int>();
    return s;
}

inline void write_sections_jsonl(const std::filesystem::path& path,
                                 const std::vector<Section>& sections) {
    std::string out;
    for (const auto& s : sections) {
        out += to_json(s).dump();
        out += '\n';
    }
    fsutil::write_file_atomic(path, out);
}

inline std::vector<Section> read_sections_jsonl(const std::filesystem::path& path) {
    std::istringstream in(fsutil::read_file(path));
    std::vector<Section> sections;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        sections.push_back(section_from_json(nlohmann::json::parse(line)));
    }
    return sections;
}

}  // namespace framemap::corpus
