#pragma once

// Text normalization used across the pipeline. Tokenization is
// whitespace-and-punctuation based; words keep internal alphanumerics, so
// embedded digits ("gpt4") survive while standalone numerals and date
// tokens are dropped. The lemmatizer is a deterministic rule pass (plural
// suffix stripping plus a small irregular table); its outputs are frozen by
// a golden-file test.

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace framemap::text {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Removes http(s)://... and www.... substrings (to the next whitespace).
inline std::string strip_urls(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const bool http = s.compare(i, 7, "http://") == 0 || s.compare(i, 8, "https://") == 0;
        const bool www = s.compare(i, 4, "www.") == 0;
        if (http || www) {
            while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back(' ');
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

// True for tokens that are entirely digits or digit ordinals ("2023",
// "1st"). Date forms like 01/02/2023 split at tokenization into pure digit
// groups, which this predicate then catches one by one.
inline bool is_numeric_token(const std::string& t) {
    if (t.empty()) return false;
    std::size_t digits = 0;
    while (digits < t.size() && std::isdigit(static_cast<unsigned char>(t[digits]))) ++digits;
    if (digits == 0) return false;
    if (digits == t.size()) return true;
    const std::string tail = t.substr(digits);
    return tail == "st" || tail == "nd" || tail == "rd" || tail == "th";
}

// Lowercase word tokens. Splits on anything that is not [a-z0-9'];
// apostrophes are kept only long enough to strip possessives
// ("artists'" -> "artists") and contractions ("don't" -> "dont").
inline std::vector<std::string> tokenize(const std::string& raw) {
    const std::string s = lowercase(raw);
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&]() {
        std::string cleaned;
        for (char c : cur) {
            if (c != '\'') cleaned.push_back(c);
        }
        if (!cleaned.empty()) out.push_back(std::move(cleaned));
        cur.clear();
    };
    for (char c : s) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
        if (keep) cur.push_back(c);
        else flush();
    }
    flush();
    return out;
}

inline const std::unordered_map<std::string, std::string>& irregular_lemmas() {
    static const std::unordered_map<std::string, std::string> m = {
        {"men", "man"},       {"women", "woman"},   {"children", "child"},
        {"people", "person"}, {"feet", "foot"},     {"teeth", "tooth"},
        {"mice", "mouse"},    {"geese", "goose"},   {"media", "medium"},
        {"criteria", "criterion"}, {"data", "data"}, {"analyses", "analysis"},
        {"lives", "life"},    {"leaves", "leaf"},   {"wives", "wife"},
        {"knives", "knife"},
    };
    return m;
}

// Plural-stripping lemmatizer. Idempotent: outputs never end in a suffix
// the rules would strip again.
inline std::string lemmatize(const std::string& word) {
    auto it = irregular_lemmas().find(word);
    if (it != irregular_lemmas().end()) return it->second;
    const std::size_t n = word.size();
    if (n < 4) return word;
    auto ends = [&](const char* suf) {
        const std::size_t m = std::string(suf).size();
        return n >= m && word.compare(n - m, m, suf) == 0;
    };
    if (ends("ies") && n > 4) return word.substr(0, n - 3) + "y";
    if (ends("sses") || ends("ches") || ends("shes") || ends("xes") || ends("zes"))
        return word.substr(0, n - 2);
    if (word.back() == 's' && !ends("ss") && !ends("us") && !ends("is"))
        return word.substr(0, n - 1);
    return word;
}

// Default general-English stopword set (lowercase).
inline const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> s = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an",
        "and", "any", "are", "aren't", "as", "at", "be", "because", "been",
        "before", "being", "below", "between", "both", "but", "by", "can",
        "cannot", "could", "did", "do", "does", "doing", "down", "during",
        "each", "few", "for", "from", "further", "had", "has", "have",
        "having", "he", "her", "here", "hers", "herself", "him", "himself",
        "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
        "just", "me", "more", "most", "my", "myself", "no", "nor", "not",
        "now", "of", "off", "on", "once", "only", "or", "other", "our",
        "ours", "ourselves", "out", "over", "own", "same", "she", "should",
        "so", "some", "such", "than", "that", "the", "their", "theirs",
        "them", "themselves", "then", "there", "these", "they", "this",
        "those", "through", "to", "too", "under", "until", "up", "very",
        "was", "we", "were", "what", "when", "where", "which", "while",
        "who", "whom", "why", "will", "with", "would", "you", "your",
        "yours", "yourself", "yourselves",
    };
    return s;
}

// Default domain stoplist: the retrieval query phrases, tokenized and
// deduplicated. Mitigates query-driven selection bias in term statistics.
inline const std::set<std::string>& default_domain_stoplist() {
    static const std::set<std::string> s = [] {
        static const char* queries[] = {
            "AI art",
            "AI generated art",
            "AI art impact on artists",
            "Effects of AI image generators on artists' careers",
            "Artists' responses to generative AI",
            "Artists' concerns about AI art",
            "Interviews with artists about AI image generators",
            "How AI affects freelance artists",
            "AI copyright challenges for artists",
            "Artists suing AI companies",
            "How artists adapt to AI tools",
            "Artists protest AI training data usage",
            "Artists' opinion on DeepDream art",
            "AI art exhibition",
            "Art incorporating AI",
            "Creatives and AI",
            "AI and the creative job market",
        };
        std::set<std::string> out;
        for (const char* q : queries) {
            for (const auto& t : tokenize(q)) out.insert(t);
        }
        return out;
    }();
    return s;
}

// Space-joined n-grams of lengths 1..max_len over a token list.
inline std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int max_len) {
    std::vector<std::string> out;
    for (int len = 1; len <= max_len; ++len) {
        if (tokens.size() < static_cast<std::size_t>(len)) break;
        for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
            std::string g = tokens[i];
            for (int j = 1; j < len; ++j) {
                g += ' ';
                g += tokens[i + j];
            }
            out.push_back(std::move(g));
        }
    }
    return out;
}

}  // namespace framemap::text
