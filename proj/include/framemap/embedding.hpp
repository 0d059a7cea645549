#pragma once

// Section embeddings behind a pluggable provider contract, with a
// content-addressed on-disk cache. The fallback provider is fully offline
// and deterministic: hashed token features projected through a seed-fixed
// random basis, then unit-normalized.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "framemap/fsutil.hpp"
#include "framemap/hashing.hpp"
#include "framemap/rng.hpp"
#include "framemap/tokenize.hpp"

namespace framemap::embed {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vector l2_normalize(const Vector& v) {
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq <= 0.0) throw std::invalid_argument("degenerate embedding");
    const double inv = 1.0 / std::sqrt(norm_sq);
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * inv;
    return out;
}

inline double cosine(const Vector& a, const Vector& b) {
    return dot(l2_normalize(a), l2_normalize(b));
}

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual const std::string& model_id() const = 0;
    virtual bool deterministic() const = 0;
    virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;
};

// Bag-of-token-hashes provider. Each distinct token maps to a fixed random
// direction derived from (seed, token hash); a text's vector is the
// count-weighted sum, normalized. Order-invariant by construction.
inline Vector fallback_embed(const std::string& text, int dim = 768, std::uint64_t seed = 0) {
    if (dim < 2) throw std::invalid_argument("fallback_embed: dim must be >= 2");
    const std::vector<std::string> tokens = text::tokenize(text);
    Vector acc(static_cast<std::size_t>(dim), 0.0);
    std::unordered_map<std::string, int> counts;
    for (const auto& t : tokens) counts[t]++;
    for (const auto& [token, count] : counts) {
        det::Rng rng(det::mix(seed, hashing::fnv1a64(token)));
        for (int d = 0; d < dim; ++d) {
            acc[static_cast<std::size_t>(d)] += count * rng.normal();
        }
    }
    if (tokens.empty()) {
        // no token signal: a fixed direction keeps the contract total
        det::Rng rng(det::mix(seed, 0x9d3f));
        for (int d = 0; d < dim; ++d) acc[static_cast<std::size_t>(d)] = rng.normal();
    }
    return l2_normalize(acc);
}

class FallbackProvider final : public EmbeddingProvider {
public:
    explicit FallbackProvider(int dim = 768, std::uint64_t seed = 0)
        : dim_(dim), seed_(seed),
          model_id_("fallback-hash-" + std::to_string(dim) + "-s" + std::to_string(seed)) {}

    const std::string& model_id() const override { return model_id_; }
    bool deterministic() const override { return true; }

    std::vector<Vector> embed(const std::vector<std::string>& texts) override {
        std::vector<Vector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_one(t));
        return out;
    }

    int dim() const { return dim_; }

private:
    // Token directions are memoized; corpus vocabularies are small compared
    // to the number of token occurrences.
    Vector embed_one(const std::string& text) {
        const std::vector<std::string> tokens = text::tokenize(text);
        Vector acc(static_cast<std::size_t>(dim_), 0.0);
        std::unordered_map<std::string, int> counts;
        for (const auto& t : tokens) counts[t]++;
        for (const auto& [token, count] : counts) {
            const Vector& dir = token_direction(token);
            for (int d = 0; d < dim_; ++d) {
                acc[static_cast<std::size_t>(d)] += count * dir[static_cast<std::size_t>(d)];
            }
        }
        if (tokens.empty()) return fallback_embed(text, dim_, seed_);
        return l2_normalize(acc);
    }

    const Vector& token_direction(const std::string& token) {
        auto it = directions_.find(token);
        if (it != directions_.end()) return it->second;
        Vector dir(static_cast<std::size_t>(dim_));
        det::Rng rng(det::mix(seed_, hashing::fnv1a64(token)));
        for (int d = 0; d < dim_; ++d) dir[static_cast<std::size_t>(d)] = rng.normal();
        return directions_.emplace(token, std::move(dir)).first->second;
    }

    int dim_;
    std::uint64_t seed_;
    std::string model_id_;
    std::unordered_map<std::string, Vector> directions_;
};

// -- content-addressed cache --------------------------------------------------

// Vectors live in <dir>/<key>.vec as raw little-endian doubles; index.json
// maps key -> {model_id, dim, file}. Keys are sha256(model_id \n text).
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
        const auto index_path = dir_ / "index.json";
        if (std::filesystem::exists(index_path)) {
            index_ = nlohmann::json::parse(fsutil::read_file(index_path));
        } else {
            index_ = nlohmann::json::object();
        }
    }

    static std::string key_for(const std::string& model_id, const std::string& content) {
        return hashing::sha256_hex(model_id + "\n" + content);
    }

    bool contains(const std::string& key) const { return index_.contains(key); }

    std::optional<Vector> load(const std::string& key) const {
        if (!index_.contains(key)) return std::nullopt;
        const std::string file = index_.at(key).at("file").get<std::string>();
        const std::string raw = fsutil::read_file(dir_ / file);
        Vector v(raw.size() / sizeof(double));
        std::memcpy(v.data(), raw.data(), v.size() * sizeof(double));
        return v;
    }

    void store(const std::string& key, const std::string& model_id, const Vector& v) {
        const std::string file = key + ".vec";
        std::string raw(v.size() * sizeof(double), '\0');
        std::memcpy(raw.data(), v.data(), raw.size());
        fsutil::write_file_atomic(dir_ / file, raw);
        index_[key] = {{"file", file}, {"model_id", model_id}, {"dim", v.size()}};
        fsutil::write_file_atomic(dir_ / "index.json", index_.dump(2) + "\n");
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    nlohmann::json index_;
};

struct SectionText {
    std::string section_id;
    std::string text;
};

struct EmbeddingVector {
    Vector values;
    std::string model_id;
    std::string section_id;
};

// Embeds texts in input order, hitting the cache first and batching the
// misses through the provider. Every stored vector is unit-norm.
inline std::vector<EmbeddingVector> embed_sections(const std::vector<SectionText>& sections,
                                                   EmbeddingProvider& provider,
                                                   EmbeddingCache& cache,
                                                   std::size_t batch_size = 32) {
    std::vector<EmbeddingVector> out(sections.size());
    std::vector<std::size_t> misses;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const std::string key = EmbeddingCache::key_for(provider.model_id(), sections[i].text);
        if (auto v = cache.load(key)) {
            out[i] = {std::move(*v), provider.model_id(), sections[i].section_id};
        } else {
            misses.push_back(i);
        }
    }
    for (std::size_t b = 0; b < misses.size(); b += batch_size) {
        const std::size_t end = std::min(misses.size(), b + batch_size);
        std::vector<std::string> texts;
        for (std::size_t j = b; j < end; ++j) texts.push_back(sections[misses[j]].text);
        std::vector<Vector> vectors;
        try {
            vectors = provider.embed(texts);
        } catch (const std::exception& e) {
            throw std::runtime_error("embedding provider failed at section '" +
                                     sections[misses[b]].section_id + "': " + e.what());
        }
        if (vectors.size() != texts.size()) {
            throw std::runtime_error("embedding provider returned wrong batch size");
        }
        for (std::size_t j = b; j < end; ++j) {
            const std::size_t i = misses[j];
            Vector v = l2_normalize(vectors[j - b]);
            const std::string key = EmbeddingCache::key_for(provider.model_id(), sections[i].text);
            cache.store(key, provider.model_id(), v);
            out[i] = {std::move(v), provider.model_id(), sections[i].section_id};
        }
    }
    return out;
}

}  // namespace framemap::embed
