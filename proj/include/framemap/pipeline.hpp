#pragma once

// Run orchestration: a JSON config drives the staged pipeline
// (ingest -> embed -> cluster -> consensus -> route1/2/3 -> report), with
// every stage reading its prerequisites from disk and writing its artifacts
// atomically, so single stages can be re-run in isolation.

#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "framemap/consensus.hpp"
#include "framemap/corpus.hpp"
#include "framemap/csv.hpp"
#include "framemap/embedding.hpp"
#include "framemap/fsutil.hpp"
#include "framemap/hashing.hpp"
#include "framemap/http_provider.hpp"
#include "framemap/linguistics.hpp"
#include "framemap/projection.hpp"
#include "framemap/route1.hpp"
#include "framemap/route2.hpp"
#include "framemap/route3.hpp"
#include "framemap/svgplot.hpp"
#include "framemap/topics.hpp"

namespace framemap::pipeline {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct EmbeddingConfig {
    std::string provider = "fallback";  // "fallback" or "http"
    int dim = 768;
    std::uint64_t seed = 101;
    std::string host = "127.0.0.1";
    int port = 8000;
    std::string model_id = "external-encoder";
    std::string cache_dir;  // empty -> <out_dir>/cache
};

struct Route3Config {
    std::vector<int> tree_counts = route3::default_tree_counts();
    std::uint64_t split_seed = 15;
    std::size_t top_n_ngrams = 12000;
    int ngram_max = 3;
    double test_fraction = 0.2;
    std::size_t importance_top_k = 15;
};

struct RunConfig {
    std::string corpus_manifest;
    std::string out_dir = "out";
    int section_len = 500;
    EmbeddingConfig embedding;
    std::vector<std::uint64_t> seeds = {15, 158, 24, 5, 336};
    int k_min = 2;
    int k_max = 20;
    int min_k = 4;
    int k_override = 5;  // 0 disables the override
    std::string projector = "neighbor";
    int n_neighbors = 15;
    int n_epochs = 200;
    consensus::AnchorSet anchors;
    std::vector<route1::FrameSign> frames = route1::default_frame_signs();
    std::vector<double> benchmark_raw = route1::default_benchmark_raw();
    std::string prototypes_file;  // empty -> built-in defaults
    std::string milestones_file;  // empty -> built-in defaults
    std::vector<int> split_years = route2::default_split_years();
    Route3Config route3;
    std::string sentiment_scorer = "neutral";
    std::size_t topic_top_terms = 10;
    double extreme_fraction = 0.05;
    std::size_t extreme_top = 20;
    std::string timeseries_statistic = "median";

    void validate() const {
        if (corpus_manifest.empty()) throw ConfigError("config: corpus_manifest is required");
        if (seeds.empty()) throw ConfigError("config: seeds must be non-empty");
        if (k_min < 2 || k_max < k_min) throw ConfigError("config: need 2 <= k_min <= k_max");
        if (k_override != 0 && (k_override < k_min || k_override > k_max)) {
            throw ConfigError("config: k_override must lie within [k_min, k_max]");
        }
        if (min_k < k_min || min_k > k_max) {
            throw ConfigError("config: min_k must lie within [k_min, k_max]");
        }
        if (projector != "neighbor" && projector != "pca") {
            throw ConfigError("config: projector must be 'neighbor' or 'pca'");
        }
        if (embedding.provider != "fallback" && embedding.provider != "http") {
            throw ConfigError("config: embedding.provider must be 'fallback' or 'http'");
        }
        if (embedding.dim < 2) throw ConfigError("config: embedding.dim must be >= 2");
        if (frames.size() != 4) throw ConfigError("config: exactly four frames required");
        try {
            route1::validate_signs(frames);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (benchmark_raw.size() != frames.size()) {
            throw ConfigError("config: benchmark_raw must match the frame count");
        }
        if (sentiment_scorer != "neutral" && sentiment_scorer != "lexicon") {
            throw ConfigError("config: unknown sentiment_scorer");
        }
        if (timeseries_statistic != "median" && timeseries_statistic != "mean") {
            throw ConfigError("config: timeseries_statistic must be 'median' or 'mean'");
        }
        if (route3.tree_counts.empty()) throw ConfigError("config: route3.tree_counts empty");
        if (route3.test_fraction <= 0.0 || route3.test_fraction >= 1.0) {
            throw ConfigError("config: route3.test_fraction must be in (0, 1)");
        }
        if (section_len < 1) throw ConfigError("config: section_len must be >= 1");
        if (extreme_fraction <= 0.0 || extreme_fraction > 0.5) {
            throw ConfigError("config: extreme_fraction must be in (0, 0.5]");
        }
    }

    json to_json(bool include_out_dir = true) const {
        json frames_j = json::array();
        for (const auto& f : frames) {
            frames_j.push_back({{"name", f.name}, {"sign_d1", f.sign_d1}, {"sign_d2", f.sign_d2}});
        }
        json j{
            {"corpus_manifest", corpus_manifest},
            {"section_len", section_len},
            {"embedding",
             {{"provider", embedding.provider},
              {"dim", embedding.dim},
              {"seed", embedding.seed},
              {"host", embedding.host},
              {"port", embedding.port},
              {"model_id", embedding.model_id},
              {"cache_dir", embedding.cache_dir}}},
            {"seeds", seeds},
            {"k_min", k_min},
            {"k_max", k_max},
            {"min_k", min_k},
            {"k_override", k_override},
            {"projector", projector},
            {"n_neighbors", n_neighbors},
            {"n_epochs", n_epochs},
            {"anchors",
             {{"d1_positive", anchors.d1_positive}, {"d2_positive", anchors.d2_positive}}},
            {"frames", frames_j},
            {"benchmark_raw", benchmark_raw},
            {"prototypes_file", prototypes_file},
            {"milestones_file", milestones_file},
            {"split_years", split_years},
            {"route3",
             {{"tree_counts", route3.tree_counts},
              {"split_seed", route3.split_seed},
              {"top_n_ngrams", route3.top_n_ngrams},
              {"ngram_max", route3.ngram_max},
              {"test_fraction", route3.test_fraction},
              {"importance_top_k", route3.importance_top_k}}},
            {"sentiment_scorer", sentiment_scorer},
            {"topic_top_terms", topic_top_terms},
            {"extreme_fraction", extreme_fraction},
            {"extreme_top", extreme_top},
            {"timeseries_statistic", timeseries_statistic},
        };
        if (include_out_dir) j["out_dir"] = out_dir;
        return j;
    }

    // base_dir resolves relative input paths (usually the config file's dir).
    static RunConfig from_json(const json& j, const std::filesystem::path& base_dir = {}) {
        static const std::set<std::string> known = {
            "corpus_manifest", "out_dir",         "section_len",     "embedding",
            "seeds",           "k_min",           "k_max",           "min_k",
            "k_override",      "projector",       "n_neighbors",     "n_epochs",
            "anchors",         "frames",          "benchmark_raw",   "prototypes_file",
            "milestones_file", "split_years",     "route3",          "sentiment_scorer",
            "topic_top_terms", "extreme_fraction", "extreme_top",    "timeseries_statistic"};
        if (!j.is_object()) throw ConfigError("config: expected a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
        }
        RunConfig cfg;
        try {
            auto resolve = [&](std::string p) {
                if (p.empty() || base_dir.empty()) return p;
                const std::filesystem::path fp(p);
                return fp.is_absolute() ? p : (base_dir / fp).string();
            };
            if (j.contains("corpus_manifest")) {
                cfg.corpus_manifest = resolve(j.at("corpus_manifest").get<std::string>());
            }
            if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
            if (j.contains("section_len")) cfg.section_len = j.at("section_len").get<int>();
            if (j.contains("embedding")) {
                const auto& e = j.at("embedding");
                if (e.contains("provider")) cfg.embedding.provider = e.at("provider");
                if (e.contains("dim")) cfg.embedding.dim = e.at("dim");
                if (e.contains("seed")) cfg.embedding.seed = e.at("seed");
                if (e.contains("host")) cfg.embedding.host = e.at("host");
                if (e.contains("port")) cfg.embedding.port = e.at("port");
                if (e.contains("model_id")) cfg.embedding.model_id = e.at("model_id");
                if (e.contains("cache_dir")) cfg.embedding.cache_dir = e.at("cache_dir");
            }
            if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
            if (j.contains("k_min")) cfg.k_min = j.at("k_min").get<int>();
            if (j.contains("k_max")) cfg.k_max = j.at("k_max").get<int>();
            if (j.contains("min_k")) cfg.min_k = j.at("min_k").get<int>();
            if (j.contains("k_override")) cfg.k_override = j.at("k_override").get<int>();
            if (j.contains("projector")) cfg.projector = j.at("projector").get<std::string>();
            if (j.contains("n_neighbors")) cfg.n_neighbors = j.at("n_neighbors").get<int>();
            if (j.contains("n_epochs")) cfg.n_epochs = j.at("n_epochs").get<int>();
            if (j.contains("anchors")) {
                const auto& a = j.at("anchors");
                if (a.contains("d1_positive")) {
                    cfg.anchors.d1_positive = a.at("d1_positive").get<std::vector<std::string>>();
                }
                if (a.contains("d2_positive")) {
                    cfg.anchors.d2_positive = a.at("d2_positive").get<std::vector<std::string>>();
                }
            }
            if (j.contains("frames")) {
                cfg.frames.clear();
                for (const auto& f : j.at("frames")) {
                    cfg.frames.push_back({f.at("name").get<std::string>(),
                                          f.at("sign_d1").get<int>(),
                                          f.at("sign_d2").get<int>()});
                }
            }
            if (j.contains("benchmark_raw")) {
                cfg.benchmark_raw = j.at("benchmark_raw").get<std::vector<double>>();
            }
            if (j.contains("prototypes_file")) {
                cfg.prototypes_file = resolve(j.at("prototypes_file").get<std::string>());
            }
            if (j.contains("milestones_file")) {
                cfg.milestones_file = resolve(j.at("milestones_file").get<std::string>());
            }
            if (j.contains("split_years")) {
                cfg.split_years = j.at("split_years").get<std::vector<int>>();
            }
            if (j.contains("route3")) {
                const auto& r = j.at("route3");
                if (r.contains("tree_counts")) {
                    cfg.route3.tree_counts = r.at("tree_counts").get<std::vector<int>>();
                }
                if (r.contains("split_seed")) cfg.route3.split_seed = r.at("split_seed");
                if (r.contains("top_n_ngrams")) cfg.route3.top_n_ngrams = r.at("top_n_ngrams");
                if (r.contains("ngram_max")) cfg.route3.ngram_max = r.at("ngram_max");
                if (r.contains("test_fraction")) cfg.route3.test_fraction = r.at("test_fraction");
                if (r.contains("importance_top_k")) {
                    cfg.route3.importance_top_k = r.at("importance_top_k");
                }
            }
            if (j.contains("sentiment_scorer")) {
                cfg.sentiment_scorer = j.at("sentiment_scorer").get<std::string>();
            }
            if (j.contains("topic_top_terms")) {
                cfg.topic_top_terms = j.at("topic_top_terms").get<std::size_t>();
            }
            if (j.contains("extreme_fraction")) {
                cfg.extreme_fraction = j.at("extreme_fraction").get<double>();
            }
            if (j.contains("extreme_top")) cfg.extreme_top = j.at("extreme_top").get<std::size_t>();
            if (j.contains("timeseries_statistic")) {
                cfg.timeseries_statistic = j.at("timeseries_statistic").get<std::string>();
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        cfg.validate();
        return cfg;
    }
};

inline RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    json j;
    try {
        j = json::parse(fsutil::read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return RunConfig::from_json(j, path.parent_path());
}

class Pipeline {
public:
    explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    static const std::vector<std::string>& stage_names() {
        static const std::vector<std::string> names = {"ingest", "embed",  "cluster",
                                                       "consensus", "route1", "route2",
                                                       "route3", "report"};
        return names;
    }

    void run_stage(const std::string& name) {
        if (name == "ingest") return ingest();
        if (name == "embed") return embed();
        if (name == "cluster") return cluster();
        if (name == "consensus") return consensus_stage();
        if (name == "route1") return route1_stage();
        if (name == "route2") return route2_stage();
        if (name == "route3") return route3_stage();
        if (name == "report") return report();
        throw ConfigError("unknown stage '" + name + "'");
    }

    void run() {
        json timings = json::object();
        for (const auto& stage : stage_names()) {
            const auto start = std::chrono::steady_clock::now();
            run_stage(stage);
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
            timings[stage] = ms;
        }
        fsutil::write_file_atomic(out() / "timings.json", timings.dump(2) + "\n");
    }

    const RunConfig& config() const { return cfg_; }
    std::filesystem::path out() const { return cfg_.out_dir; }

    // -- stage: ingest --------------------------------------------------------

    void ingest() {
        const char* stage = "ingest";
        corpus::IngestResult ingested;
        try {
            ingested = corpus::ingest_manifest(cfg_.corpus_manifest);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        const std::size_t before_dedup = ingested.records.size();
        const auto docs = corpus::deduplicate(ingested.records);

        corpus::StopConfig stop;
        std::vector<corpus::Section> sections;
        json doc_hashes = json::object();
        long long dropped_empty = 0;
        for (const auto& doc : docs) {
            doc_hashes[doc.doc_id] = hashing::sha256_hex(doc.raw_text);
            for (auto& s : corpus::segment(doc, cfg_.section_len)) {
                s.tokens = corpus::preprocess(s.text, stop);
                if (s.tokens.empty()) {
                    ++dropped_empty;
                    continue;
                }
                sections.push_back(std::move(s));
            }
        }
        if (sections.empty()) throw StageError(stage, "no usable sections after ingest");

        corpus::write_sections_jsonl(out() / "ingest" / "sections.jsonl", sections);

        csv::Table doc_table;
        doc_table.header = {"doc_id", "url", "media_type", "subgenre", "year", "access_date"};
        for (const auto& d : docs) {
            doc_table.rows.push_back({d.doc_id, d.url, corpus::to_string(d.media_type),
                                      d.subgenre, std::to_string(d.year), d.access_date});
        }
        fsutil::write_file_atomic(out() / "ingest" / "documents.csv", csv::to_string(doc_table));

        csv::Table err_table;
        err_table.header = {"row", "doc_id", "message"};
        for (const auto& e : ingested.errors) {
            err_table.rows.push_back({std::to_string(e.row), e.doc_id, e.message});
        }
        fsutil::write_file_atomic(out() / "ingest" / "ingest_errors.csv",
                                  csv::to_string(err_table));

        json summary{{"manifest", cfg_.corpus_manifest},
                     {"manifest_sha256", hashing::sha256_hex(fsutil::read_file(cfg_.corpus_manifest))},
                     {"rows_ingested", before_dedup},
                     {"rows_rejected", ingested.errors.size()},
                     {"documents_kept", docs.size()},
                     {"duplicates_removed", before_dedup - docs.size()},
                     {"sections", sections.size()},
                     {"dropped_empty_sections", dropped_empty},
                     {"document_sha256", doc_hashes}};
        fsutil::write_file_atomic(out() / "ingest" / "summary.json", summary.dump(2) + "\n");
    }

    // -- stage: embed ---------------------------------------------------------

    void embed() {
        const char* stage = "embed";
        const auto sections = load_sections(stage);
        std::unique_ptr<embed::EmbeddingProvider> provider = make_provider();
        embed::EmbeddingCache cache(cache_dir());

        std::vector<embed::SectionText> texts;
        texts.reserve(sections.size());
        for (const auto& s : sections) texts.push_back({s.section_id, s.text});
        std::vector<embed::EmbeddingVector> vectors;
        try {
            vectors = embed::embed_sections(texts, *provider, cache);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }

        const std::size_t dim = vectors.empty() ? 0 : vectors[0].values.size();
        std::string raw(vectors.size() * dim * sizeof(double), '\0');
        json ids = json::array();
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (vectors[i].values.size() != dim) {
                throw StageError(stage, "provider returned mixed dimensions");
            }
            std::memcpy(raw.data() + i * dim * sizeof(double), vectors[i].values.data(),
                        dim * sizeof(double));
            ids.push_back(vectors[i].section_id);
        }
        fsutil::write_file_atomic(out() / "embed" / "vectors.bin", raw);
        json meta{{"model_id", provider->model_id()},
                  {"dim", dim},
                  {"count", vectors.size()},
                  {"section_ids", ids},
                  {"vectors_sha256", hashing::sha256_hex(raw)}};
        fsutil::write_file_atomic(out() / "embed" / "vectors.json", meta.dump(2) + "\n");
    }

    // -- stage: cluster ---------------------------------------------------------

    void cluster() {
        const char* stage = "cluster";
        const auto sections = load_sections(stage);
        const auto [meta, points] = load_vectors(stage, sections);

        const int k_cap = std::min<int>(cfg_.k_max, static_cast<int>(points.size()) - 1);
        if (k_cap < cfg_.k_min) throw StageError(stage, "too few sections for the K grid");
        topics::StabilityScan scan;
        try {
            scan = topics::stability_scan(points, cfg_.seeds, cfg_.k_min, k_cap);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        json scan_j{{"seeds", scan.seeds}, {"entries", json::array()}};
        for (const auto& e : scan.entries) {
            scan_j["entries"].push_back({{"k", e.k},
                                         {"silhouettes", e.silhouettes},
                                         {"mean_silhouette", e.mean_silhouette},
                                         {"mean_ari", e.mean_ari}});
        }
        fsutil::write_file_atomic(out() / "cluster" / "stability.json", scan_j.dump(2) + "\n");

        topics::KSelection sel;
        try {
            sel = topics::select_k(scan, cfg_.min_k, cfg_.k_override);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        json sel_j{{"k", sel.k},
                   {"overridden", sel.overridden},
                   {"min_k", cfg_.min_k},
                   {"rationale", sel.rationale}};
        fsutil::write_file_atomic(out() / "cluster" / "selection.json", sel_j.dump(2) + "\n");

        const auto reference = cluster::kmeans(points, sel.k, cfg_.seeds[0]);
        const auto confidence =
            topics::cluster_confidence(points, reference.centroids, reference.labels);
        csv::Table assign;
        assign.header = {"section_id", "topic", "confidence"};
        for (std::size_t i = 0; i < sections.size(); ++i) {
            assign.rows.push_back({sections[i].section_id, std::to_string(reference.labels[i]),
                                   fsutil::fmt_double(confidence[i])});
        }
        fsutil::write_file_atomic(out() / "cluster" / "assignments.csv", csv::to_string(assign));

        csv::Table seed_labels;
        seed_labels.header = {"section_id"};
        for (auto seed : cfg_.seeds) seed_labels.header.push_back("seed_" + std::to_string(seed));
        std::vector<std::vector<int>> all_labels;
        for (auto seed : cfg_.seeds) {
            all_labels.push_back(seed == cfg_.seeds[0] ? reference.labels
                                                       : cluster::kmeans(points, sel.k, seed).labels);
        }
        for (std::size_t i = 0; i < sections.size(); ++i) {
            std::vector<std::string> row{sections[i].section_id};
            for (const auto& labels : all_labels) row.push_back(std::to_string(labels[i]));
            seed_labels.rows.push_back(std::move(row));
        }
        fsutil::write_file_atomic(out() / "cluster" / "seed_labels.csv",
                                  csv::to_string(seed_labels));

        std::vector<std::vector<std::string>> tokens;
        tokens.reserve(sections.size());
        for (const auto& s : sections) tokens.push_back(s.tokens);
        const auto summaries =
            topics::summarize_topics(tokens, reference.labels, sel.k, cfg_.topic_top_terms);
        json topics_j = json::array();
        for (const auto& t : summaries) {
            json terms = json::array();
            for (const auto& ts : t.top_terms) {
                terms.push_back({{"term", ts.term}, {"score", ts.score}});
            }
            topics_j.push_back({{"topic_id", t.topic_id},
                                {"size", t.size},
                                {"share", t.share},
                                {"label", t.label},
                                {"top_terms", terms}});
        }
        fsutil::write_file_atomic(out() / "cluster" / "topics.json", topics_j.dump(2) + "\n");
    }

    // -- stage: consensus (axes + linguistics) ------------------------------------

    void consensus_stage() {
        const char* stage = "consensus";
        const auto sections = load_sections(stage);
        const auto [meta, points] = load_vectors(stage, sections);
        const auto [k, labels, confidence] = load_assignments(stage, sections);

        std::vector<proj::Matrix> runs;
        proj::NeighborEmbeddingConfig ncfg;
        ncfg.n_neighbors = cfg_.n_neighbors;
        ncfg.n_epochs = cfg_.n_epochs;
        try {
            for (auto seed : cfg_.seeds) {
                runs.push_back(proj::project2d(points, cfg_.projector, seed, ncfg));
            }
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        consensus::ConsensusResult cons;
        try {
            cons = consensus::consensus_axes(runs, 0);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        consensus::rescale_axes(cons.axes);
        std::vector<std::vector<std::string>> tokens;
        tokens.reserve(sections.size());
        for (const auto& s : sections) tokens.push_back(s.tokens);
        const auto orient = consensus::orient_axes(cons.axes, tokens, cfg_.anchors);

        csv::Table map_table;
        map_table.header = {"section_id", "d1", "d2"};
        for (std::size_t i = 0; i < sections.size(); ++i) {
            map_table.rows.push_back({sections[i].section_id, fsutil::fmt_double(cons.axes[i][0]),
                                      fsutil::fmt_double(cons.axes[i][1])});
        }
        fsutil::write_file_atomic(out() / "consensus" / "map.csv", csv::to_string(map_table));

        json disp = json::object();
        for (std::size_t r = 0; r < cfg_.seeds.size(); ++r) {
            disp[std::to_string(cfg_.seeds[r])] = cons.disparities[r];
        }
        json align_j{{"reference_seed", cfg_.seeds[0]},
                     {"projector", cfg_.projector},
                     {"disparities", disp},
                     {"orientation",
                      {{"flipped_d1", orient.flipped_d1},
                       {"flipped_d2", orient.flipped_d2},
                       {"matched_d1", orient.matched_d1},
                       {"matched_d2", orient.matched_d2}}},
                     {"anchors",
                      {{"d1_positive", cfg_.anchors.d1_positive},
                       {"d2_positive", cfg_.anchors.d2_positive}}}};
        fsutil::write_file_atomic(out() / "consensus" / "alignment.json", align_j.dump(2) + "\n");

        const auto geometry = consensus::topic_geometry(cons.axes, labels, k);
        const auto topic_labels = load_topic_labels(stage);
        csv::Table geo_table;
        geo_table.header = {"topic", "label", "size", "share", "d1", "d2", "quadrant"};
        for (const auto& g : geometry) {
            geo_table.rows.push_back(
                {std::to_string(g.topic_id), topic_labels.at(static_cast<std::size_t>(g.topic_id)),
                 std::to_string(g.size),
                 fsutil::fmt_double(static_cast<double>(g.size) /
                                    static_cast<double>(sections.size())),
                 fsutil::fmt_double(g.d1), fsutil::fmt_double(g.d2), std::to_string(g.quadrant)});
        }
        fsutil::write_file_atomic(out() / "consensus" / "topic_geometry.csv",
                                  csv::to_string(geo_table));

        const auto vocab =
            consensus::axis_extreme_vocab(cons.axes, tokens, cfg_.extreme_fraction, cfg_.extreme_top);
        csv::Table vocab_table;
        vocab_table.header = {"axis", "pole", "rank", "term", "count"};
        for (const auto& pole : vocab) {
            for (std::size_t r = 0; r < pole.terms.size(); ++r) {
                vocab_table.rows.push_back({pole.axis, pole.pole, std::to_string(r + 1),
                                            pole.terms[r].first,
                                            std::to_string(pole.terms[r].second)});
            }
        }
        fsutil::write_file_atomic(out() / "consensus" / "extreme_vocab.csv",
                                  csv::to_string(vocab_table));

        write_linguistics(stage, sections, cons.axes, confidence);
    }

    // -- stage: route1 --------------------------------------------------------------

    void route1_stage() {
        const char* stage = "route1";
        const auto sections = load_sections(stage);
        const auto axes = load_map(stage, sections);

        const auto weights = route1::frame_weight_matrix(axes, cfg_.frames);
        csv::Table w_table;
        w_table.header = {"section_id"};
        for (const auto& f : cfg_.frames) w_table.header.push_back(f.name);
        for (std::size_t i = 0; i < sections.size(); ++i) {
            std::vector<std::string> row{sections[i].section_id};
            for (double w : weights[i]) row.push_back(fsutil::fmt_double(w));
            w_table.rows.push_back(std::move(row));
        }
        fsutil::write_file_atomic(out() / "route1" / "frame_weights.csv",
                                  csv::to_string(w_table));

        std::vector<route1::ZTestResult> table;
        try {
            const auto p_hat = route1::mean_weights(weights);
            const auto benchmark = route1::normalize_benchmark(cfg_.benchmark_raw);
            table = route1::route1_table(p_hat, benchmark, sections.size(), cfg_.frames);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        csv::Table z_table;
        z_table.header = {"frame", "p_obs", "p0", "z", "p_value"};
        for (const auto& r : table) {
            z_table.rows.push_back({r.frame, fsutil::fmt_double(r.p_hat),
                                    fsutil::fmt_double(r.p0), fsutil::fmt_double(r.z),
                                    fsutil::fmt_double(r.p_value)});
        }
        fsutil::write_file_atomic(out() / "route1" / "ztests.csv", csv::to_string(z_table));
    }

    // -- stage: route2 --------------------------------------------------------------

    void route2_stage() {
        const char* stage = "route2";
        const auto sections = load_sections(stage);
        const auto [meta, points] = load_vectors(stage, sections);

        const auto prototypes = load_prototypes(stage);
        json proto_snapshot = json::object();
        for (const auto& [frame, sentences] : prototypes) proto_snapshot[frame] = sentences;
        fsutil::write_file_atomic(out() / "route2" / "prototypes.json",
                                  proto_snapshot.dump(2) + "\n");

        std::unique_ptr<embed::EmbeddingProvider> provider = make_provider();
        embed::EmbeddingCache cache(cache_dir());
        std::map<std::string, std::vector<embed::Vector>> proto_vectors;
        try {
            for (const auto& [frame, sentences] : prototypes) {
                std::vector<embed::SectionText> items;
                for (std::size_t s = 0; s < sentences.size(); ++s) {
                    items.push_back({"prototype:" + frame + ":" + std::to_string(s), sentences[s]});
                }
                for (auto& v : embed::embed_sections(items, *provider, cache)) {
                    proto_vectors[frame].push_back(std::move(v.values));
                }
            }
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }

        std::vector<std::pair<std::string, route2::YearScores>> frame_scores;
        csv::Table scores_table;
        scores_table.header = {"section_id", "year", "frame", "score"};
        for (const auto& f : cfg_.frames) {
            const auto it = proto_vectors.find(f.name);
            if (it == proto_vectors.end() || it->second.empty()) {
                throw StageError(stage, "no prototype sentences for frame '" + f.name + "'");
            }
            route2::YearScores scores;
            for (std::size_t i = 0; i < sections.size(); ++i) {
                const double s = route2::frame_similarity(points[i], it->second);
                scores.push_back({sections[i].year, s});
                scores_table.rows.push_back({sections[i].section_id,
                                             std::to_string(sections[i].year), f.name,
                                             fsutil::fmt_double(s)});
            }
            frame_scores.push_back({f.name, std::move(scores)});
        }
        fsutil::write_file_atomic(out() / "route2" / "scores.csv", csv::to_string(scores_table));

        csv::Table series_table;
        series_table.header = {"frame", "year", "mean_similarity"};
        for (const auto& [frame, scores] : frame_scores) {
            for (const auto& [year, mean] : route2::yearly_mean(scores)) {
                series_table.rows.push_back(
                    {frame, std::to_string(year), fsutil::fmt_double(mean)});
            }
        }
        fsutil::write_file_atomic(out() / "route2" / "series.csv", csv::to_string(series_table));

        const auto milestones = load_milestones(stage);
        const auto tests = route2::route2_report(frame_scores, milestones, cfg_.split_years);
        csv::Table test_table;
        test_table.header = {"frame", "year", "z", "milestone", "p", "q", "direction", "sig"};
        for (const auto& t : tests) {
            if (t.na) {
                test_table.rows.push_back(
                    {t.frame, std::to_string(t.split_year), "NA", t.milestone, "NA", "NA", "NA", ""});
            } else {
                test_table.rows.push_back({t.frame, std::to_string(t.split_year),
                                           fsutil::fmt_double(t.z), t.milestone,
                                           fsutil::fmt_double(t.p), fsutil::fmt_double(t.q),
                                           t.direction, t.sig});
            }
        }
        fsutil::write_file_atomic(out() / "route2" / "tests.csv", csv::to_string(test_table));
    }

    // -- stage: route3 --------------------------------------------------------------

    void route3_stage() {
        const char* stage = "route3";
        const auto sections = load_sections(stage);
        const auto axes = load_map(stage, sections);
        const auto [k, labels, confidence] = load_assignments(stage, sections);
        const auto profiles = load_profiles(stage, sections);

        std::vector<std::vector<std::string>> tokens;
        tokens.reserve(sections.size());
        for (const auto& s : sections) tokens.push_back(s.tokens);

        route3::FeatureMatrix features;
        route3::GeoTargets targets;
        try {
            features = route3::build_features(tokens, profiles, confidence,
                                              cfg_.route3.top_n_ngrams, cfg_.route3.ngram_max);
            targets = route3::make_targets(axes);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }

        csv::Table target_table;
        target_table.header = {"section_id", "d1_q", "d2_q", "quad4"};
        for (std::size_t i = 0; i < sections.size(); ++i) {
            target_table.rows.push_back({sections[i].section_id, std::to_string(targets.d1_q[i]),
                                         std::to_string(targets.d2_q[i]),
                                         std::to_string(targets.quad4[i])});
        }
        fsutil::write_file_atomic(out() / "route3" / "targets.csv", csv::to_string(target_table));

        json features_j{{"columns", features.names.size()},
                        {"ngram_columns", features.ngram_columns},
                        {"style_columns",
                         std::vector<std::string>(features.names.begin() +
                                                      static_cast<std::ptrdiff_t>(features.ngram_columns),
                                                  features.names.end())},
                        {"top_n_ngrams", cfg_.route3.top_n_ngrams},
                        {"ngram_max", cfg_.route3.ngram_max}};
        fsutil::write_file_atomic(out() / "route3" / "features.json", features_j.dump(2) + "\n");

        const std::vector<std::pair<std::string, const std::vector<int>*>> target_list = {
            {"d1_q", &targets.d1_q}, {"d2_q", &targets.d2_q}, {"quad4", &targets.quad4}};
        std::vector<route3::EnsembleResult> results;
        json ensembles = json::array();
        csv::Table acc_table;
        acc_table.header = {"target", "weighted_accuracy", "macro_accuracy"};
        for (const auto& [name, y] : target_list) {
            route3::EnsembleResult res;
            try {
                res = route3::train_rf_ensemble(features.rows, *y, name, cfg_.route3.tree_counts,
                                                cfg_.route3.split_seed, cfg_.route3.test_fraction);
            } catch (const std::exception& e) {
                throw StageError(stage, std::string(e.what()) + " (target " + name + ")");
            }
            json test_ids = json::array();
            for (auto i : res.test_indices) test_ids.push_back(sections[i].section_id);
            ensembles.push_back({{"target", res.target},
                                 {"tree_counts", res.tree_counts},
                                 {"classes", res.classes},
                                 {"test_section_ids", test_ids},
                                 {"per_classifier_predictions", res.per_classifier},
                                 {"ensembled_predictions", res.ensembled},
                                 {"confusion_counts", res.confusion},
                                 {"confusion_row_normalized", res.confusion_norm},
                                 {"weighted_accuracy", res.weighted_accuracy},
                                 {"macro_accuracy", res.macro_accuracy}});
            acc_table.rows.push_back({res.target, fsutil::fmt_double(res.weighted_accuracy),
                                      fsutil::fmt_double(res.macro_accuracy)});
            results.push_back(std::move(res));
        }
        fsutil::write_file_atomic(out() / "route3" / "ensembles.json", ensembles.dump(2) + "\n");
        fsutil::write_file_atomic(out() / "route3" / "accuracies.csv", csv::to_string(acc_table));

        const auto importance =
            route3::importance_summary(results, features.names, cfg_.route3.importance_top_k);
        csv::Table imp_table;
        imp_table.header = {"feature", "d1_q", "d2_q", "quad4", "mean"};
        for (const auto& row : importance) {
            imp_table.rows.push_back({row.feature, fsutil::fmt_double(row.per_target[0]),
                                      fsutil::fmt_double(row.per_target[1]),
                                      fsutil::fmt_double(row.per_target[2]),
                                      fsutil::fmt_double(row.mean)});
        }
        fsutil::write_file_atomic(out() / "route3" / "importances.csv", csv::to_string(imp_table));
    }

    // -- stage: report ---------------------------------------------------------------

    void report() {
        const char* stage = "report";
        const auto sections = load_sections(stage);
        const auto axes = load_map(stage, sections);
        const auto [k, labels, confidence] = load_assignments(stage, sections);
        const auto topic_labels = load_topic_labels(stage);
        const auto profiles = load_profiles(stage, sections);
        const auto rep = out() / "report";
        std::vector<std::string> written;

        // consensus map: data + scatter
        {
            csv::Table t;
            t.header = {"section_id", "year", "d1", "d2", "topic", "topic_label"};
            std::vector<svg::ScatterPoint> pts;
            for (std::size_t i = 0; i < sections.size(); ++i) {
                t.rows.push_back({sections[i].section_id, std::to_string(sections[i].year),
                                  fsutil::fmt_double(axes[i][0]), fsutil::fmt_double(axes[i][1]),
                                  std::to_string(labels[i]),
                                  topic_labels.at(static_cast<std::size_t>(labels[i]))});
                pts.push_back({axes[i][0], axes[i][1], labels[i]});
            }
            write_report_file(rep / "consensus_map.csv", csv::to_string(t), written);
            write_report_file(rep / "consensus_map.svg",
                              svg::scatter("Consensus map", "D1", "D2", pts, topic_labels),
                              written);
        }

        copy_artifact(stage, out() / "consensus" / "topic_geometry.csv",
                      rep / "topic_geometry.csv", written);
        copy_artifact(stage, out() / "consensus" / "extreme_vocab.csv",
                      rep / "extreme_vocab.csv", written);

        // topic share by year: data + lines
        {
            std::vector<int> years;
            years.reserve(sections.size());
            for (const auto& s : sections) years.push_back(s.year);
            const auto shares = ling::topic_share_by_year(labels, years, k);
            const auto milestones = load_milestones(stage);
            csv::Table t;
            t.header = {"year"};
            for (int c = 0; c < k; ++c) t.header.push_back("topic_" + std::to_string(c));
            t.header.push_back("milestone");
            std::vector<svg::LineSeries> series(static_cast<std::size_t>(k));
            for (int c = 0; c < k; ++c) {
                series[static_cast<std::size_t>(c)].name =
                    topic_labels.at(static_cast<std::size_t>(c));
            }
            for (const auto& [year, row] : shares) {
                std::vector<std::string> cells{std::to_string(year)};
                for (int c = 0; c < k; ++c) {
                    cells.push_back(fsutil::fmt_double(row[static_cast<std::size_t>(c)]));
                    series[static_cast<std::size_t>(c)].points.push_back(
                        {static_cast<double>(year), row[static_cast<std::size_t>(c)]});
                }
                const auto it = milestones.find(year);
                cells.push_back(it == milestones.end() ? "" : it->second);
                t.rows.push_back(std::move(cells));
            }
            write_report_file(rep / "topic_share_by_year.csv", csv::to_string(t), written);
            write_report_file(
                rep / "topic_share_by_year.svg",
                svg::line_chart("Topic share by year", "year", "share", series), written);
        }

        copy_artifact(stage, out() / "route1" / "ztests.csv", rep / "route1_ztests.csv", written);
        copy_artifact(stage, out() / "route2" / "series.csv",
                      rep / "route2_similarity_series.csv", written);
        copy_artifact(stage, out() / "route2" / "tests.csv", rep / "route2_tests.csv", written);

        // route2 similarity lines
        {
            const csv::Table series_csv = csv::read_file((out() / "route2" / "series.csv").string());
            std::map<std::string, svg::LineSeries> by_frame;
            const int c_frame = series_csv.column("frame");
            const int c_year = series_csv.column("year");
            const int c_mean = series_csv.column("mean_similarity");
            for (const auto& row : series_csv.rows) {
                auto& s = by_frame[row[static_cast<std::size_t>(c_frame)]];
                s.name = row[static_cast<std::size_t>(c_frame)];
                s.points.push_back({std::stod(row[static_cast<std::size_t>(c_year)]),
                                    std::stod(row[static_cast<std::size_t>(c_mean)])});
            }
            std::vector<svg::LineSeries> series;
            for (const auto& f : cfg_.frames) {
                if (by_frame.count(f.name)) series.push_back(by_frame.at(f.name));
            }
            write_report_file(
                rep / "route2_similarity.svg",
                svg::line_chart("Prototype similarity by year", "year", "mean cosine", series),
                written);
        }

        copy_artifact(stage, out() / "route3" / "accuracies.csv", rep / "route3_accuracies.csv",
                      written);
        copy_artifact(stage, out() / "route3" / "importances.csv", rep / "route3_importances.csv",
                      written);
        copy_artifact(stage, out() / "route3" / "ensembles.json", rep / "route3_confusions.json",
                      written);
        copy_artifact(stage, out() / "linguistics" / "correlations.csv",
                      rep / "correlations.csv", written);

        // correlation heatmap from the persisted matrix
        {
            const csv::Table corr = csv::read_file((out() / "linguistics" / "correlations.csv").string());
            std::vector<std::vector<double>> values;
            std::vector<std::string> names;
            for (const auto& row : corr.rows) {
                names.push_back(row[0]);
                std::vector<double> vals;
                for (std::size_t c = 1; c < row.size(); ++c) {
                    vals.push_back(row[c] == "NA" ? std::numeric_limits<double>::quiet_NaN()
                                                  : std::stod(row[c]));
                }
                values.push_back(std::move(vals));
            }
            write_report_file(rep / "correlations.svg",
                              svg::heatmap("Metric correlations", names, values), written);
        }

        // readability vs axis position (appendix figure data)
        {
            csv::Table t;
            t.header = {"section_id", "d1", "d2", "fk_grade", "lexical_diversity", "topic"};
            std::vector<svg::ScatterPoint> pts;
            for (std::size_t i = 0; i < sections.size(); ++i) {
                t.rows.push_back({sections[i].section_id, fsutil::fmt_double(axes[i][0]),
                                  fsutil::fmt_double(axes[i][1]),
                                  fsutil::fmt_double(profiles[i].fk_grade),
                                  fsutil::fmt_double(profiles[i].lexical_diversity),
                                  std::to_string(labels[i])});
                pts.push_back({axes[i][0], profiles[i].fk_grade, labels[i]});
            }
            write_report_file(rep / "readability_vs_axis.csv", csv::to_string(t), written);
            write_report_file(rep / "readability_vs_axis.svg",
                              svg::scatter("Readability vs D1", "D1", "FK grade", pts,
                                           topic_labels),
                              written);
        }

        write_manifest(stage, sections, written);
    }

private:
    // -- providers and shared paths -----------------------------------------------

    std::filesystem::path cache_dir() const {
        return cfg_.embedding.cache_dir.empty() ? out() / "cache"
                                                : std::filesystem::path(cfg_.embedding.cache_dir);
    }

    std::unique_ptr<embed::EmbeddingProvider> make_provider() const {
        if (cfg_.embedding.provider == "fallback") {
            return std::make_unique<embed::FallbackProvider>(cfg_.embedding.dim,
                                                             cfg_.embedding.seed);
        }
        return std::make_unique<embed::HttpProvider>(cfg_.embedding.host, cfg_.embedding.port,
                                                     cfg_.embedding.model_id);
    }

    void require_artifact(const char* stage, const std::filesystem::path& p,
                          const char* producer) const {
        if (!std::filesystem::exists(p)) {
            throw StageError(stage, "missing prerequisite artifact '" + p.string() +
                                        "' (run stage '" + producer + "' first)");
        }
    }

    // -- loaders -------------------------------------------------------------------

    std::vector<corpus::Section> load_sections(const char* stage) const {
        const auto path = out() / "ingest" / "sections.jsonl";
        require_artifact(stage, path, "ingest");
        auto sections = corpus::read_sections_jsonl(path);
        if (sections.empty()) throw StageError(stage, "sections.jsonl is empty");
        return sections;
    }

    std::pair<json, proj::Matrix> load_vectors(const char* stage,
                                               const std::vector<corpus::Section>& sections) const {
        const auto meta_path = out() / "embed" / "vectors.json";
        const auto bin_path = out() / "embed" / "vectors.bin";
        require_artifact(stage, meta_path, "embed");
        require_artifact(stage, bin_path, "embed");
        const json meta = json::parse(fsutil::read_file(meta_path));
        const std::size_t dim = meta.at("dim").get<std::size_t>();
        const std::size_t count = meta.at("count").get<std::size_t>();
        if (count != sections.size()) {
            throw StageError(stage, "embedding count does not match section count");
        }
        const std::string raw = fsutil::read_file(bin_path);
        if (raw.size() != count * dim * sizeof(double)) {
            throw StageError(stage, "vectors.bin has unexpected size");
        }
        proj::Matrix points(count, std::vector<double>(dim));
        for (std::size_t i = 0; i < count; ++i) {
            std::memcpy(points[i].data(), raw.data() + i * dim * sizeof(double),
                        dim * sizeof(double));
        }
        const auto& ids = meta.at("section_ids");
        for (std::size_t i = 0; i < count; ++i) {
            if (ids.at(i).get<std::string>() != sections[i].section_id) {
                throw StageError(stage, "embedding order does not match sections");
            }
        }
        return {meta, std::move(points)};
    }

    std::tuple<int, std::vector<int>, std::vector<double>> load_assignments(
        const char* stage, const std::vector<corpus::Section>& sections) const {
        const auto path = out() / "cluster" / "assignments.csv";
        require_artifact(stage, path, "cluster");
        const csv::Table t = csv::read_file(path.string());
        if (t.rows.size() != sections.size()) {
            throw StageError(stage, "assignments.csv does not match section count");
        }
        const int c_id = t.column("section_id");
        const int c_topic = t.column("topic");
        const int c_conf = t.column("confidence");
        if (c_id < 0 || c_topic < 0 || c_conf < 0) {
            throw StageError(stage, "assignments.csv missing columns");
        }
        std::vector<int> labels(sections.size());
        std::vector<double> confidence(sections.size());
        int k = 0;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (t.rows[i][static_cast<std::size_t>(c_id)] != sections[i].section_id) {
                throw StageError(stage, "assignments.csv order does not match sections");
            }
            labels[i] = std::stoi(t.rows[i][static_cast<std::size_t>(c_topic)]);
            confidence[i] = std::stod(t.rows[i][static_cast<std::size_t>(c_conf)]);
            k = std::max(k, labels[i] + 1);
        }
        return {k, std::move(labels), std::move(confidence)};
    }

    std::vector<std::string> load_topic_labels(const char* stage) const {
        const auto path = out() / "cluster" / "topics.json";
        require_artifact(stage, path, "cluster");
        const json topics_j = json::parse(fsutil::read_file(path));
        std::vector<std::string> labels(topics_j.size());
        for (const auto& t : topics_j) {
            labels.at(t.at("topic_id").get<std::size_t>()) = t.at("label").get<std::string>();
        }
        return labels;
    }

    proj::Matrix load_map(const char* stage, const std::vector<corpus::Section>& sections) const {
        const auto path = out() / "consensus" / "map.csv";
        require_artifact(stage, path, "consensus");
        const csv::Table t = csv::read_file(path.string());
        if (t.rows.size() != sections.size()) {
            throw StageError(stage, "map.csv does not match section count");
        }
        proj::Matrix axes(sections.size(), std::vector<double>(2));
        const int c_id = t.column("section_id");
        const int c_d1 = t.column("d1");
        const int c_d2 = t.column("d2");
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (t.rows[i][static_cast<std::size_t>(c_id)] != sections[i].section_id) {
                throw StageError(stage, "map.csv order does not match sections");
            }
            axes[i][0] = std::stod(t.rows[i][static_cast<std::size_t>(c_d1)]);
            axes[i][1] = std::stod(t.rows[i][static_cast<std::size_t>(c_d2)]);
        }
        return axes;
    }

    std::vector<ling::LinguisticProfile> load_profiles(
        const char* stage, const std::vector<corpus::Section>& sections) const {
        const auto path = out() / "linguistics" / "profiles.csv";
        require_artifact(stage, path, "consensus");
        const csv::Table t = csv::read_file(path.string());
        if (t.rows.size() != sections.size()) {
            throw StageError(stage, "profiles.csv does not match section count");
        }
        auto col = [&](const char* name) {
            const int c = t.column(name);
            if (c < 0) throw StageError(stage, std::string("profiles.csv missing column ") + name);
            return static_cast<std::size_t>(c);
        };
        const auto c_fk = col("fk_grade");
        const auto c_ld = col("lexical_diversity");
        const auto c_ll = col("log_len");
        const auto c_tw = col("tw_sent");
        const auto c_pol = col("tb_polarity");
        const auto c_sub = col("tb_subjectivity");
        std::vector<ling::LinguisticProfile> profiles(sections.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            profiles[i].fk_grade = std::stod(t.rows[i][c_fk]);
            profiles[i].lexical_diversity = std::stod(t.rows[i][c_ld]);
            profiles[i].log_len = std::stod(t.rows[i][c_ll]);
            profiles[i].tw_sent = std::stod(t.rows[i][c_tw]);
            profiles[i].tb_polarity = std::stod(t.rows[i][c_pol]);
            profiles[i].tb_subjectivity = std::stod(t.rows[i][c_sub]);
        }
        return profiles;
    }

    route2::PrototypeSet load_prototypes(const char* stage) const {
        if (cfg_.prototypes_file.empty()) return route2::default_prototypes();
        if (!std::filesystem::exists(cfg_.prototypes_file)) {
            throw StageError(stage, "prototypes file not found: " + cfg_.prototypes_file);
        }
        route2::PrototypeSet set;
        try {
            const json j = json::parse(fsutil::read_file(cfg_.prototypes_file));
            for (const auto& [frame, sentences] : j.items()) {
                set[frame] = sentences.get<std::vector<std::string>>();
            }
        } catch (const std::exception& e) {
            throw StageError(stage, "bad prototypes file: " + std::string(e.what()));
        }
        return set;
    }

    std::map<int, std::string> load_milestones(const char* stage) const {
        if (cfg_.milestones_file.empty()) return route2::default_milestones();
        if (!std::filesystem::exists(cfg_.milestones_file)) {
            throw StageError(stage, "milestones file not found: " + cfg_.milestones_file);
        }
        std::map<int, std::string> milestones;
        try {
            const json j = json::parse(fsutil::read_file(cfg_.milestones_file));
            for (const auto& [year, text] : j.items()) {
                milestones[std::stoi(year)] = text.get<std::string>();
            }
        } catch (const std::exception& e) {
            throw StageError(stage, "bad milestones file: " + std::string(e.what()));
        }
        return milestones;
    }

    // -- linguistics (runs inside the consensus stage) -------------------------------

    void write_linguistics(const char* stage, const std::vector<corpus::Section>& sections,
                           const proj::Matrix& axes, const std::vector<double>& confidence) {
        std::map<std::string, long long> doc_words;
        for (const auto& s : sections) doc_words[s.doc_id] += s.word_count;
        const auto scorer = ling::make_scorer(cfg_.sentiment_scorer);

        std::vector<ling::LinguisticProfile> profiles;
        profiles.reserve(sections.size());
        csv::Table t;
        t.header = {"section_id", "year",        "fk_grade",        "lexical_diversity",
                    "log_len",    "tw_sent",     "tb_polarity",     "tb_subjectivity",
                    "d1",         "d2",          "prob_consensus"};
        for (std::size_t i = 0; i < sections.size(); ++i) {
            ling::LinguisticProfile p;
            try {
                p = ling::profile_section(sections[i].text, sections[i].tokens,
                                          doc_words.at(sections[i].doc_id), *scorer);
            } catch (const std::exception& e) {
                throw StageError(stage, "profile for section '" + sections[i].section_id +
                                            "': " + e.what());
            }
            t.rows.push_back({sections[i].section_id, std::to_string(sections[i].year),
                              fsutil::fmt_double(p.fk_grade),
                              fsutil::fmt_double(p.lexical_diversity),
                              fsutil::fmt_double(p.log_len), fsutil::fmt_double(p.tw_sent),
                              fsutil::fmt_double(p.tb_polarity),
                              fsutil::fmt_double(p.tb_subjectivity), fsutil::fmt_double(axes[i][0]),
                              fsutil::fmt_double(axes[i][1]), fsutil::fmt_double(confidence[i])});
            profiles.push_back(p);
        }
        fsutil::write_file_atomic(out() / "linguistics" / "profiles.csv", csv::to_string(t));

        std::vector<std::vector<double>> metrics(9, std::vector<double>(sections.size()));
        for (std::size_t i = 0; i < sections.size(); ++i) {
            metrics[0][i] = profiles[i].tw_sent;
            metrics[1][i] = profiles[i].tb_polarity;
            metrics[2][i] = profiles[i].tb_subjectivity;
            metrics[3][i] = profiles[i].fk_grade;
            metrics[4][i] = profiles[i].lexical_diversity;
            metrics[5][i] = profiles[i].log_len;
            metrics[6][i] = axes[i][0];
            metrics[7][i] = axes[i][1];
            metrics[8][i] = confidence[i];
        }
        std::vector<std::vector<double>> corr;
        try {
            corr = ling::correlation_matrix(metrics);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
        const auto& names = ling::metric_display_names();
        csv::Table ct;
        ct.header = {"metric"};
        for (const auto& n : names) ct.header.push_back(n);
        for (std::size_t r = 0; r < names.size(); ++r) {
            std::vector<std::string> row{names[r]};
            for (std::size_t c = 0; c < names.size(); ++c) {
                row.push_back(std::isnan(corr[r][c]) ? "NA" : fsutil::fmt_double(corr[r][c]));
            }
            ct.rows.push_back(std::move(row));
        }
        fsutil::write_file_atomic(out() / "linguistics" / "correlations.csv", csv::to_string(ct));

        // per-topic metric series (diversity over time, Fig. 4-style data)
        const auto [k, labels, conf2] = load_assignments(stage, sections);
        std::vector<double> diversity(sections.size());
        std::vector<int> years(sections.size());
        for (std::size_t i = 0; i < sections.size(); ++i) {
            diversity[i] = profiles[i].lexical_diversity;
            years[i] = sections[i].year;
        }
        const auto series = ling::topic_metric_timeseries(diversity, labels, years,
                                                          cfg_.timeseries_statistic);
        csv::Table st;
        st.header = {"topic", "year", "lexical_diversity_" + cfg_.timeseries_statistic};
        for (const auto& [key, value] : series) {
            st.rows.push_back({std::to_string(key.first), std::to_string(key.second),
                               fsutil::fmt_double(value)});
        }
        fsutil::write_file_atomic(out() / "linguistics" / "diversity_by_topic_year.csv",
                                  csv::to_string(st));
    }

    // -- report helpers ----------------------------------------------------------------

    void write_report_file(const std::filesystem::path& path, const std::string& content,
                           std::vector<std::string>& written) {
        fsutil::write_file_atomic(path, content);
        written.push_back(std::filesystem::relative(path, out()).generic_string());
    }

    void copy_artifact(const char* stage, const std::filesystem::path& from,
                       const std::filesystem::path& to, std::vector<std::string>& written) {
        require_artifact(stage, from, producer_of(from));
        write_report_file(to, fsutil::read_file(from), written);
    }

    const char* producer_of(const std::filesystem::path& p) const {
        const std::string s = p.generic_string();
        for (const auto& stage : stage_names()) {
            if (s.find("/" + stage + "/") != std::string::npos) return stage.c_str();
        }
        if (s.find("/linguistics/") != std::string::npos) return "consensus";
        return "unknown";
    }

    void write_manifest(const char* stage, const std::vector<corpus::Section>& sections,
                        std::vector<std::string>& report_files) {
        const auto summary_path = out() / "ingest" / "summary.json";
        require_artifact(stage, summary_path, "ingest");
        const json summary = json::parse(fsutil::read_file(summary_path));
        const json vec_meta = json::parse(fsutil::read_file(out() / "embed" / "vectors.json"));
        const json selection = json::parse(fsutil::read_file(out() / "cluster" / "selection.json"));
        const json alignment = json::parse(fsutil::read_file(out() / "consensus" / "alignment.json"));

        json input_hashes{{"corpus_manifest", summary.at("manifest_sha256")},
                          {"documents", summary.at("document_sha256")}};
        input_hashes["prototypes_file"] =
            cfg_.prototypes_file.empty()
                ? json("builtin")
                : json(hashing::sha256_hex(fsutil::read_file(cfg_.prototypes_file)));
        input_hashes["milestones_file"] =
            cfg_.milestones_file.empty()
                ? json("builtin")
                : json(hashing::sha256_hex(fsutil::read_file(cfg_.milestones_file)));

        std::sort(report_files.begin(), report_files.end());
        json manifest{{"config", cfg_.to_json(false)},
                      {"input_hashes", input_hashes},
                      {"embedding_model", vec_meta.at("model_id")},
                      {"vectors_sha256", vec_meta.at("vectors_sha256")},
                      {"documents", summary.at("documents_kept")},
                      {"sections", sections.size()},
                      {"selected_k", selection.at("k")},
                      {"k_overridden", selection.at("overridden")},
                      {"k_selection_rationale", selection.at("rationale")},
                      {"disparities", alignment.at("disparities")},
                      {"orientation", alignment.at("orientation")},
                      {"report_files", report_files},
                      {"stages", stage_names()},
                      {"timings_file", "timings.json"}};
        fsutil::write_file_atomic(out() / "manifest.json", manifest.dump(2) + "\n");
    }

    RunConfig cfg_;
};

}  // namespace framemap::pipeline
