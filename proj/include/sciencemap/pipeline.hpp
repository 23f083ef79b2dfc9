#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sciencemap/categraph.hpp"
#include "sciencemap/corpus.hpp"
#include "sciencemap/descriptors.hpp"
#include "sciencemap/errors.hpp"
#include "sciencemap/exports.hpp"
#include "sciencemap/hash.hpp"
#include "sciencemap/overlay.hpp"
#include "sciencemap/participation.hpp"
#include "sciencemap/simnet.hpp"
#include "sciencemap/vosmap.hpp"

namespace sciencemap {

struct PipelineConfig {
    std::string corpus_path;
    std::string categories_path;     // optional
    std::string variant_rules_path;  // optional
    std::string labels_path;         // optional: heuristic labels when absent
    std::string term_core = "e-learning";
    CorpusQuery query; // filter block; term_set is always derived from term_core

    std::size_t min_occurrence = 2;
    std::size_t top_n = 20;

    std::vector<double> thresholds = default_threshold_ladder();
    double min_avg_pp = 50.0;

    std::array<double, 3> channel_weights{1.0, 1.0, 1.0}; // citation, cocitation, coupling
    double gamma = 0.0;              // 0 = auto: mean nonzero combined weight
    std::size_t cluster_restarts = 10;
    std::size_t layout_max_iter = 10000;
    double layout_tol = 1e-6;

    double fr_k = 0.0;               // 0 = sqrt(1/n)
    std::size_t fr_iterations = 500;

    double density_bandwidth = 0.1;  // map units (mean pairwise distance is 1)
    std::size_t density_grid_w = 128;
    std::size_t density_grid_h = 128;

    std::size_t permutations = 1000;
    double core_quantile = 0.88;

    std::uint64_t seed = 1;
    std::string out_dir;
};

namespace cfg_detail {

// Config paths must come out absolute: stamp-input keys are distinguished from
// artifact names (always bare relative) by absoluteness, so a relative corpus
// or categories path would later be re-resolved against the wrong base.
inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
    if (p.empty()) return p;
    std::filesystem::path fp(p);
    if (!fp.is_absolute()) fp = base / fp;
    if (!fp.is_absolute()) fp = std::filesystem::absolute(fp);
    return fp.lexically_normal().string();
}

template <typename T>
inline T get_number(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError(std::string("config field '") + key + "' must be a number");
    return j.at(key).get<T>();
}

inline std::string get_string(const nlohmann::json& j, const char* key,
                              const std::string& fallback = {}) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_string())
        throw ConfigError(std::string("config field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& known,
                       const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw ConfigError(std::string("unknown config field '") + key + "' in " + where);
    }
}

inline CorpusQuery parse_query(const nlohmann::json& q) {
    check_keys(q,
               {"fields", "source_types", "doc_types", "year_min", "year_max", "language",
                "limit", "order"},
               "query");
    CorpusQuery query;
    if (q.contains("fields")) {
        query.fields_searched.clear();
        for (const auto& f : q.at("fields")) {
            std::string v = f.get<std::string>();
            if (v == "title")
                query.fields_searched.insert(SearchField::Title);
            else if (v == "abstract")
                query.fields_searched.insert(SearchField::Abstract);
            else if (v == "keywords")
                query.fields_searched.insert(SearchField::Keywords);
            else
                throw ConfigError("unknown search field '" + v + "'");
        }
        if (query.fields_searched.empty())
            throw ConfigError("query.fields must not be empty");
    }
    if (q.contains("source_types"))
        for (const auto& s : q.at("source_types")) {
            auto st = parse_source_type(s.get<std::string>());
            if (!st) throw ConfigError("unknown source_type '" + s.get<std::string>() + "'");
            query.source_types.insert(*st);
        }
    if (q.contains("doc_types"))
        for (const auto& s : q.at("doc_types"))
            query.doc_types.insert(parse_doc_type(s.get<std::string>()));
    query.years.min = get_number<int>(q, "year_min", query.years.min);
    query.years.max = get_number<int>(q, "year_max", query.years.max);
    if (query.years.min > query.years.max)
        throw ConfigError("query.year_min exceeds query.year_max");
    std::string lang = get_string(q, "language");
    if (!lang.empty()) query.language = lang;
    if (q.contains("limit") && !q.at("limit").is_null())
        query.limit = q.at("limit").get<std::size_t>();
    std::string order = get_string(q, "order", "citation_count_desc");
    if (order == "citation_count_desc")
        query.order = QueryOrder::CitationCountDesc;
    else if (order == "doc_id_asc")
        query.order = QueryOrder::DocIdAsc;
    else
        throw ConfigError("unknown query order '" + order + "'");
    return query;
}

} // namespace cfg_detail

inline PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base) {
    cfg_detail::check_keys(j,
                           {"corpus", "categories", "variant_rules", "labels", "term_core",
                            "query", "descriptors", "thresholds", "min_avg_pp",
                            "channel_weights", "gamma", "cluster", "layout", "fr", "density",
                            "overlay", "seed", "out"},
                           "config");
    PipelineConfig cfg;
    cfg.corpus_path = cfg_detail::resolve_path(cfg_detail::get_string(j, "corpus"), base);
    cfg.categories_path = cfg_detail::resolve_path(cfg_detail::get_string(j, "categories"), base);
    cfg.variant_rules_path =
        cfg_detail::resolve_path(cfg_detail::get_string(j, "variant_rules"), base);
    cfg.labels_path = cfg_detail::resolve_path(cfg_detail::get_string(j, "labels"), base);
    cfg.term_core = cfg_detail::get_string(j, "term_core", cfg.term_core);
    if (text::normalize_term(cfg.term_core).empty())
        throw ConfigError("term_core must be a non-empty term");

    if (j.contains("query")) cfg.query = cfg_detail::parse_query(j.at("query"));
    if (j.contains("descriptors")) {
        const auto& d = j.at("descriptors");
        cfg_detail::check_keys(d, {"min_occurrence", "top_n"}, "descriptors");
        cfg.min_occurrence =
            cfg_detail::get_number<std::size_t>(d, "min_occurrence", cfg.min_occurrence);
        cfg.top_n = cfg_detail::get_number<std::size_t>(d, "top_n", cfg.top_n);
    }
    if (j.contains("thresholds")) {
        cfg.thresholds.clear();
        for (const auto& t : j.at("thresholds")) cfg.thresholds.push_back(t.get<double>());
        if (cfg.thresholds.empty()) throw ConfigError("thresholds must not be empty");
    }
    cfg.min_avg_pp = cfg_detail::get_number<double>(j, "min_avg_pp", cfg.min_avg_pp);
    if (j.contains("channel_weights")) {
        const auto& w = j.at("channel_weights");
        cfg_detail::check_keys(w, {"citation", "cocitation", "coupling"}, "channel_weights");
        cfg.channel_weights[0] = cfg_detail::get_number<double>(w, "citation", 1.0);
        cfg.channel_weights[1] = cfg_detail::get_number<double>(w, "cocitation", 1.0);
        cfg.channel_weights[2] = cfg_detail::get_number<double>(w, "coupling", 1.0);
    }
    cfg.gamma = cfg_detail::get_number<double>(j, "gamma", cfg.gamma);
    if (cfg.gamma < 0.0) throw ConfigError("gamma must be non-negative");
    if (j.contains("cluster")) {
        const auto& c = j.at("cluster");
        cfg_detail::check_keys(c, {"restarts"}, "cluster");
        cfg.cluster_restarts =
            cfg_detail::get_number<std::size_t>(c, "restarts", cfg.cluster_restarts);
    }
    if (j.contains("layout")) {
        const auto& l = j.at("layout");
        cfg_detail::check_keys(l, {"max_iter", "tol"}, "layout");
        cfg.layout_max_iter =
            cfg_detail::get_number<std::size_t>(l, "max_iter", cfg.layout_max_iter);
        cfg.layout_tol = cfg_detail::get_number<double>(l, "tol", cfg.layout_tol);
    }
    if (j.contains("fr")) {
        const auto& f = j.at("fr");
        cfg_detail::check_keys(f, {"k", "iterations"}, "fr");
        cfg.fr_k = cfg_detail::get_number<double>(f, "k", cfg.fr_k);
        cfg.fr_iterations =
            cfg_detail::get_number<std::size_t>(f, "iterations", cfg.fr_iterations);
    }
    if (j.contains("density")) {
        const auto& d = j.at("density");
        cfg_detail::check_keys(d, {"bandwidth", "grid_w", "grid_h"}, "density");
        cfg.density_bandwidth =
            cfg_detail::get_number<double>(d, "bandwidth", cfg.density_bandwidth);
        cfg.density_grid_w =
            cfg_detail::get_number<std::size_t>(d, "grid_w", cfg.density_grid_w);
        cfg.density_grid_h =
            cfg_detail::get_number<std::size_t>(d, "grid_h", cfg.density_grid_h);
    }
    if (j.contains("overlay")) {
        const auto& o = j.at("overlay");
        cfg_detail::check_keys(o, {"permutations", "core_quantile"}, "overlay");
        cfg.permutations =
            cfg_detail::get_number<std::size_t>(o, "permutations", cfg.permutations);
        cfg.core_quantile = cfg_detail::get_number<double>(o, "core_quantile", cfg.core_quantile);
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            throw ConfigError("seed must be an explicit integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    cfg.out_dir = cfg_detail::resolve_path(cfg_detail::get_string(j, "out"), base);

    if (cfg.corpus_path.empty()) throw ConfigError("config is missing 'corpus'");
    return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j, std::filesystem::path(path).parent_path());
}

// --- artifact bookkeeping ---------------------------------------------------

namespace stage_detail {

inline std::map<std::string, std::string> base_inputs(const PipelineConfig& cfg) {
    std::map<std::string, std::string> inputs;
    inputs[cfg.corpus_path] = hash_file(cfg.corpus_path);
    if (!cfg.categories_path.empty())
        inputs[cfg.categories_path] = hash_file(cfg.categories_path);
    return inputs;
}

} // namespace stage_detail

namespace artifact {
inline constexpr const char* ingest = "ingest.json";
inline constexpr const char* keywords = "keywords.csv";
inline constexpr const char* cooccurrence = "cooccurrence.csv";
inline constexpr const char* descriptors = "descriptors.csv";
inline constexpr const char* descriptor_net = "descriptor_network.net";
inline constexpr const char* descriptor_map = "descriptor_network.map";
inline constexpr const char* participation = "participation.csv";
inline constexpr const char* excluded = "excluded_sources.csv";
inline constexpr const char* bands = "bands.csv";
inline constexpr const char* cutoff = "cutoff.json";
inline constexpr const char* selected = "selected.csv";
inline constexpr const char* channels = "channels.csv";
inline constexpr const char* combined_net = "combined.net";
inline constexpr const char* combined_map = "combined.map";
inline constexpr const char* simnet_info = "simnet.json";
inline constexpr const char* map_layout = "map_layout.tsv";
inline constexpr const char* map_info = "map.json";
inline constexpr const char* map_full = "map.tsv";
inline constexpr const char* cluster_info = "cluster.json";
inline constexpr const char* density_csv = "density.csv";
inline constexpr const char* density_svg = "density.svg";
inline constexpr const char* overlay_svg = "overlay.svg";
inline constexpr const char* overlay_json = "overlay.json";
inline constexpr const char* categraph_json_file = "categraph.json";
inline constexpr const char* categraph_svg = "categraph.svg";
inline constexpr const char* report = "report.json";
} // namespace artifact

// Content-hash stamps: every artifact records its own hash plus the hash of
// each input it was derived from; stages refuse to consume artifacts whose
// recorded inputs no longer match the present files.
class Stamps {
public:
    static Stamps load(const std::filesystem::path& out_dir) {
        Stamps s;
        s.path_ = out_dir / "stamps.json";
        std::ifstream in(s.path_, std::ios::binary);
        if (in) {
            try {
                in >> s.data_;
            } catch (const nlohmann::json::exception&) {
                s.data_ = nlohmann::json::object(); // unreadable stamps = no stamps
            }
        }
        if (!s.data_.is_object()) s.data_ = nlohmann::json::object();
        return s;
    }

    void record(const std::string& name, const std::string& self_hash,
                const std::map<std::string, std::string>& inputs) {
        nlohmann::json entry;
        entry["hash"] = self_hash;
        entry["inputs"] = inputs;
        data_[name] = entry;
    }

    // Validates an artifact another stage depends on. `expected` carries the
    // consuming stage's current input files (absolute path -> hash): the
    // artifact must have been derived from those exact bytes, not merely from
    // files that still match whatever the producer happened to read.
    void verify(const char* stage, const std::filesystem::path& out_dir, const std::string& name,
                const std::map<std::string, std::string>& expected) const {
        std::filesystem::path p = out_dir / name;
        if (!std::filesystem::exists(p)) throw MissingArtifact(stage, name);
        if (!data_.contains(name)) throw StaleArtifact(stage, name);
        const auto& entry = data_.at(name);
        if (hash_file(p.string()) != entry.value("hash", std::string()))
            throw StaleArtifact(stage, name);
        nlohmann::json recorded = entry.value("inputs", nlohmann::json::object());
        for (const auto& [input, h] : recorded.items()) {
            std::filesystem::path ip(input);
            // Bare names are sibling artifacts in the output directory;
            // config inputs are stored absolute.
            std::string current =
                ip.is_absolute() ? hash_file(input) : hash_file((out_dir / ip).string());
            if (current != h.get<std::string>()) throw StaleArtifact(stage, input);
        }
        for (const auto& [input, h] : expected)
            if (recorded.value(input, std::string()) != h) throw StaleArtifact(stage, input);
    }

    void save() const {
        std::ofstream out(path_, std::ios::binary);
        out << data_.dump(2) << '\n';
    }

private:
    std::filesystem::path path_;
    nlohmann::json data_ = nlohmann::json::object();
};

struct StageContext {
    PipelineConfig cfg;
    std::filesystem::path out;
    Stamps stamps;

    static StageContext open(const PipelineConfig& cfg) {
        if (cfg.out_dir.empty())
            throw ConfigError("no output directory (set 'out' in config, --out, or SCIENCEMAP_OUT)");
        StageContext ctx{cfg, std::filesystem::path(cfg.out_dir), Stamps{}};
        std::filesystem::create_directories(ctx.out);
        ctx.stamps = Stamps::load(ctx.out);
        return ctx;
    }

    void write_artifact(const std::string& name, const std::string& content,
                        const std::map<std::string, std::string>& inputs) {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw DataError("cannot write artifact: " + (out / name).string());
        f << content;
        f.close();
        stamps.record(name, hash_file((out / name).string()), inputs);
    }

    std::string read_artifact(const char* stage, const std::string& name) {
        stamps.verify(stage, out, name, stage_detail::base_inputs(cfg));
        std::ifstream f(out / name, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
};

namespace stage_detail {

inline Corpus load_corpus_with_categories(const PipelineConfig& cfg, std::size_t* skipped = nullptr) {
    Corpus corpus = parse_corpus(cfg.corpus_path);
    if (!cfg.categories_path.empty())
        corpus.attach_categories(load_categories(cfg.categories_path), skipped);
    else if (skipped)
        *skipped = 0;
    return corpus;
}

inline CorpusQuery core_query(const PipelineConfig& cfg) {
    CorpusQuery q = cfg.query;
    q.term_set = {cfg.term_core};
    return q;
}

inline std::map<std::string, std::vector<std::string>> category_map(const Corpus& corpus) {
    std::map<std::string, std::vector<std::string>> m;
    for (const auto& s : corpus.sources())
        if (!s.categories.empty()) m[s.source_id] = s.categories;
    return m;
}

} // namespace stage_detail

// --- stages -------------------------------------------------------------

inline void stage_ingest(StageContext& ctx) {
    if (ctx.cfg.corpus_path.empty()) throw ConfigError("config is missing 'corpus'");
    std::size_t skipped = 0;
    Corpus corpus = stage_detail::load_corpus_with_categories(ctx.cfg, &skipped);

    nlohmann::json info;
    info["documents"] = corpus.documents().size();
    info["sources"] = corpus.sources().size();
    info["corpus"] = {{"path", ctx.cfg.corpus_path}, {"hash", hash_file(ctx.cfg.corpus_path)}};
    if (!ctx.cfg.categories_path.empty())
        info["categories"] = {{"path", ctx.cfg.categories_path},
                              {"hash", hash_file(ctx.cfg.categories_path)},
                              {"skipped_pairs", skipped}};
    ctx.write_artifact(artifact::ingest, info.dump(2) + "\n", stage_detail::base_inputs(ctx.cfg));
}

inline void stage_descriptors(StageContext& ctx) {
    ctx.stamps.verify("descriptors", ctx.out, artifact::ingest, stage_detail::base_inputs(ctx.cfg));
    Corpus corpus = stage_detail::load_corpus_with_categories(ctx.cfg);

    auto docs = query_documents(corpus, stage_detail::core_query(ctx.cfg));
    std::vector<DocumentRecord> matched;
    matched.reserve(docs.size());
    for (const auto* d : docs) matched.push_back(*d);

    auto stats = extract_keywords(matched);
    auto cooc = build_cooccurrence(matched, stats);
    auto sim = association_strength(cooc);
    auto primary = select_primary(sim, stats, ctx.cfg.term_core, ctx.cfg.min_occurrence,
                                  ctx.cfg.top_n);
    VariantRules rules;
    if (!ctx.cfg.variant_rules_path.empty()) rules = load_variant_rules(ctx.cfg.variant_rules_path);
    DescriptorSet dset = expand_secondary(ctx.cfg.term_core, primary, rules);

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::ingest] = hash_file((ctx.out / artifact::ingest).string());
    if (!ctx.cfg.variant_rules_path.empty())
        inputs[ctx.cfg.variant_rules_path] = hash_file(ctx.cfg.variant_rules_path);

    std::ostringstream kw;
    kw << "term,occurrences\n";
    for (const auto& s : stats) csv::write_row(kw, {s.term, std::to_string(s.occurrences)});
    ctx.write_artifact(artifact::keywords, kw.str(), inputs);

    std::ostringstream co;
    write_cooccurrence_csv(co, cooc);
    ctx.write_artifact(artifact::cooccurrence, co.str(), inputs);

    std::ostringstream ds;
    write_descriptor_csv(ds, dset);
    ctx.write_artifact(artifact::descriptors, ds.str(), inputs);

    // similarity restricted to the primary descriptors
    std::map<std::string, std::size_t> stat_index;
    for (std::size_t i = 0; i < stats.size(); ++i) stat_index[stats[i].term] = i;
    SimilarityMatrix dsim(primary.size());
    std::vector<double> occurrences;
    for (std::size_t a = 0; a < primary.size(); ++a) {
        occurrences.push_back(static_cast<double>(stats[stat_index[primary[a]]].occurrences));
        for (std::size_t b = a + 1; b < primary.size(); ++b)
            dsim.set(a, b, sim.at(stat_index[primary[a]], stat_index[primary[b]]));
    }
    std::ostringstream net, mapf;
    write_network_file(net, dsim);
    write_map_file(mapf, primary, occurrences);
    ctx.write_artifact(artifact::descriptor_net, net.str(), inputs);
    ctx.write_artifact(artifact::descriptor_map, mapf.str(), inputs);
}

inline void stage_participate(StageContext& ctx) {
    std::istringstream ds(ctx.read_artifact("participate", artifact::descriptors));
    DescriptorSet dset = read_descriptor_csv(ds, ctx.cfg.term_core);
    Corpus corpus = stage_detail::load_corpus_with_categories(ctx.cfg);

    CorpusQuery base = stage_detail::core_query(ctx.cfg);
    auto matrix = correspondence(corpus, dset, base);
    auto result = participation_rows(matrix, corpus, base);

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::descriptors] = hash_file((ctx.out / artifact::descriptors).string());

    std::ostringstream pp;
    write_participation_csv(pp, result);
    ctx.write_artifact(artifact::participation, pp.str(), inputs);

    std::ostringstream ex;
    ex << "source_id\n";
    for (const auto& s : result.zero_tna_sources) csv::write_row(ex, {s});
    ctx.write_artifact(artifact::excluded, ex.str(), inputs);
}

inline void stage_bands(StageContext& ctx) {
    std::istringstream pp(ctx.read_artifact("bands", artifact::participation));
    ParticipationResult result = read_participation_csv(pp);

    RelatednessLabels labels;
    if (!ctx.cfg.labels_path.empty())
        labels = load_labels(ctx.cfg.labels_path);
    else
        labels = heuristic_labels(result.rows);

    auto table = band_table(result.rows, labels, ctx.cfg.thresholds);
    double cutoff = select_cutoff(table, ctx.cfg.min_avg_pp);
    auto selected = selected_publications(result.rows, labels, cutoff);

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::participation] = hash_file((ctx.out / artifact::participation).string());
    if (!ctx.cfg.labels_path.empty())
        inputs[ctx.cfg.labels_path] = hash_file(ctx.cfg.labels_path);

    std::ostringstream bt;
    write_band_csv(bt, table);
    ctx.write_artifact(artifact::bands, bt.str(), inputs);

    const BandRow* cut_row = nullptr;
    for (const auto& b : table)
        if (b.threshold_percent == cutoff) cut_row = &b;
    nlohmann::json cj;
    cj["cutoff"] = cutoff;
    cj["min_avg_pp"] = ctx.cfg.min_avg_pp;
    cj["labels"] = ctx.cfg.labels_path.empty() ? "heuristic" : "file";
    cj["selected_count"] = selected.size();
    if (cut_row != nullptr) {
        cj["included"] = cut_row->included;
        cj["errors"] = cut_row->errors;
    }
    ctx.write_artifact(artifact::cutoff, cj.dump(2) + "\n", inputs);

    std::ostringstream sel;
    write_selected_csv(sel, selected);
    ctx.write_artifact(artifact::selected, sel.str(), inputs);
}

inline void stage_simnet(StageContext& ctx) {
    ctx.stamps.verify("simnet", ctx.out, artifact::ingest, stage_detail::base_inputs(ctx.cfg));
    Corpus corpus = stage_detail::load_corpus_with_categories(ctx.cfg);

    DirectedCitations directed;
    std::array<ChannelMatrix, 3> channels = {citation_counts(corpus, &directed),
                                             cocitation_counts(corpus), coupling_counts(corpus)};
    CombinedSimilarity combined = combine_channels(channels, ctx.cfg.channel_weights);
    ReferenceResolution refs = reference_resolution(corpus);

    std::vector<std::string> source_ids;
    for (const auto& s : corpus.sources()) source_ids.push_back(s.source_id);

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::ingest] = hash_file((ctx.out / artifact::ingest).string());

    std::ostringstream ch;
    write_channel_csv(ch, source_ids, directed, channels[1], channels[2]);
    ctx.write_artifact(artifact::channels, ch.str(), inputs);

    std::ostringstream net, mapf;
    write_network_file(net, combined.matrix);
    write_map_file(mapf, source_ids, combined.matrix.row_strengths());
    ctx.write_artifact(artifact::combined_net, net.str(), inputs);
    ctx.write_artifact(artifact::combined_map, mapf.str(), inputs);

    nlohmann::json info;
    info["total_references"] = refs.total;
    info["resolved_references"] = refs.resolved;
    info["unresolved_ratio"] = refs.unresolved_ratio();
    info["weights_used"] = combined.weights_used;
    nlohmann::json empty = nlohmann::json::array();
    for (Channel c : combined.empty_channels) empty.push_back(to_string(c));
    info["empty_channels"] = empty;
    ctx.write_artifact(artifact::simnet_info, info.dump(2) + "\n", inputs);
}

inline void stage_map(StageContext& ctx) {
    std::istringstream mapf(ctx.read_artifact("map", artifact::combined_map));
    auto nodes = read_map_file(mapf);
    std::istringstream net(ctx.read_artifact("map", artifact::combined_net));
    SimilarityMatrix sim = read_network_file(net, nodes.size());

    MapLayout layout = vos_layout(sim, ctx.cfg.seed, ctx.cfg.layout_max_iter, ctx.cfg.layout_tol);
    for (const auto& [label, weight] : nodes) {
        (void)weight;
        layout.ids.push_back(label);
    }

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::combined_net] = hash_file((ctx.out / artifact::combined_net).string());
    inputs[artifact::combined_map] = hash_file((ctx.out / artifact::combined_map).string());

    std::vector<double> weights;
    for (const auto& [label, weight] : nodes) {
        (void)label;
        weights.push_back(weight);
    }
    std::ostringstream ml;
    write_layout_map_file(ml, layout, nullptr, weights);
    ctx.write_artifact(artifact::map_layout, ml.str(), inputs);

    nlohmann::json info;
    info["seed"] = ctx.cfg.seed;
    info["converged"] = layout.converged;
    info["iterations"] = layout.iterations;
    info["objective"] = layout.objective_value;
    info["nodes"] = layout.size();
    ctx.write_artifact(artifact::map_info, info.dump(2) + "\n", inputs);
}

inline void stage_cluster(StageContext& ctx) {
    std::istringstream ml(ctx.read_artifact("cluster", artifact::map_layout));
    auto rows = read_layout_map_file(ml);
    std::istringstream net(ctx.read_artifact("cluster", artifact::combined_net));
    SimilarityMatrix sim = read_network_file(net, rows.size());

    double gamma = ctx.cfg.gamma;
    if (gamma == 0.0) { // auto: mean nonzero combined weight
        auto entries = sim.sorted_entries();
        double sum = 0.0;
        for (const auto& e : entries) sum += e.weight;
        gamma = entries.empty() ? 1.0 : sum / static_cast<double>(entries.size());
    }
    Clustering clusters = vos_cluster(sim, gamma, ctx.cfg.cluster_restarts, ctx.cfg.seed);

    MapLayout layout;
    layout.converged = true;
    std::vector<double> weights;
    for (const auto& r : rows) {
        layout.ids.push_back(r.label);
        layout.positions.push_back(r.position);
        weights.push_back(r.weight);
    }

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::combined_net] = hash_file((ctx.out / artifact::combined_net).string());
    inputs[artifact::map_layout] = hash_file((ctx.out / artifact::map_layout).string());

    std::ostringstream mf;
    write_layout_map_file(mf, layout, &clusters, weights);
    ctx.write_artifact(artifact::map_full, mf.str(), inputs);

    nlohmann::json info;
    info["gamma"] = gamma;
    info["restarts"] = ctx.cfg.cluster_restarts;
    info["cluster_count"] = clusters.cluster_count;
    info["quality"] = clusters.quality;
    ctx.write_artifact(artifact::cluster_info, info.dump(2) + "\n", inputs);

    DensityField field = density_field(layout, weights, ctx.cfg.density_bandwidth,
                                       ctx.cfg.density_grid_w, ctx.cfg.density_grid_h, true);
    std::ostringstream dc;
    write_density_csv(dc, field);
    ctx.write_artifact(artifact::density_csv, dc.str(), inputs);
    ctx.write_artifact(artifact::density_svg, render_density_svg(layout, field), inputs);
}

inline void stage_overlay(StageContext& ctx) {
    std::istringstream mf(ctx.read_artifact("overlay", artifact::map_full));
    auto rows = read_layout_map_file(mf);
    std::istringstream net(ctx.read_artifact("overlay", artifact::combined_net));
    SimilarityMatrix sim = read_network_file(net, rows.size());
    std::istringstream sel(ctx.read_artifact("overlay", artifact::selected));
    auto selected = read_selected_csv(sel);

    MapLayout base;
    base.converged = true;
    Clustering clusters;
    clusters.cluster_count = 0;
    std::map<std::string, std::size_t> index;
    for (const auto& r : rows) {
        index[r.label] = base.size();
        base.ids.push_back(r.label);
        base.positions.push_back(r.position);
        clusters.labels.push_back(r.cluster);
        clusters.cluster_count = std::max(clusters.cluster_count, r.cluster);
    }

    std::set<std::string> subset(selected.begin(), selected.end());
    OverlaySpec overlay = make_overlay(base, clusters, subset);

    std::vector<std::size_t> subset_idx;
    for (const auto& id : selected) subset_idx.push_back(index.at(id));
    std::sort(subset_idx.begin(), subset_idx.end());
    CohesionReport cohesion_report =
        cohesion(sim, subset_idx, ctx.cfg.permutations, ctx.cfg.seed, &clusters);

    Corpus corpus = stage_detail::load_corpus_with_categories(ctx.cfg);
    auto categories = stage_detail::category_map(corpus);
    auto core_idx = core_extract(sim, subset_idx, ctx.cfg.core_quantile);
    std::set<std::string> core;
    for (std::size_t i : core_idx) core.insert(base.ids[i]);

    nlohmann::json oj;
    oj["subset_size"] = subset.size();
    oj["cohesion"] = cohesion_json(cohesion_report);
    if (!core.empty())
        oj["core_stats"] = core_stats_json(category_shares(core, categories));
    else
        oj["core_stats"] = nullptr;

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::map_full] = hash_file((ctx.out / artifact::map_full).string());
    inputs[artifact::combined_net] = hash_file((ctx.out / artifact::combined_net).string());
    inputs[artifact::selected] = hash_file((ctx.out / artifact::selected).string());

    ctx.write_artifact(artifact::overlay_json, oj.dump(2) + "\n", inputs);
    ctx.write_artifact(artifact::overlay_svg, render_overlay_svg(overlay), inputs);
}

inline void stage_categraph(StageContext& ctx) {
    std::istringstream sel(ctx.read_artifact("categraph", artifact::selected));
    auto selected = read_selected_csv(sel);
    Corpus corpus = stage_detail::load_corpus_with_categories(ctx.cfg);
    auto categories = stage_detail::category_map(corpus);

    CategoryGraph graph = build_category_graph(selected, categories);
    MapLayout layout;
    if (graph.size() >= 2) {
        layout = fr_layout(graph, ctx.cfg.fr_k, ctx.cfg.fr_iterations, ctx.cfg.seed);
    } else {
        layout.ids = graph.categories;
        layout.positions.assign(graph.size(), {0.0, 0.0});
        layout.converged = true;
    }

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    inputs[artifact::selected] = hash_file((ctx.out / artifact::selected).string());

    ctx.write_artifact(artifact::categraph_json_file, categraph_json(graph, layout).dump(2) + "\n",
                       inputs);
    ctx.write_artifact(artifact::categraph_svg, render_categraph_svg(graph, layout), inputs);
}

// --- full run -----------------------------------------------------------

inline void write_report(StageContext& ctx) {
    nlohmann::json report;

    std::istringstream kw(ctx.read_artifact("report", artifact::keywords));
    {
        csv::Reader reader(kw);
        std::vector<std::string> row;
        std::size_t count = 0;
        while (reader.next(row))
            if (!(row.size() == 1 && row[0].empty()) && row[0] != "term") ++count;
        report["keyword_count"] = count;
    }
    {
        std::istringstream ds(ctx.read_artifact("report", artifact::descriptors));
        DescriptorSet dset = read_descriptor_csv(ds, ctx.cfg.term_core);
        report["descriptor_count"] = {{"primary", dset.primary.size()},
                                      {"secondary", dset.secondary.size()}};
    }
    {
        std::istringstream bd(ctx.read_artifact("report", artifact::bands));
        csv::Reader reader(bd);
        std::vector<std::string> row;
        nlohmann::json rows = nlohmann::json::array();
        while (reader.next(row)) {
            if (row.size() != 5 || row[0] == "threshold") continue;
            rows.push_back({{"threshold", std::stod(row[0])},
                            {"included", std::stoull(row[1])},
                            {"errors", std::stoull(row[2])},
                            {"error_percent", std::stoll(row[3])},
                            {"avg_pp", std::stoll(row[4])}});
        }
        report["band_table"] = rows;
    }
    report["cutoff"] =
        nlohmann::json::parse(ctx.read_artifact("report", artifact::cutoff));
    {
        std::istringstream sel(ctx.read_artifact("report", artifact::selected));
        report["selected_count"] = read_selected_csv(sel).size();
    }
    {
        nlohmann::json cluster_info =
            nlohmann::json::parse(ctx.read_artifact("report", artifact::cluster_info));
        report["cluster_count"] = cluster_info.at("cluster_count");
        report["cluster_quality"] = cluster_info.at("quality");
    }
    {
        nlohmann::json oj = nlohmann::json::parse(ctx.read_artifact("report", artifact::overlay_json));
        report["cohesion"] = oj.at("cohesion");
        report["core_stats"] = oj.at("core_stats");
    }

    auto inputs = stage_detail::base_inputs(ctx.cfg);
    for (const char* a : {artifact::keywords, artifact::descriptors, artifact::bands,
                          artifact::cutoff, artifact::selected, artifact::cluster_info,
                          artifact::overlay_json})
        inputs[a] = hash_file((ctx.out / a).string());
    ctx.write_artifact(artifact::report, report.dump(2) + "\n", inputs);
}

inline nlohmann::json run_pipeline(const PipelineConfig& cfg) {
    StageContext ctx = StageContext::open(cfg);
    struct Step {
        const char* name;
        void (*fn)(StageContext&);
    };
    const Step steps[] = {
        {"ingest", stage_ingest},     {"descriptors", stage_descriptors},
        {"participate", stage_participate}, {"bands", stage_bands},
        {"simnet", stage_simnet},     {"map", stage_map},
        {"cluster", stage_cluster},   {"overlay", stage_overlay},
        {"categraph", stage_categraph},
    };
    for (const auto& step : steps) {
        try {
            step.fn(ctx);
        } catch (const StageDependencyError&) {
            throw;
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("stage ") + step.name + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(std::string("stage ") + step.name + ": " + e.what());
        }
        ctx.stamps.save();
    }
    write_report(ctx);
    ctx.stamps.save();
    return nlohmann::json::parse(ctx.read_artifact("run", artifact::report));
}

} // namespace sciencemap
