// sciencemap: deterministic science-mapping pipeline over bibliographic CSV
// corpora. Subcommands run individual stages against an artifact directory;
// `run` executes the whole chain and writes report.json.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sciencemap/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> term_core;
    std::optional<std::size_t> min_occurrence;
    std::optional<std::size_t> top_n;
    std::optional<double> min_avg_pp;
    std::optional<double> gamma;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> max_iter;
    std::optional<double> tol;
    std::optional<std::size_t> permutations;
    std::optional<double> core_quantile;
    std::optional<double> bandwidth;
    std::optional<double> fr_k;
    std::optional<std::size_t> fr_iterations;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "pipeline config JSON file");
    cmd->add_option("--out", o.out, "output directory (overrides config and SCIENCEMAP_OUT)");
    cmd->add_option("--seed", o.seed, "seed for every randomized stage");
    cmd->add_option("--term-core", o.term_core, "core term of the discipline");
    cmd->add_option("--min-occurrence", o.min_occurrence, "descriptor occurrence floor");
    cmd->add_option("--top-n", o.top_n, "number of primary descriptors");
    cmd->add_option("--min-avg-pp", o.min_avg_pp, "average participation bar for the cutoff");
    cmd->add_option("--gamma", o.gamma, "clustering resolution (0 = auto)");
    cmd->add_option("--restarts", o.restarts, "clustering restarts");
    cmd->add_option("--max-iter", o.max_iter, "layout iteration cap");
    cmd->add_option("--tol", o.tol, "layout relative-objective tolerance");
    cmd->add_option("--permutations", o.permutations, "cohesion permutation count");
    cmd->add_option("--core-quantile", o.core_quantile, "core strength quantile in (0,1)");
    cmd->add_option("--bandwidth", o.bandwidth, "density kernel bandwidth in map units");
    cmd->add_option("--fr-k", o.fr_k, "category layout ideal distance (0 = sqrt(1/n))");
    cmd->add_option("--fr-iterations", o.fr_iterations, "category layout iterations");
}

sciencemap::PipelineConfig build_config(const Overrides& o) {
    if (o.config.empty()) throw sciencemap::ConfigError("--config is required");
    sciencemap::PipelineConfig cfg = sciencemap::load_config(o.config);
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (cfg.out_dir.empty()) {
        const char* env = std::getenv("SCIENCEMAP_OUT");
        if (env != nullptr) cfg.out_dir = env;
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.term_core) cfg.term_core = *o.term_core;
    if (o.min_occurrence) cfg.min_occurrence = *o.min_occurrence;
    if (o.top_n) cfg.top_n = *o.top_n;
    if (o.min_avg_pp) cfg.min_avg_pp = *o.min_avg_pp;
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.restarts) cfg.cluster_restarts = *o.restarts;
    if (o.max_iter) cfg.layout_max_iter = *o.max_iter;
    if (o.tol) cfg.layout_tol = *o.tol;
    if (o.permutations) cfg.permutations = *o.permutations;
    if (o.core_quantile) cfg.core_quantile = *o.core_quantile;
    if (o.bandwidth) cfg.density_bandwidth = *o.bandwidth;
    if (o.fr_k) cfg.fr_k = *o.fr_k;
    if (o.fr_iterations) cfg.fr_iterations = *o.fr_iterations;
    return cfg;
}

void run_stage(const Overrides& o, void (*stage)(sciencemap::StageContext&)) {
    sciencemap::StageContext ctx = sciencemap::StageContext::open(build_config(o));
    stage(ctx);
    ctx.stamps.save();
}

// Replay mode: reprint a published aggregate band table with the error% and
// rounded-average columns recomputed by the band formatter.
void replay_bands(const std::string& path) {
    auto published = sciencemap::load_published_bands(path);
    auto table = sciencemap::format_published_bands(published);
    std::cout << "threshold  included  errors  error%  avg_pp\n";
    for (const auto& b : table)
        std::cout << std::setw(9) << b.threshold_percent << "  " << std::setw(8) << b.included
                  << "  " << std::setw(6) << b.errors << "  " << std::setw(6) << b.error_percent
                  << "  " << std::setw(6) << b.avg_pp << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"science mapping pipeline for bibliographic corpora"};
    app.require_subcommand(1);

    Overrides o;
    std::string pp_only_path;

    CLI::App* cmd_run = app.add_subcommand("run", "execute the full pipeline");
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "validate and register the corpus");
    CLI::App* cmd_descriptors =
        app.add_subcommand("descriptors", "extract primary/secondary descriptors");
    CLI::App* cmd_participate =
        app.add_subcommand("participate", "compute TNA/NRA/participation percentages");
    CLI::App* cmd_bands = app.add_subcommand("bands", "build the cut-off band table and select");
    CLI::App* cmd_simnet = app.add_subcommand("simnet", "build citation channels and combine");
    CLI::App* cmd_map = app.add_subcommand("map", "compute the 2-D science map layout");
    CLI::App* cmd_cluster = app.add_subcommand("cluster", "cluster the map and render density");
    CLI::App* cmd_overlay = app.add_subcommand("overlay", "overlay the selected subset");
    CLI::App* cmd_categraph = app.add_subcommand("categraph", "category co-assignment graph");

    for (CLI::App* cmd : {cmd_run, cmd_ingest, cmd_descriptors, cmd_participate, cmd_bands,
                          cmd_simnet, cmd_map, cmd_cluster, cmd_overlay, cmd_categraph})
        add_common_options(cmd, o);
    cmd_participate->add_option("--pp-only", pp_only_path,
                                "replay a published aggregate band table and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_run->parsed()) {
            sciencemap::PipelineConfig cfg = build_config(o);
            sciencemap::run_pipeline(cfg);
            std::cout << "report: "
                      << (std::filesystem::path(cfg.out_dir) / sciencemap::artifact::report)
                             .string()
                      << '\n';
        } else if (cmd_ingest->parsed()) {
            run_stage(o, sciencemap::stage_ingest);
        } else if (cmd_descriptors->parsed()) {
            run_stage(o, sciencemap::stage_descriptors);
        } else if (cmd_participate->parsed()) {
            if (!pp_only_path.empty())
                replay_bands(pp_only_path);
            else
                run_stage(o, sciencemap::stage_participate);
        } else if (cmd_bands->parsed()) {
            run_stage(o, sciencemap::stage_bands);
        } else if (cmd_simnet->parsed()) {
            run_stage(o, sciencemap::stage_simnet);
        } else if (cmd_map->parsed()) {
            run_stage(o, sciencemap::stage_map);
        } else if (cmd_cluster->parsed()) {
            run_stage(o, sciencemap::stage_cluster);
        } else if (cmd_overlay->parsed()) {
            run_stage(o, sciencemap::stage_overlay);
        } else if (cmd_categraph->parsed()) {
            run_stage(o, sciencemap::stage_categraph);
        }
    } catch (const sciencemap::StageDependencyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const sciencemap::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sciencemap::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
