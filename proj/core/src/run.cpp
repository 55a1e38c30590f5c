#include "asymsim/run.hpp"

#include "asymsim/errors.hpp"

#include <fstream>
#include <sstream>

namespace asymsim {

void RunConfig::validate() const {
    if (!cholesky && !dag_file)
        throw ConfigError("nothing to run: give a dag file or a cholesky size");
    if (cholesky && dag_file)
        throw ConfigError("give either a dag file or a cholesky size, not both");
    if (cholesky)
        cholesky->validate();
    policy.validate();
    if (repetitions < 1)
        throw ConfigError("repetitions must be at least 1");
}

PlatformModel resolve_platform(const std::optional<std::filesystem::path>& file) {
    if (file)
        return load_platform(*file);
    return PlatformModel::exynos5422_default();
}

RunArtifacts run_single(const RunConfig& config) {
    config.validate();

    RunArtifacts a;
    a.platform = resolve_platform(config.platform_file);
    if (config.cholesky) {
        a.graph = generate_cholesky(*config.cholesky, config.flop_accounting);
        std::ostringstream source;
        source << "cholesky m=" << config.cholesky->matrix_dim
               << " b=" << config.cholesky->block_dim;
        a.metadata.dag_source = source.str();
    } else {
        a.graph = load_dag(*config.dag_file);
        a.metadata.dag_source = config.dag_file->filename().string();
    }

    for (int rep = 0; rep < config.repetitions; ++rep)
        a.result = simulate(a.graph, a.platform, config.scheduler, config.policy, config.seed);

    a.metadata.policy = std::string(to_string(config.policy.kind));
    a.metadata.work_stealing = std::string(to_string(config.scheduler.work_stealing));
    a.metadata.blevel_weights =
        config.scheduler.blevel_weights == BLevelWeights::Unit ? "unit" : "flops";
    a.metadata.has_threshold = config.policy.is_ts();
    a.metadata.n_thres_pct = config.policy.n_thres_pct;
    a.metadata.seed = config.seed;
    a.metadata.task_count = a.graph.task_count();
    a.metadata.edge_count = a.graph.edge_count();
    return a;
}

std::string write_run_outputs(const RunConfig& config, const RunArtifacts& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec)
        throw SimulationError("cannot create output directory " + config.out_dir.string());

    const std::string summary =
        result_summary_json(artifacts.result, artifacts.platform, artifacts.metadata);
    write_text_file(config.out_dir / "summary.json", summary);

    if (config.emit_trace) {
        std::ofstream out(config.out_dir / "trace.csv");
        if (!out)
            throw SimulationError("cannot write trace.csv");
        write_trace_csv(artifacts.result, out);
    }
    if (config.emit_series) {
        std::ofstream out(config.out_dir / "series.csv");
        if (!out)
            throw SimulationError("cannot write series.csv");
        write_series_csv(artifacts.result, artifacts.platform, out);
    }
    return summary;
}

} // namespace asymsim
