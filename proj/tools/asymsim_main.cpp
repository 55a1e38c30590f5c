#include "asymsim/cholesky.hpp"
#include "asymsim/errors.hpp"
#include "asymsim/run.hpp"
#include "asymsim/sweep.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GlobalArgs {
    std::string platform_file;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int workers = 0; // 0 -> one per hardware thread
};

std::optional<std::filesystem::path> platform_path(const GlobalArgs& g) {
    if (g.platform_file.empty())
        return std::nullopt;
    return std::filesystem::path(g.platform_file);
}

int effective_workers(const GlobalArgs& g) {
    if (g.workers > 0)
        return g.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, sep))
        parts.push_back(item);
    return parts;
}

asymsim::FlopAccounting accounting_from_string(const std::string& name) {
    if (name == "leading")
        return asymsim::FlopAccounting::LeadingOrder;
    if (name == "exact")
        return asymsim::FlopAccounting::Exact;
    throw asymsim::ConfigError("unknown flop accounting \"" + name + "\" (leading|exact)");
}

asymsim::BLevelWeights blevel_weights_from_string(const std::string& name) {
    if (name == "unit")
        return asymsim::BLevelWeights::Unit;
    if (name == "flops")
        return asymsim::BLevelWeights::Flops;
    throw asymsim::ConfigError("unknown blevel weights \"" + name + "\" (unit|flops)");
}

std::vector<asymsim::SweepCell> cells_from_string(const std::string& text) {
    std::vector<asymsim::SweepCell> cells;
    for (const std::string& part : split(text, ',')) {
        const auto mb = split(part, ':');
        if (mb.size() != 2)
            throw asymsim::ConfigError("bad cell \"" + part + "\", expected m:b");
        try {
            cells.push_back({std::stoi(mb[0]), std::stoi(mb[1])});
        } catch (const std::exception&) {
            throw asymsim::ConfigError("bad cell \"" + part + "\", expected m:b");
        }
    }
    return cells;
}

void print_summary_line(const asymsim::RunArtifacts& a) {
    std::cout << "policy " << a.metadata.policy << " on " << a.metadata.dag_source << ": "
              << "makespan " << a.result.makespan_s << " s, " << a.result.gflops << " GFLOPS, "
              << a.result.avg_power_w << " W avg, " << a.result.gflops_per_watt
              << " GFLOPS/W\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-DAG scheduling simulator for asymmetric (big.LITTLE) multicores"};
    app.require_subcommand(1);
    GlobalArgs global;
    app.add_option("--platform", global.platform_file, "platform model JSON file");
    app.add_option("--out", global.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", global.seed, "seed for randomized tie-breaking");
    app.add_option("--workers", global.workers, "worker threads for sweep cells (0 = all)");

    // gen-dag
    auto* gen = app.add_subcommand("gen-dag", "generate a blocked Cholesky task DAG");
    int gen_m = 0;
    int gen_b = 0;
    std::string gen_accounting = "leading";
    std::string gen_file;
    gen->add_option("--m", gen_m, "matrix dimension")->required();
    gen->add_option("--b", gen_b, "block dimension")->required();
    gen->add_option("--flop-accounting", gen_accounting, "leading|exact")->capture_default_str();
    gen->add_option("--file", gen_file, "output file (default cholesky_m<m>_b<b>.json)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one policy over one DAG");
    std::string sim_dag;
    int sim_m = 0;
    int sim_b = 0;
    std::string sim_policy = "pbotlev";
    double sim_thres = 0.0;
    std::string sim_stealing = "big_only";
    std::string sim_weights = "unit";
    std::string sim_accounting = "leading";
    bool sim_random_tie = false;
    bool sim_trace = false;
    bool sim_series = false;
    int sim_reps = 1;
    sim->add_option("--dag", sim_dag, "task DAG JSON file");
    sim->add_option("--m", sim_m, "cholesky matrix dimension");
    sim->add_option("--b", sim_b, "cholesky block dimension");
    sim->add_option("--policy", sim_policy,
                    "pbotlev|fs1|fs2|fs2p|fs3|ts1|ts2|ts3")->capture_default_str();
    sim->add_option("--n-thres", sim_thres, "gating threshold in percent (ts policies)");
    sim->add_option("--work-stealing", sim_stealing, "big_only|bidirectional")->capture_default_str();
    sim->add_option("--blevel-weights", sim_weights, "unit|flops")->capture_default_str();
    sim->add_option("--flop-accounting", sim_accounting, "leading|exact")->capture_default_str();
    sim->add_flag("--random-tie-break", sim_random_tie, "randomize equal-priority pops (uses --seed)");
    sim->add_flag("--emit-trace", sim_trace, "write trace.csv");
    sim->add_flag("--emit-series", sim_series, "write series.csv");
    sim->add_option("--repetitions", sim_reps, "repeat the run (timing experiments)")
        ->capture_default_str();

    // sweep
    auto* swp = app.add_subcommand("sweep", "run policies against pbotlev over a size grid");
    std::string swp_cells;
    std::string swp_policies;
    std::string swp_thresholds;
    std::string swp_stealing = "big_only";
    std::string swp_weights = "unit";
    std::string swp_accounting = "leading";
    swp->add_option("--cells", swp_cells, "comma list of m:b (default: built-in grid)");
    swp->add_option("--policies", swp_policies, "comma list (default: fs1,fs2,fs2p,fs3,ts1,ts2,ts3)");
    swp->add_option("--thresholds", swp_thresholds, "comma list of percents (default: 10,20,30,40,50)");
    swp->add_option("--work-stealing", swp_stealing, "big_only|bidirectional")->capture_default_str();
    swp->add_option("--blevel-weights", swp_weights, "unit|flops")->capture_default_str();
    swp->add_option("--flop-accounting", swp_accounting, "leading|exact")->capture_default_str();

    // report
    auto* rep = app.add_subcommand("report", "re-render the tables of a sweep report");
    std::string rep_in;
    rep->add_option("--in", rep_in, "sweep report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const std::filesystem::path out_dir(global.out_dir);

        if (gen->parsed()) {
            asymsim::CholeskySpec spec{gen_m, gen_b};
            const asymsim::TaskGraph graph =
                asymsim::generate_cholesky(spec, accounting_from_string(gen_accounting));
            std::filesystem::path file = gen_file.empty()
                ? out_dir / ("cholesky_m" + std::to_string(gen_m) + "_b" + std::to_string(gen_b) +
                             ".json")
                : std::filesystem::path(gen_file);
            std::error_code ec;
            std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path(), ec);
            asymsim::save_dag(graph, file);
            std::cout << "wrote " << file.string() << ": " << graph.task_count() << " tasks, "
                      << graph.edge_count() << " edges\n";
            return 0;
        }

        if (sim->parsed()) {
            asymsim::RunConfig config;
            if (!sim_dag.empty())
                config.dag_file = std::filesystem::path(sim_dag);
            if (sim_m != 0 || sim_b != 0)
                config.cholesky = asymsim::CholeskySpec{sim_m, sim_b};
            config.platform_file = platform_path(global);
            config.flop_accounting = accounting_from_string(sim_accounting);
            config.scheduler.work_stealing = asymsim::work_stealing_from_string(sim_stealing);
            config.scheduler.blevel_weights = blevel_weights_from_string(sim_weights);
            config.scheduler.random_tie_break = sim_random_tie;
            config.policy.kind = asymsim::policy_from_string(sim_policy);
            config.policy.n_thres_pct = sim_thres;
            config.seed = global.seed;
            config.repetitions = sim_reps;
            config.emit_trace = sim_trace;
            config.emit_series = sim_series;
            config.out_dir = out_dir;

            const asymsim::RunArtifacts artifacts = asymsim::run_single(config);
            asymsim::write_run_outputs(config, artifacts);
            print_summary_line(artifacts);
            return 0;
        }

        if (swp->parsed()) {
            asymsim::SweepSpec spec;
            if (!swp_cells.empty())
                spec.cells = cells_from_string(swp_cells);
            if (!swp_policies.empty()) {
                spec.policies.clear();
                for (const std::string& name : split(swp_policies, ','))
                    spec.policies.push_back(asymsim::policy_from_string(name));
            }
            if (!swp_thresholds.empty()) {
                spec.thresholds.clear();
                for (const std::string& t : split(swp_thresholds, ','))
                    spec.thresholds.push_back(std::stod(t));
            }
            spec.scheduler.work_stealing = asymsim::work_stealing_from_string(swp_stealing);
            spec.scheduler.blevel_weights = blevel_weights_from_string(swp_weights);
            spec.flop_accounting = accounting_from_string(swp_accounting);
            spec.seed = global.seed;
            spec.workers = effective_workers(global);

            const asymsim::PlatformModel platform = asymsim::resolve_platform(platform_path(global));
            const asymsim::SweepReport report = asymsim::run_sweep(spec, platform);

            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            const std::string tables = asymsim::render_sweep_tables(report);
            asymsim::write_text_file(out_dir / "sweep.json",
                                     asymsim::sweep_report_json(report, platform));
            asymsim::write_text_file(out_dir / "sweep_tables.txt", tables);
            std::cout << tables;
            std::size_t failed = 0;
            for (const asymsim::SweepOutcome& o : report.outcomes)
                failed += o.failed() ? 1 : 0;
            if (failed > 0)
                std::cerr << failed << " of " << report.outcomes.size() << " sweep rows failed\n";
            return 0;
        }

        if (rep->parsed()) {
            std::ifstream in(rep_in);
            if (!in)
                throw asymsim::ParseError("cannot open sweep report " + rep_in);
            std::ostringstream buf;
            buf << in.rdbuf();
            const asymsim::SweepReport report =
                asymsim::sweep_report_from_json_string(buf.str());
            std::cout << asymsim::render_sweep_tables(report);
            return 0;
        }
    } catch (const asymsim::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const asymsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
