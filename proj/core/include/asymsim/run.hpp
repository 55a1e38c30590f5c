#pragma once

#include "asymsim/cholesky.hpp"
#include "asymsim/engine.hpp"
#include "asymsim/policy.hpp"
#include "asymsim/result_io.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace asymsim {

// One simulation as driven from the command line: where the DAG comes from,
// which platform, which policy, what to write.
struct RunConfig {
    std::optional<CholeskySpec> cholesky;
    std::optional<std::filesystem::path> dag_file;
    std::optional<std::filesystem::path> platform_file; // absent -> built-in model
    FlopAccounting flop_accounting = FlopAccounting::LeadingOrder;
    SchedulerOptions scheduler;
    PolicyConfig policy;
    std::uint64_t seed = 0;
    int repetitions = 1; // extra repetitions re-run the identical simulation
    bool emit_trace = false;
    bool emit_series = false;
    std::filesystem::path out_dir = ".";

    void validate() const;
};

struct RunArtifacts {
    PlatformModel platform;
    TaskGraph graph;
    SimulationResult result;
    RunMetadata metadata;
};

PlatformModel resolve_platform(const std::optional<std::filesystem::path>& file);

RunArtifacts run_single(const RunConfig& config);

// Writes summary.json and, when asked, trace.csv / series.csv into out_dir.
// Returns the summary JSON text.
std::string write_run_outputs(const RunConfig& config, const RunArtifacts& artifacts);

} // namespace asymsim
