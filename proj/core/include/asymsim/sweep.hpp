#pragma once

#include "asymsim/cholesky.hpp"
#include "asymsim/engine.hpp"
#include "asymsim/policy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace asymsim {

struct SweepCell {
    int matrix_dim = 0;
    int block_dim = 0;
    bool operator==(const SweepCell&) const = default;
};

// Problem sizes paired the way the result tables expect: two block sizes per
// matrix size, larger blocks for larger matrices.
std::vector<SweepCell> default_sweep_cells();
std::vector<double> default_sweep_thresholds(); // {10,20,30,40,50}

struct SweepSpec {
    std::vector<SweepCell> cells = default_sweep_cells();
    std::vector<PolicyKind> policies = {
        PolicyKind::Fs1, PolicyKind::Fs2, PolicyKind::Fs2Prime, PolicyKind::Fs3,
        PolicyKind::Ts1, PolicyKind::Ts2, PolicyKind::Ts3,
    };
    std::vector<double> thresholds = default_sweep_thresholds(); // ts* rows
    FlopAccounting flop_accounting = FlopAccounting::LeadingOrder;
    SchedulerOptions scheduler;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

struct MetricSnapshot {
    double makespan_s = 0.0;
    double gflops = 0.0;
    double energy_j = 0.0;
    double avg_power_w = 0.0;
    double gflops_per_watt = 0.0;
};

struct SweepOutcome {
    SweepCell cell;
    PolicyKind policy = PolicyKind::PBotlev;
    std::optional<double> n_thres_pct; // set for ts* rows
    MetricSnapshot baseline;           // pbotlev on the same cell
    MetricSnapshot result;
    double delta_avg_power_w = 0.0;    // result - baseline
    double delta_gflops_per_watt = 0.0;
    double delta_avg_power_pct = 0.0;  // relative to baseline, in percent
    double delta_gflops_per_watt_pct = 0.0;
    double pct_target_unusable = 0.0;  // ts* only, else 0
    std::string error;                 // nonempty when this cell failed

    bool failed() const { return !error.empty(); }
};

struct SweepReport {
    std::vector<SweepCell> cells;
    std::vector<SweepOutcome> outcomes; // canonical order: policy, threshold, cell
};

// Runs baseline + every policy row over every cell. Cells run on up to
// `workers` threads; a failing cell is recorded and does not stop the rest.
SweepReport run_sweep(const SweepSpec& spec, const PlatformModel& platform);

std::string sweep_report_json(const SweepReport& report, const PlatformModel& platform);
SweepReport sweep_report_from_json_string(std::string_view text);

// Text tables, one row per policy/threshold, one column per cell.
enum class SweepMetric { DeltaAvgPowerW, DeltaAvgPowerPct, DeltaGflopsPerWatt, DeltaGflopsPerWattPct, PctTargetUnusable };
std::string render_sweep_table(const SweepReport& report, SweepMetric metric);
std::string render_sweep_tables(const SweepReport& report); // all of the above

} // namespace asymsim
