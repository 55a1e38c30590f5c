#pragma once

#include "asymsim/platform.hpp"
#include "asymsim/policy.hpp"
#include "asymsim/scheduler.hpp"
#include "asymsim/task_graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace asymsim {

struct TraceRecord {
    int core = 0; // global core id
    TaskId task = 0;
    TaskKind kind = TaskKind::Generic;
    double start_s = 0.0;
    double end_s = 0.0;
    int freq_mhz = 0; // cluster frequency when the task started
};

struct PowerSample {
    double t0_s = 0.0;
    double t1_s = 0.0;
    double watts = 0.0;
};

// Counter snapshot taken after each ready-set change (both inserts and pops),
// i.e. exactly the inputs the policy saw at that instant.
struct QueuePoint {
    double t_s = 0.0;
    std::int64_t n_crit = 0;
    std::int64_t n_non_crit = 0;
    std::int64_t n_max = 0;
    std::int64_t n_max_nc = 0;
};

struct FreqPoint {
    double t_s = 0.0;
    int cluster = 0;
    int freq_mhz = 0;
};

struct FlagPoint {
    double t_s = 0.0;
    int cluster = 0;
    bool value = false;
};

struct SimulationResult {
    double makespan_s = 0.0;
    double total_flops = 0.0;
    double gflops = 0.0;
    double energy_j = 0.0;
    double avg_power_w = 0.0;
    double gflops_per_watt = 0.0;
    std::vector<double> pct_time_unusable; // per cluster, 0..100
    std::vector<double> powered_off_s;     // per cluster

    std::vector<TraceRecord> trace;           // ordered by start time
    std::vector<PowerSample> power_samples;   // gapless partition of [0, makespan)
    std::vector<QueuePoint> queue_series;
    std::vector<FreqPoint> freq_series;       // initial values at t=0, then changes
    std::vector<FlagPoint> schedulable_series; // initial values at t=0, then changes
    std::vector<FlagPoint> power_on_series;    // initial values at t=0, then changes
};

// Runs the task graph to completion on the platform under one policy.
// Deterministic: same inputs and seed give a bit-identical result. The seed
// only matters when random tie-breaking is enabled.
SimulationResult simulate(const TaskGraph& graph, const PlatformModel& platform,
                          const SchedulerOptions& options, const PolicyConfig& policy,
                          std::uint64_t seed = 0);

// Sums watts * dt, first checking that samples form a contiguous partition
// starting at 0 with non-negative spans and watts.
double integrate_energy_j(std::span<const PowerSample> samples);

// Share of [0, makespan) the cluster spent not schedulable, in percent.
double pct_time_unusable(const SimulationResult& result, int cluster);

} // namespace asymsim
