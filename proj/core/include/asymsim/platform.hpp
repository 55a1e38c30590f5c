#pragma once

#include "asymsim/task_graph.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asymsim {

// Per-busy-core dynamic power draw. Either an explicit table keyed by
// frequency step, or at_ref_w * (f/f_ref)^exponent.
struct DynPowerModel {
    bool parametric = true;
    double at_ref_w = 0.0;
    double exponent = 3.0;
    std::map<int, double> table_w; // MHz -> W, one entry per table step

    double watts_at(int freq_mhz, int ref_freq_mhz) const;
};

// One cluster: homogeneous cores sharing a frequency domain.
struct ClusterModel {
    std::string name;
    int core_count = 0;
    std::vector<int> freq_table_mhz; // ascending
    int ref_freq_mhz = 0;            // 0 -> defaults to max step
    int initial_freq_mhz = 0;        // 0 -> defaults to max step
    std::map<TaskKind, double> speed_gflops; // at ref frequency
    std::vector<double> idle_power_w;        // indexed by busy-core count, size core_count+1
    DynPowerModel dyn_power;
    bool supports_power_off = false;
    double power_off_floor_w = 0.0;

    int max_frequency_mhz() const { return freq_table_mhz.back(); }
    int min_frequency_mhz() const { return freq_table_mhz.front(); }
    bool has_frequency(int mhz) const;
    // k = 1 -> highest step; k clamped into [1, table size].
    int kth_max_frequency_mhz(int k) const;

    bool has_speed_for(TaskKind kind) const { return speed_gflops.count(kind) != 0; }
    double speed_gflops_at(TaskKind kind, int freq_mhz) const;
    double dyn_power_w_at(int freq_mhz) const;
    double idle_power_at(int busy_cores) const;

    void validate() const;
};

struct CoreId {
    int cluster = 0;
    int index = 0;
    bool operator==(const CoreId&) const = default;
};

struct PlatformModel {
    std::string name;
    std::vector<ClusterModel> clusters;
    double dvfs_latency_s = 0.0;
    double migration_penalty_s = 0.0;
    int core0_cluster = 0;         // cluster whose cores get the lowest global ids
    bool retime_on_dvfs = false;   // recompute in-flight completions on frequency change

    int total_cores() const;
    int cluster_count() const { return static_cast<int>(clusters.size()); }
    int global_core_id(CoreId core) const;
    CoreId core_at(int global_id) const;

    int cluster_index(std::string_view cluster_name) const; // throws ConfigError
    int find_cluster(std::string_view cluster_name) const;  // -1 when absent
    // The two roles the scheduler cares about. Both throw when absent.
    int big_index() const { return cluster_index("big"); }
    int little_index() const { return cluster_index("LITTLE"); }

    void validate() const;

    // Built-in model of an Exynos 5422 style board: 4 LITTLE + 4 big cores,
    // both clusters stepping 800..1300 MHz by 100, big about 4x faster and
    // much more power hungry. Speeds and watts are model defaults chosen in
    // plausible ranges for that silicon, not measurements.
    static PlatformModel exynos5422_default();
};

PlatformModel platform_from_json_string(std::string_view text);
std::string platform_to_json_string(const PlatformModel& platform);
PlatformModel load_platform(const std::filesystem::path& file);

// Seconds to run one task on one core of `cluster` at `freq_mhz`.
// flops / (speed_gflops * 1e9 * freq/ref). Throws ConfigError when the
// cluster has no speed entry for the task's kind.
double exec_time_s(const Task& task, const ClusterModel& cluster, int freq_mhz);

struct ClusterPowerState {
    int freq_mhz = 0;
    int busy_cores = 0;
    bool powered_on = true;
};

// Sum over clusters: power_off_floor_w when off, else
// idle_power_w[busy] + busy * dyn_power_w(freq).
double instantaneous_power_w(const PlatformModel& platform,
                             std::span<const ClusterPowerState> states);

} // namespace asymsim
