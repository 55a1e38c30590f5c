#pragma once

#include "asymsim/platform.hpp"
#include "asymsim/task_graph.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace asymsim {

enum class BLevelWeights { Unit, Flops };

struct BLevelTable {
    std::unordered_map<TaskId, double> levels;
    double at(TaskId id) const;
};

// Bottom level: longest downward distance to any leaf. Leaves score 0 under
// unit weights and their own cost under flop weights; inner tasks add the
// child's weight along the heaviest child path.
BLevelTable compute_blevels(const TaskGraph& graph,
                            BLevelWeights weights = BLevelWeights::Unit);

enum class WorkStealing { BigStealsOnly, Bidirectional };
std::string_view to_string(WorkStealing mode);
WorkStealing work_stealing_from_string(std::string_view name);

struct SchedulerOptions {
    WorkStealing work_stealing = WorkStealing::BigStealsOnly;
    BLevelWeights blevel_weights = BLevelWeights::Unit;
    bool random_tie_break = false; // randomizes equal-blevel pop order
};

enum class Criticality { Critical, NonCritical };

// Priority queue over ready tasks: descending blevel, ties by ascending id
// (or by a seeded random draw first when random tie-breaking is on).
class ReadyQueue {
public:
    struct Entry {
        double blevel = 0.0;
        std::uint64_t tie = 0;
        TaskId id = 0;
        bool operator<(const Entry& other) const;
    };

    void push(TaskId id, double blevel, std::uint64_t tie);
    std::optional<TaskId> pop();
    const Entry* peek() const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    std::set<Entry> entries_;
};

// Two-queue state shared by every policy: critical tasks (those whose blevel
// matches the current ready maximum) go to the big cluster's queue, the rest
// to the LITTLE one. Tracks the counters the frequency/gating rules consume
// and the per-cluster schedulable flags those rules flip.
class SchedulerState {
public:
    SchedulerState(const TaskGraph& graph, const BLevelTable& blevels,
                   const SchedulerOptions& options, int cluster_count,
                   int fast_cluster, std::uint64_t seed);

    // Called exactly once per task, when its last dependence resolves.
    Criticality classify_on_ready(TaskId id);

    // Pop for one idle core. Big cores serve the critical queue and fall back
    // to the non-critical one; LITTLE cores serve the non-critical queue and
    // take critical work only under bidirectional stealing. When the opposite
    // cluster is not schedulable its queue is served by whoever is left, so
    // gating one cluster never strands ready work.
    std::optional<TaskId> fetch_task(CoreId core);

    std::int64_t n_crit() const { return static_cast<std::int64_t>(critical_.size()); }
    std::int64_t n_non_crit() const { return static_cast<std::int64_t>(non_critical_.size()); }
    std::int64_t n_ready() const { return n_crit() + n_non_crit(); }
    std::int64_t n_max() const { return n_max_; }       // high-water mark of n_ready
    std::int64_t n_max_nc() const { return n_max_nc_; } // high-water mark of n_non_crit

    void set_schedulable(int cluster, bool value);
    bool schedulable(int cluster) const;

    double blevel(TaskId id) const { return blevels_->at(id); }
    const SchedulerOptions& options() const { return options_; }
    int fast_cluster() const { return fast_cluster_; }

private:
    std::uint64_t next_tie(TaskId id);

    const TaskGraph* graph_;
    const BLevelTable* blevels_;
    SchedulerOptions options_;
    int fast_cluster_;
    ReadyQueue critical_;
    ReadyQueue non_critical_;
    std::vector<char> cluster_schedulable_;
    std::int64_t n_max_ = 0;
    std::int64_t n_max_nc_ = 0;
    std::unordered_set<TaskId> ever_ready_;
    std::mt19937_64 rng_;
};

} // namespace asymsim
