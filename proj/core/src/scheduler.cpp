#include "asymsim/scheduler.hpp"

#include "asymsim/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace asymsim {

double BLevelTable::at(TaskId id) const {
    auto it = levels.find(id);
    if (it == levels.end())
        throw ConfigError("no blevel for task id " + std::to_string(id));
    return it->second;
}

BLevelTable compute_blevels(const TaskGraph& graph, BLevelWeights weights) {
    const std::vector<TaskId> order = graph.topological_order();
    BLevelTable table;
    table.levels.reserve(graph.task_count());

    auto weight = [&](TaskId id) {
        return weights == BLevelWeights::Unit ? 1.0 : graph.task(id).flops;
    };

    // Leaves sit at 0; every edge adds the weight of the task it leads to.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TaskId id = *it;
        double level = 0.0;
        for (TaskId child : graph.successors(id))
            level = std::max(level, table.levels.at(child) + weight(child));
        table.levels.emplace(id, level);
    }
    return table;
}

std::string_view to_string(WorkStealing mode) {
    switch (mode) {
    case WorkStealing::BigStealsOnly: return "big_only";
    case WorkStealing::Bidirectional: return "bidirectional";
    }
    throw ConfigError("invalid work stealing value");
}

WorkStealing work_stealing_from_string(std::string_view name) {
    if (name == "big_only") return WorkStealing::BigStealsOnly;
    if (name == "bidirectional") return WorkStealing::Bidirectional;
    throw ConfigError("unknown work_stealing mode \"" + std::string(name) + "\"");
}

bool ReadyQueue::Entry::operator<(const Entry& other) const {
    if (blevel != other.blevel)
        return blevel > other.blevel; // higher blevel first
    if (tie != other.tie)
        return tie < other.tie;
    return id < other.id;
}

void ReadyQueue::push(TaskId id, double blevel, std::uint64_t tie) {
    entries_.insert(Entry{blevel, tie, id});
}

std::optional<TaskId> ReadyQueue::pop() {
    if (entries_.empty())
        return std::nullopt;
    auto it = entries_.begin();
    TaskId id = it->id;
    entries_.erase(it);
    return id;
}

const ReadyQueue::Entry* ReadyQueue::peek() const {
    return entries_.empty() ? nullptr : &*entries_.begin();
}

SchedulerState::SchedulerState(const TaskGraph& graph, const BLevelTable& blevels,
                               const SchedulerOptions& options, int cluster_count,
                               int fast_cluster, std::uint64_t seed)
    : graph_(&graph), blevels_(&blevels), options_(options), fast_cluster_(fast_cluster),
      cluster_schedulable_(static_cast<std::size_t>(cluster_count), 1), rng_(seed) {
    if (fast_cluster < 0 || fast_cluster >= cluster_count)
        throw ConfigError("fast cluster index out of range");
}

std::uint64_t SchedulerState::next_tie(TaskId) {
    return options_.random_tie_break ? rng_() : 0;
}

Criticality SchedulerState::classify_on_ready(TaskId id) {
    if (!ever_ready_.insert(id).second)
        throw std::logic_error("task " + std::to_string(id) + " readied twice");

    const double level = blevels_->at(id);
    double ready_max = level;
    if (const auto* top = critical_.peek())
        ready_max = std::max(ready_max, top->blevel);
    if (const auto* top = non_critical_.peek())
        ready_max = std::max(ready_max, top->blevel);

    const Criticality c = level >= ready_max ? Criticality::Critical : Criticality::NonCritical;
    (c == Criticality::Critical ? critical_ : non_critical_).push(id, level, next_tie(id));

    n_max_ = std::max(n_max_, n_ready());
    n_max_nc_ = std::max(n_max_nc_, n_non_crit());
    return c;
}

std::optional<TaskId> SchedulerState::fetch_task(CoreId core) {
    if (!schedulable(core.cluster))
        return std::nullopt;

    const bool fast = core.cluster == fast_cluster_;
    if (fast) {
        if (auto id = critical_.pop())
            return id;
        return non_critical_.pop(); // big cores always steal leftover work
    }
    if (auto id = non_critical_.pop())
        return id;
    // LITTLE takes critical work under bidirectional stealing, and always
    // while the big cluster is gated; otherwise critical tasks would sit
    // ready with nobody allowed to run them.
    if (options_.work_stealing == WorkStealing::Bidirectional || !schedulable(fast_cluster_))
        return critical_.pop();
    return std::nullopt;
}

void SchedulerState::set_schedulable(int cluster, bool value) {
    cluster_schedulable_.at(static_cast<std::size_t>(cluster)) = value ? 1 : 0;
}

bool SchedulerState::schedulable(int cluster) const {
    return cluster_schedulable_.at(static_cast<std::size_t>(cluster)) != 0;
}

} // namespace asymsim
