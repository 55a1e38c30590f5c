#include "asymsim/engine.hpp"

#include "asymsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace asymsim {

namespace {

// At equal timestamps frequency changes land before completions, so a task
// finishing right at a DVFS boundary already sees the new frequency.
enum EventKind : int { kDvfsApplied = 0, kTaskComplete = 1 };

struct Event {
    double time_s = 0.0;
    int kind = 0;
    std::int64_t payload = 0;    // task id or cluster index
    std::int64_t generation = 0; // stale events are skipped on pop

    bool operator>(const Event& o) const {
        if (time_s != o.time_s) return time_s > o.time_s;
        if (kind != o.kind) return kind > o.kind;
        if (payload != o.payload) return payload > o.payload;
        return generation > o.generation;
    }
};

struct RunningTask {
    TaskId id = -1;
    double start_s = 0.0;
    int freq_mhz = 0;
    double remaining_work = 0.0; // flop-equivalents left as of last_update_s
    double speed = 0.0;          // flop-equivalents per second at current freq
    double last_update_s = 0.0;
    std::int64_t generation = 0;
    bool valid = false;
};

struct ClusterRuntime {
    int freq_mhz = 0;
    int pending_freq_mhz = -1;
    std::int64_t freq_generation = 0;
    bool powered = true;
    bool power_off_requested = false;
    bool migration_penalty_pending = false;
    int busy = 0;
    int reserved = 0; // fetched but not yet started; blocks power-off
};

class Simulation {
public:
    Simulation(const TaskGraph& graph, const PlatformModel& platform,
               const SchedulerOptions& options, const PolicyConfig& policy_config,
               std::uint64_t seed)
        : graph_(graph), platform_(platform), options_(options),
          policy_(policy_config, platform),
          blevels_(compute_blevels(graph, options.blevel_weights)),
          scheduler_(graph, blevels_, options, platform.cluster_count(),
                     platform.big_index(), seed) {}

    SimulationResult run();

private:
    void validate_speeds() const;
    void seed_initial_series();
    void ready_initial_tasks();
    void process_completion(TaskId id);
    void process_dvfs(int cluster);
    void classify_and_policy(TaskId id);
    void apply_decision(const PolicyDecision& decision);
    void request_frequency(int cluster, int freq_mhz);
    void apply_frequency(int cluster, int freq_mhz);
    void set_schedulable(int cluster, bool value);
    void power_on(int cluster);
    void try_power_off(int cluster);
    void fetch_round();
    void start_task(int global_core, TaskId id);
    void audit_no_idle_core_with_work() const;
    void close_power_interval(double t);
    double current_watts() const;
    void record_queue_point();
    void retime_running(int cluster);
    double flops_per_second(const ClusterModel& cluster, TaskKind kind, int freq_mhz) const;
    SimulationResult finalize(double makespan);

    const TaskGraph& graph_;
    const PlatformModel& platform_;
    SchedulerOptions options_;
    Policy policy_;
    BLevelTable blevels_; // must outlive scheduler_, which keeps a pointer
    SchedulerState scheduler_;

    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
    std::vector<ClusterRuntime> clusters_;
    std::vector<RunningTask> running_;        // by global core id
    std::unordered_map<TaskId, int> core_of_; // running task -> global core
    std::unordered_map<TaskId, std::int64_t> task_generation_;
    std::vector<std::size_t> indegree_; // by task position
    std::vector<char> done_;            // by task position
    double now_ = 0.0;
    double last_power_t_ = 0.0;
    std::size_t completed_ = 0;

    std::vector<TraceRecord> trace_;
    std::vector<PowerSample> power_samples_;
    std::vector<QueuePoint> queue_series_;
    std::vector<FreqPoint> freq_series_;
    std::vector<FlagPoint> schedulable_series_;
    std::vector<FlagPoint> power_on_series_;
};

double Simulation::flops_per_second(const ClusterModel& cluster, TaskKind kind,
                                    int freq_mhz) const {
    return cluster.speed_gflops_at(kind, freq_mhz) * 1e9;
}

void Simulation::validate_speeds() const {
    for (const Task& t : graph_.tasks()) {
        for (const ClusterModel& c : platform_.clusters)
            (void)c.speed_gflops_at(t.kind, c.ref_freq_mhz);
        if (t.flops <= 0.0)
            throw ConfigError("task " + std::to_string(t.id) +
                              " has non-positive flops; it would run in no time");
    }
}

double Simulation::current_watts() const {
    std::vector<ClusterPowerState> states(clusters_.size());
    for (std::size_t i = 0; i < clusters_.size(); ++i)
        states[i] = {clusters_[i].freq_mhz, clusters_[i].busy, clusters_[i].powered};
    return instantaneous_power_w(platform_, states);
}

void Simulation::close_power_interval(double t) {
    if (t < last_power_t_)
        throw std::logic_error("time went backwards while sampling power");
    if (t > last_power_t_) {
        power_samples_.push_back({last_power_t_, t, current_watts()});
        last_power_t_ = t;
    }
}

void Simulation::record_queue_point() {
    queue_series_.push_back({now_, scheduler_.n_crit(), scheduler_.n_non_crit(),
                             scheduler_.n_max(), scheduler_.n_max_nc()});
}

void Simulation::seed_initial_series() {
    for (int c = 0; c < platform_.cluster_count(); ++c) {
        const ClusterModel& model = platform_.clusters[static_cast<std::size_t>(c)];
        clusters_[static_cast<std::size_t>(c)].freq_mhz = model.initial_freq_mhz;
        freq_series_.push_back({0.0, c, model.initial_freq_mhz});
        schedulable_series_.push_back({0.0, c, true});
        power_on_series_.push_back({0.0, c, true});
    }
}

void Simulation::classify_and_policy(TaskId id) {
    scheduler_.classify_on_ready(id);
    record_queue_point();
    apply_decision(policy_.on_ready_set_change(scheduler_));
}

void Simulation::apply_decision(const PolicyDecision& decision) {
    if (decision.schedulable)
        set_schedulable(decision.schedulable->cluster, decision.schedulable->value);
    if (decision.power) {
        const int cluster = decision.power->cluster;
        auto& cr = clusters_[static_cast<std::size_t>(cluster)];
        if (decision.power->powered_on) {
            cr.power_off_requested = false;
            power_on(cluster);
        } else {
            cr.power_off_requested = true;
            try_power_off(cluster); // takes effect once the cluster drains
        }
    }
    if (decision.frequency)
        request_frequency(decision.frequency->cluster, decision.frequency->freq_mhz);
}

void Simulation::request_frequency(int cluster, int freq_mhz) {
    auto& cr = clusters_[static_cast<std::size_t>(cluster)];
    const ClusterModel& model = platform_.clusters[static_cast<std::size_t>(cluster)];
    if (!model.has_frequency(freq_mhz))
        throw ConfigError("cluster " + model.name + " cannot run at " +
                          std::to_string(freq_mhz) + " MHz");
    const int target = cr.pending_freq_mhz >= 0 ? cr.pending_freq_mhz : cr.freq_mhz;
    if (freq_mhz == target)
        return;
    if (platform_.dvfs_latency_s <= 0.0) {
        apply_frequency(cluster, freq_mhz);
        return;
    }
    cr.pending_freq_mhz = freq_mhz;
    ++cr.freq_generation; // strands any change already in flight
    events_.push({now_ + platform_.dvfs_latency_s, kDvfsApplied, cluster, cr.freq_generation});
}

void Simulation::apply_frequency(int cluster, int freq_mhz) {
    auto& cr = clusters_[static_cast<std::size_t>(cluster)];
    cr.pending_freq_mhz = -1;
    if (cr.freq_mhz == freq_mhz)
        return; // a stale request caught up with a newer one
    close_power_interval(now_);
    cr.freq_mhz = freq_mhz;
    freq_series_.push_back({now_, cluster, freq_mhz});
    if (platform_.retime_on_dvfs)
        retime_running(cluster);
}

void Simulation::retime_running(int cluster) {
    const ClusterModel& model = platform_.clusters[static_cast<std::size_t>(cluster)];
    for (int i = 0; i < model.core_count; ++i) {
        const int g = platform_.global_core_id({cluster, i});
        RunningTask& rt = running_[static_cast<std::size_t>(g)];
        if (!rt.valid)
            continue;
        rt.remaining_work = std::max(0.0, rt.remaining_work - (now_ - rt.last_update_s) * rt.speed);
        rt.last_update_s = now_;
        rt.speed = flops_per_second(model, graph_.task(rt.id).kind,
                                    clusters_[static_cast<std::size_t>(cluster)].freq_mhz);
        rt.generation = ++task_generation_[rt.id];
        events_.push({now_ + rt.remaining_work / rt.speed, kTaskComplete, rt.id, rt.generation});
    }
}

void Simulation::set_schedulable(int cluster, bool value) {
    if (scheduler_.schedulable(cluster) == value)
        return;
    scheduler_.set_schedulable(cluster, value);
    schedulable_series_.push_back({now_, cluster, value});
}

void Simulation::power_on(int cluster) {
    auto& cr = clusters_[static_cast<std::size_t>(cluster)];
    if (cr.powered)
        return;
    close_power_interval(now_);
    cr.powered = true;
    cr.migration_penalty_pending = true; // first task start pays the cold cost
    power_on_series_.push_back({now_, cluster, true});
}

void Simulation::try_power_off(int cluster) {
    auto& cr = clusters_[static_cast<std::size_t>(cluster)];
    if (!cr.power_off_requested || !cr.powered || cr.busy > 0 || cr.reserved > 0)
        return;
    if (scheduler_.schedulable(cluster))
        return; // a re-enable raced the drain; keep it up
    close_power_interval(now_);
    cr.powered = false;
    cr.power_off_requested = false;
    power_on_series_.push_back({now_, cluster, false});
}

void Simulation::start_task(int global_core, TaskId id) {
    const CoreId core = platform_.core_at(global_core);
    auto& cr = clusters_[static_cast<std::size_t>(core.cluster)];
    const ClusterModel& model = platform_.clusters[static_cast<std::size_t>(core.cluster)];
    const Task& task = graph_.task(id);

    const double speed = flops_per_second(model, task.kind, cr.freq_mhz);
    double duration = task.flops / speed;
    if (cr.migration_penalty_pending) {
        duration += platform_.migration_penalty_s;
        cr.migration_penalty_pending = false;
    }

    close_power_interval(now_);
    ++cr.busy;

    RunningTask rt;
    rt.id = id;
    rt.start_s = now_;
    rt.freq_mhz = cr.freq_mhz;
    rt.speed = speed;
    rt.remaining_work = duration * speed;
    rt.last_update_s = now_;
    rt.generation = ++task_generation_[id];
    rt.valid = true;
    running_[static_cast<std::size_t>(global_core)] = rt;
    core_of_[id] = global_core;

    events_.push({now_ + duration, kTaskComplete, id, rt.generation});
}

void Simulation::fetch_round() {
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (int g = 0; g < platform_.total_cores(); ++g) {
            const CoreId core = platform_.core_at(g);
            const auto& cr = clusters_[static_cast<std::size_t>(core.cluster)];
            if (running_[static_cast<std::size_t>(g)].valid || !cr.powered ||
                !scheduler_.schedulable(core.cluster))
                continue;
            const auto id = scheduler_.fetch_task(core);
            if (!id)
                continue;
            // The pop itself changed the ready set; the policy reacts before
            // the task starts, so a zero-latency frequency change applies.
            // The reservation keeps a drain-then-power-off from slipping in
            // under the task that was just fetched.
            auto& owner = clusters_[static_cast<std::size_t>(core.cluster)];
            ++owner.reserved;
            record_queue_point();
            apply_decision(policy_.on_ready_set_change(scheduler_));
            --owner.reserved;
            start_task(g, *id);
            progressed = true;
        }
    }
    audit_no_idle_core_with_work();
}

void Simulation::audit_no_idle_core_with_work() const {
    // Work conservation: after a fetch round no usable core may idle while
    // a queue it is allowed to serve still holds tasks.
    const int big = scheduler_.fast_cluster();
    for (int g = 0; g < platform_.total_cores(); ++g) {
        const CoreId core = platform_.core_at(g);
        const auto& cr = clusters_[static_cast<std::size_t>(core.cluster)];
        if (running_[static_cast<std::size_t>(g)].valid || !cr.powered ||
            !scheduler_.schedulable(core.cluster))
            continue;
        if (core.cluster == big) {
            if (scheduler_.n_ready() > 0)
                throw std::logic_error("idle big core with ready work");
        } else {
            if (scheduler_.n_non_crit() > 0)
                throw std::logic_error("idle LITTLE core with non-critical work");
            const bool may_take_critical =
                options_.work_stealing == WorkStealing::Bidirectional ||
                !scheduler_.schedulable(big);
            if (may_take_critical && scheduler_.n_crit() > 0)
                throw std::logic_error("idle LITTLE core with stealable critical work");
        }
    }
}

void Simulation::ready_initial_tasks() {
    for (const Task& t : graph_.tasks())
        if (graph_.in_degree(t.id) == 0)
            classify_and_policy(t.id);
    fetch_round();
}

void Simulation::process_completion(TaskId id) {
    const int g = core_of_.at(id);
    const CoreId core = platform_.core_at(g);
    auto& cr = clusters_[static_cast<std::size_t>(core.cluster)];
    RunningTask& rt = running_[static_cast<std::size_t>(g)];

    close_power_interval(now_);
    trace_.push_back({g, id, graph_.task(id).kind, rt.start_s, now_, rt.freq_mhz});
    rt.valid = false;
    core_of_.erase(id);
    --cr.busy;
    done_[graph_.position(id)] = 1;
    ++completed_;

    std::vector<TaskId> newly_ready;
    for (TaskId consumer : graph_.successors(id)) {
        const std::size_t pos = graph_.position(consumer);
        if (--indegree_[pos] == 0)
            newly_ready.push_back(consumer);
    }
    // Same-instant arrivals classify in task insertion order.
    std::sort(newly_ready.begin(), newly_ready.end(), [&](TaskId a, TaskId b) {
        return graph_.position(a) < graph_.position(b);
    });
    for (TaskId t : newly_ready)
        classify_and_policy(t);

    try_power_off(core.cluster);
    fetch_round();
}

void Simulation::process_dvfs(int cluster) {
    auto& cr = clusters_[static_cast<std::size_t>(cluster)];
    if (cr.pending_freq_mhz >= 0)
        apply_frequency(cluster, cr.pending_freq_mhz);
}

SimulationResult Simulation::run() {
    validate_speeds();

    clusters_.resize(static_cast<std::size_t>(platform_.cluster_count()));
    running_.resize(static_cast<std::size_t>(platform_.total_cores()));
    indegree_.resize(graph_.task_count());
    done_.assign(graph_.task_count(), 0);
    for (const Task& t : graph_.tasks())
        indegree_[graph_.position(t.id)] = graph_.in_degree(t.id);

    seed_initial_series();
    ready_initial_tasks();

    while (!events_.empty() && completed_ < graph_.task_count()) {
        const Event ev = events_.top();
        events_.pop();
        if (ev.kind == kTaskComplete) {
            auto it = task_generation_.find(ev.payload);
            if (it == task_generation_.end() || it->second != ev.generation)
                continue; // superseded by retiming
            now_ = ev.time_s;
            process_completion(ev.payload);
        } else {
            const auto cluster = static_cast<int>(ev.payload);
            if (clusters_[static_cast<std::size_t>(cluster)].freq_generation != ev.generation)
                continue; // a newer request superseded this one
            now_ = ev.time_s;
            process_dvfs(cluster);
        }
    }

    if (completed_ < graph_.task_count()) {
        std::ostringstream msg;
        msg << "deadlock: " << graph_.task_count() - completed_ << " tasks never finished:";
        int listed = 0;
        for (const Task& t : graph_.tasks()) {
            if (done_[graph_.position(t.id)])
                continue;
            msg << ' ' << t.id;
            if (++listed == 20) {
                msg << " ...";
                break;
            }
        }
        throw SimulationError(msg.str());
    }

    return finalize(now_);
}

SimulationResult Simulation::finalize(double makespan) {
    close_power_interval(makespan);

    SimulationResult r;
    r.makespan_s = makespan;
    r.total_flops = graph_.total_flops();
    r.trace = std::move(trace_);
    std::sort(r.trace.begin(), r.trace.end(), [](const TraceRecord& a, const TraceRecord& b) {
        if (a.start_s != b.start_s) return a.start_s < b.start_s;
        return a.core < b.core;
    });
    r.power_samples = std::move(power_samples_);
    r.queue_series = std::move(queue_series_);
    r.freq_series = std::move(freq_series_);
    r.schedulable_series = std::move(schedulable_series_);
    r.power_on_series = std::move(power_on_series_);

    r.energy_j = integrate_energy_j(r.power_samples);
    r.gflops = makespan > 0.0 ? r.total_flops / 1e9 / makespan : 0.0;
    r.avg_power_w = makespan > 0.0 ? r.energy_j / makespan : 0.0;
    r.gflops_per_watt = r.avg_power_w > 0.0 ? r.gflops / r.avg_power_w : 0.0;

    r.pct_time_unusable.resize(clusters_.size(), 0.0);
    r.powered_off_s.resize(clusters_.size(), 0.0);
    for (int c = 0; c < platform_.cluster_count(); ++c) {
        r.pct_time_unusable[static_cast<std::size_t>(c)] = pct_time_unusable(r, c);
        double off = 0.0;
        double since = -1.0;
        for (const FlagPoint& p : r.power_on_series) {
            if (p.cluster != c)
                continue;
            if (!p.value && since < 0.0)
                since = p.t_s;
            else if (p.value && since >= 0.0) {
                off += p.t_s - since;
                since = -1.0;
            }
        }
        if (since >= 0.0)
            off += makespan - since;
        r.powered_off_s[static_cast<std::size_t>(c)] = off;
    }
    return r;
}

} // namespace

SimulationResult simulate(const TaskGraph& graph, const PlatformModel& platform,
                          const SchedulerOptions& options, const PolicyConfig& policy,
                          std::uint64_t seed) {
    platform.validate();
    graph.validate();
    policy.validate();
    Simulation sim(graph, platform, options, policy, seed);
    return sim.run();
}

double integrate_energy_j(std::span<const PowerSample> samples) {
    double energy = 0.0;
    double cursor = 0.0;
    for (const PowerSample& s : samples) {
        if (s.t0_s != cursor)
            throw std::logic_error("power samples do not form a contiguous partition");
        if (s.t1_s < s.t0_s)
            throw std::logic_error("power sample with negative span");
        if (!(s.watts >= 0.0))
            throw std::logic_error("power sample with negative watts");
        energy += s.watts * (s.t1_s - s.t0_s);
        cursor = s.t1_s;
    }
    return energy;
}

double pct_time_unusable(const SimulationResult& result, int cluster) {
    if (result.makespan_s <= 0.0)
        return 0.0;
    double unusable = 0.0;
    double since = -1.0;
    for (const FlagPoint& p : result.schedulable_series) {
        if (p.cluster != cluster)
            continue;
        if (!p.value && since < 0.0)
            since = p.t_s;
        else if (p.value && since >= 0.0) {
            unusable += p.t_s - since;
            since = -1.0;
        }
    }
    if (since >= 0.0)
        unusable += result.makespan_s - since;
    return unusable / result.makespan_s * 100.0;
}

} // namespace asymsim
