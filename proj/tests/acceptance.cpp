// End-to-end checks, one line of output per criterion. Exits nonzero when
// any of them fails. Oracles live in test_support.hpp and are deliberately
// independent reimplementations of the properties they check.

#include "asymsim/cholesky.hpp"
#include "asymsim/engine.hpp"
#include "asymsim/platform.hpp"
#include "asymsim/policy.hpp"
#include "asymsim/result_io.hpp"
#include "asymsim/scheduler.hpp"
#include "asymsim/task_graph.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace asymsim;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, double budget_s,
               const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
        body();
    } catch (const std::exception& e) {
        failure = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty() && budget_s > 0.0 && elapsed > budget_s) {
        std::ostringstream msg;
        msg << "took " << elapsed << " s, budget " << budget_s << " s";
        failure = msg.str();
    }
    if (failure.empty()) {
        std::printf("[PASS] criterion %d: %s (%.2f s)\n", number, label.c_str(), elapsed);
    } else {
        std::printf("[FAIL] criterion %d: %s: %s\n", number, label.c_str(), failure.c_str());
        ++g_failures;
    }
}

void expect(bool condition, const std::string& what) {
    if (!condition)
        throw std::runtime_error(what);
}

PolicyConfig make_policy(PolicyKind kind, double thres = 0.0) {
    PolicyConfig cfg;
    cfg.kind = kind;
    cfg.n_thres_pct = thres;
    return cfg;
}

const std::vector<int>& exynos_table() {
    static const std::vector<int> table = {800, 900, 1000, 1100, 1200, 1300};
    return table;
}

void check_factorization_counts() {
    for (int s = 1; s <= 12; ++s) {
        const TaskGraph g = generate_cholesky({128 * s, 128});
        const testsupport::KernelCounts want = testsupport::count_kernels_by_loop(s);
        const testsupport::KernelCounts got = testsupport::count_kernels_in_graph(g);
        expect(got.potrf == want.potrf && got.trsm == want.trsm &&
                   got.syrk == want.syrk && got.gemm == want.gemm,
               "kernel counts diverge from the loop enumeration at s=" + std::to_string(s));
    }
    const TaskGraph g4 = generate_cholesky({512, 128});
    const testsupport::KernelCounts c4 = testsupport::count_kernels_in_graph(g4);
    expect(c4.potrf == 4 && c4.trsm == 6 && c4.gemm == 4 && c4.syrk == 6,
           "4-block factorization is not 4 POTRF, 6 TRSM, 4 GEMM, 6 SYRK");
}

void check_blevel_oracle() {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 500; ++trial) {
        const TaskGraph g = testsupport::random_dag(rng, 200);
        for (BLevelWeights w : {BLevelWeights::Unit, BLevelWeights::Flops}) {
            const BLevelTable table = compute_blevels(g, w);
            std::map<TaskId, double> memo;
            for (const Task& t : g.tasks())
                expect(table.at(t.id) ==
                           testsupport::longest_path_to_leaf(g, t.id, w, memo),
                       "blevel mismatch on trial " + std::to_string(trial));
        }
    }
}

void check_fs1_anchors() {
    expect(fs1_frequency_mhz(2, 1, exynos_table()) == 1200,
           "ratio 2 must pick the second-highest step (1200)");
    expect(fs1_frequency_mhz(5, 1, exynos_table()) == 900,
           "ratio 5 must pick the fifth-highest step (900)");
    expect(fs1_frequency_mhz(10, 5, exynos_table()) == 1200,
           "equal ratios must pick equal steps");
    for (std::int64_t nc : {1, 2, 3, 7}) {
        int prev = fs1_frequency_mhz(0, nc, exynos_table());
        for (std::int64_t c = 1; c <= 64; ++c) {
            const int cur = fs1_frequency_mhz(c, nc, exynos_table());
            expect(cur <= prev, "frequency must never rise as the ratio grows");
            prev = cur;
        }
    }
}

void check_fs2p_two_level() {
    expect(fs2p_frequency_mhz(500, 1000, exynos_table()) == 1300,
           "ratio one half must already pick the top step");
    expect(fs2p_frequency_mhz(499, 1000, exynos_table()) == 800,
           "ratio just below one half must pick the bottom step");
    for (std::int64_t max_nc : {1, 2, 7, 40, 1000})
        for (std::int64_t nc = 0; nc <= max_nc; ++nc) {
            const int f = fs2p_frequency_mhz(nc, max_nc, exynos_table());
            expect(f == 800 || f == 1300, "only the extreme steps may appear");
            expect((f == 1300) == (2 * nc >= max_nc), "threshold must sit at one half");
        }
}

void check_ts_gating_replay() {
    struct Case {
        PolicyKind kind;
        double thres;
    };
    for (const Case& c : {Case{PolicyKind::Ts2, 30.0}, Case{PolicyKind::Ts1, 40.0}}) {
        const PolicyConfig cfg = make_policy(c.kind, c.thres);
        const PlatformModel platform = PlatformModel::exynos5422_default();
        const Policy bound(cfg, platform);
        const int target = bound.target_cluster();
        const TaskGraph g = generate_cholesky({4096, 512});
        const SimulationResult r = simulate(g, platform, {}, cfg);

        const testsupport::GateReplay replay = testsupport::replay_gating(r, cfg, target);
        std::vector<FlagPoint> actual;
        bool seeded = false;
        for (const FlagPoint& f : r.schedulable_series) {
            if (f.cluster != target)
                continue;
            if (!seeded) { // the t=0 "everything enabled" seed point
                seeded = true;
                continue;
            }
            actual.push_back(f);
        }
        expect(actual.size() == replay.transitions.size(),
               "transition counts diverge from the replay");
        for (std::size_t i = 0; i < actual.size(); ++i)
            expect(actual[i].t_s == replay.transitions[i].t_s &&
                       actual[i].value == replay.transitions[i].value,
                   "transition " + std::to_string(i) + " diverges from the replay");

        const double pct = r.pct_time_unusable[static_cast<std::size_t>(target)];
        const double oracle_pct = replay.disabled_total_s / r.makespan_s * 100.0;
        expect(std::abs(pct - oracle_pct) <= 1e-9 * std::max(1.0, std::abs(oracle_pct)),
               "unusable share diverges from the interval sum");
        expect(replay.transitions.size() >= 2, "the gate never moved; nothing was exercised");
    }
}

void check_validity_and_determinism() {
    std::mt19937_64 rng(20240817);
    const PlatformModel platform = PlatformModel::exynos5422_default();
    static const PolicyKind kinds[] = {PolicyKind::PBotlev, PolicyKind::Fs1,
                                       PolicyKind::Fs2,     PolicyKind::Fs2Prime,
                                       PolicyKind::Fs3,     PolicyKind::Ts1,
                                       PolicyKind::Ts2,     PolicyKind::Ts3};
    for (int config = 0; config < 500; ++config) {
        const TaskGraph g = testsupport::random_dag(rng, 120);
        const PolicyConfig cfg =
            make_policy(kinds[config % 8], 10.0 * (1 + config % 9));
        SchedulerOptions opts;
        opts.work_stealing = (config / 8) % 2 == 0 ? WorkStealing::BigStealsOnly
                                                   : WorkStealing::Bidirectional;
        opts.blevel_weights =
            (config / 16) % 2 == 0 ? BLevelWeights::Unit : BLevelWeights::Flops;
        opts.random_tie_break = config % 3 == 0;
        const std::uint64_t seed = rng();

        const SimulationResult a = simulate(g, platform, opts, cfg, seed);
        const SimulationResult b = simulate(g, platform, opts, cfg, seed);
        testsupport::check_schedule(g, platform, a);
        testsupport::check_schedule(g, platform, b);
        expect(testsupport::traces_identical(a, b),
               "rerun of config " + std::to_string(config) + " changed the trace");
        expect(a.energy_j == b.energy_j && a.makespan_s == b.makespan_s,
               "rerun of config " + std::to_string(config) + " changed the metrics");
    }
}

void check_energy_accounting() {
    // closed form: one task, one busy big core at the reference frequency
    TaskGraph single;
    single.add_task(TaskKind::Generic, 8e9);
    const PlatformModel platform = PlatformModel::exynos5422_default();
    const SimulationResult solo =
        simulate(single, platform, {}, make_policy(PolicyKind::PBotlev));
    const double makespan = 8e9 / (4.0 * 1e9);
    const double watts = 0.08 + (0.55 + 1.50);
    expect(solo.makespan_s == makespan, "single-task makespan is not flops over speed");
    expect(solo.energy_j == watts * makespan, "single-task energy is not watts times time");

    const TaskGraph g = generate_cholesky({1024, 128});
    for (PolicyKind kind : {PolicyKind::PBotlev, PolicyKind::Fs1, PolicyKind::Fs2,
                            PolicyKind::Fs2Prime, PolicyKind::Fs3, PolicyKind::Ts1,
                            PolicyKind::Ts2, PolicyKind::Ts3}) {
        const SimulationResult r = simulate(g, platform, {}, make_policy(kind, 30.0));
        const double recomputed = r.avg_power_w * r.makespan_s;
        expect(std::abs(recomputed - r.energy_j) <= 1e-9 * r.energy_j,
               std::string("energy and average power disagree under ") +
                   std::string(to_string(kind)));
    }
}

void check_directional_power() {
    const PlatformModel platform = PlatformModel::exynos5422_default();
    const TaskGraph g = generate_cholesky({4096, 256});
    const auto run = [&](PolicyKind kind, double thres = 0.0) {
        return simulate(g, platform, {}, make_policy(kind, thres));
    };
    const double base = run(PolicyKind::PBotlev).avg_power_w;
    const double fs3 = run(PolicyKind::Fs3).avg_power_w;
    const double fs2 = run(PolicyKind::Fs2).avg_power_w;
    const double fs2p = run(PolicyKind::Fs2Prime).avg_power_w;
    const double ts2 = run(PolicyKind::Ts2, 50.0).avg_power_w;

    std::ostringstream seen;
    seen << "baseline " << base << " W, fs3 " << fs3 << ", fs2 " << fs2 << ", fs2p "
         << fs2p << ", ts2@50 " << ts2;
    expect(fs3 < base, "slowing the big cluster must cut average power (" + seen.str() + ")");
    expect(fs2 < base, "slowing the LITTLE cluster must cut average power (" + seen.str() + ")");
    expect(fs2p < base,
           "two-level LITTLE scaling must cut average power (" + seen.str() + ")");
    expect(ts2 <= base, "gating the big cluster must not raise power (" + seen.str() + ")");
}

void check_gating_visible_in_series() {
    const PlatformModel platform = PlatformModel::exynos5422_default();
    const TaskGraph g = generate_cholesky({4096, 512});
    const SimulationResult r = simulate(g, platform, {}, make_policy(PolicyKind::Ts2, 30.0));

    std::ostringstream series;
    write_series_csv(r, platform, series);
    std::istringstream in(series.str());
    std::string line;
    std::getline(in, line); // header
    expect(line ==
               "t_s,n_crit,n_noncrit,freq_little_mhz,freq_big_mhz,big_schedulable,little_schedulable",
           "series header changed");

    // big_schedulable is the second-to-last column; look for 1 -> 0 -> 1
    int prev = 1;
    bool went_down = false;
    bool came_back = false;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const std::size_t last_comma = line.rfind(',');
        const std::size_t prev_comma = line.rfind(',', last_comma - 1);
        const int big_ok = std::stoi(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
        if (prev == 1 && big_ok == 0)
            went_down = true;
        if (went_down && prev == 0 && big_ok == 1)
            came_back = true;
        prev = big_ok;
    }
    expect(rows > 2, "series carries no run to speak of");
    expect(went_down, "the big cluster never got gated off");
    expect(came_back, "the big cluster never came back after gating");

    std::ostringstream trace;
    write_trace_csv(r, trace);
    std::size_t trace_rows = 0;
    std::istringstream tin(trace.str());
    std::getline(tin, line);
    while (std::getline(tin, line))
        ++trace_rows;
    expect(trace_rows == g.task_count(), "trace rows must cover every task exactly once");
}

} // namespace

int main() {
    criterion(1, "factorization kernel counts match the loop enumeration", 1.0,
              check_factorization_counts);
    criterion(2, "bottom levels equal brute-force longest paths on 500 random DAGs", 10.0,
              check_blevel_oracle);
    criterion(3, "ratio-indexed frequency rule hits its anchor steps and never rises", 0.0,
              check_fs1_anchors);
    criterion(4, "two-level frequency rule switches exactly at the half mark", 0.0,
              check_fs2p_two_level);
    criterion(5, "gating transitions replay exactly from the queue counter log", 0.0,
              check_ts_gating_replay);
    criterion(6, "1000 randomized runs: valid schedules, bit-identical reruns", 120.0,
              check_validity_and_determinism);
    criterion(7, "energy equals average power times makespan, closed form included", 0.0,
              check_energy_accounting);
    criterion(8, "frequency and gating policies cut average power on the default model", 30.0,
              check_directional_power);
    criterion(9, "intermittent big-cluster gating shows up in the series output", 0.0,
              check_gating_visible_in_series);

    if (g_failures == 0) {
        std::printf("all 9 criteria passed\n");
        return 0;
    }
    std::printf("%d of 9 criteria failed\n", g_failures);
    return 1;
}
