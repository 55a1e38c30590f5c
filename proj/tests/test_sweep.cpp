#include "asymsim/sweep.hpp"

#include "asymsim/cholesky.hpp"
#include "asymsim/engine.hpp"
#include "asymsim/errors.hpp"

#include <doctest.h>

using namespace asymsim;

namespace {

SweepSpec small_spec() {
    SweepSpec spec;
    spec.cells = {{512, 128}, {768, 256}};
    spec.policies = {PolicyKind::Fs2, PolicyKind::Ts2};
    spec.thresholds = {30.0, 50.0};
    return spec;
}

bool same_metrics(const MetricSnapshot& a, const MetricSnapshot& b) {
    return a.makespan_s == b.makespan_s && a.gflops == b.gflops &&
           a.energy_j == b.energy_j && a.avg_power_w == b.avg_power_w &&
           a.gflops_per_watt == b.gflops_per_watt;
}

} // namespace

TEST_CASE("default grid pairs two block sizes with each matrix size") {
    const auto cells = default_sweep_cells();
    CHECK(cells.size() == 12);
    for (const SweepCell& c : cells)
        CHECK(c.matrix_dim % c.block_dim == 0);
    CHECK(default_sweep_thresholds() == std::vector<double>{10, 20, 30, 40, 50});
}

TEST_CASE("outcomes come back one per policy row and cell, rows outermost") {
    const SweepReport report = run_sweep(small_spec(), PlatformModel::exynos5422_default());
    REQUIRE(report.outcomes.size() == 6); // fs2, ts2@30, ts2@50 over two cells
    REQUIRE(report.cells.size() == 2);

    const auto& o = report.outcomes;
    CHECK(o[0].policy == PolicyKind::Fs2);
    CHECK(o[1].policy == PolicyKind::Fs2);
    CHECK(o[2].policy == PolicyKind::Ts2);
    CHECK(o[4].policy == PolicyKind::Ts2);
    CHECK(!o[0].n_thres_pct);
    CHECK(o[2].n_thres_pct == 30.0);
    CHECK(o[4].n_thres_pct == 50.0);
    for (std::size_t i = 0; i < o.size(); i += 2) {
        CHECK(o[i].cell == SweepCell{512, 128});
        CHECK(o[i + 1].cell == SweepCell{768, 256});
        CHECK(o[i].error.empty());
        CHECK(o[i + 1].error.empty());
    }
}

TEST_CASE("every row of a cell shares one baseline run") {
    const SweepSpec spec = small_spec();
    const PlatformModel platform = PlatformModel::exynos5422_default();
    const SweepReport report = run_sweep(spec, platform);
    const auto& o = report.outcomes;

    CHECK(same_metrics(o[0].baseline, o[2].baseline));
    CHECK(same_metrics(o[0].baseline, o[4].baseline));
    CHECK(same_metrics(o[1].baseline, o[3].baseline));

    // and that baseline is exactly a fresh pbotlev run of the same problem
    const TaskGraph g = generate_cholesky({512, 128});
    PolicyConfig base;
    base.kind = PolicyKind::PBotlev;
    const SimulationResult r = simulate(g, platform, spec.scheduler, base, spec.seed);
    CHECK(o[0].baseline.makespan_s == r.makespan_s);
    CHECK(o[0].baseline.energy_j == r.energy_j);
    CHECK(o[0].baseline.avg_power_w == r.avg_power_w);
}

TEST_CASE("deltas restate the two runs they compare") {
    const SweepReport report = run_sweep(small_spec(), PlatformModel::exynos5422_default());
    for (const SweepOutcome& o : report.outcomes) {
        CHECK(o.delta_avg_power_w == o.result.avg_power_w - o.baseline.avg_power_w);
        CHECK(o.delta_gflops_per_watt ==
              o.result.gflops_per_watt - o.baseline.gflops_per_watt);
        CHECK(o.delta_avg_power_pct ==
              doctest::Approx(o.delta_avg_power_w / o.baseline.avg_power_w * 100.0));
        if (!o.n_thres_pct)
            CHECK(o.pct_target_unusable == 0.0);
        else
            CHECK(o.pct_target_unusable >= 0.0);
    }
}

TEST_CASE("spreading cells over threads changes nothing in the report") {
    SweepSpec spec = small_spec();
    const PlatformModel platform = PlatformModel::exynos5422_default();
    const std::string lone = sweep_report_json(run_sweep(spec, platform), platform);
    spec.workers = 4;
    const std::string pooled = sweep_report_json(run_sweep(spec, platform), platform);
    CHECK(lone == pooled);
}

TEST_CASE("the report survives a json round trip") {
    const PlatformModel platform = PlatformModel::exynos5422_default();
    const SweepReport report = run_sweep(small_spec(), platform);
    const std::string text = sweep_report_json(report, platform);
    const SweepReport parsed = sweep_report_from_json_string(text);
    CHECK(sweep_report_json(parsed, platform) == text);
    REQUIRE(parsed.outcomes.size() == report.outcomes.size());
    for (std::size_t i = 0; i < parsed.outcomes.size(); ++i) {
        CHECK(parsed.outcomes[i].policy == report.outcomes[i].policy);
        CHECK(same_metrics(parsed.outcomes[i].result, report.outcomes[i].result));
    }
    CHECK_THROWS_AS(sweep_report_from_json_string("{ nonsense"), ParseError);
}

TEST_CASE("one policy failing marks its rows and leaves the rest standing") {
    SweepSpec spec = small_spec();
    spec.policies = {PolicyKind::Fs2, PolicyKind::Ts3};
    spec.thresholds = {30.0};
    PlatformModel platform = PlatformModel::exynos5422_default();
    platform.clusters[static_cast<std::size_t>(platform.big_index())].supports_power_off =
        false;

    const SweepReport report = run_sweep(spec, platform);
    REQUIRE(report.outcomes.size() == 4);
    CHECK(report.outcomes[0].error.empty());  // fs2 rows unaffected
    CHECK(report.outcomes[1].error.empty());
    CHECK(report.outcomes[2].failed());       // ts3 cannot power this cluster off
    CHECK(report.outcomes[3].failed());
    CHECK(report.outcomes[2].error.find("power") != std::string::npos);

    const std::string text = sweep_report_json(report, platform);
    const SweepReport parsed = sweep_report_from_json_string(text);
    CHECK(parsed.outcomes[2].failed());
    CHECK(parsed.outcomes[2].error == report.outcomes[2].error);

    const std::string tables = render_sweep_tables(report);
    CHECK(tables.find("err") != std::string::npos);
}

TEST_CASE("tables label rows by policy and threshold under the size header") {
    const SweepReport report = run_sweep(small_spec(), PlatformModel::exynos5422_default());
    const std::string table = render_sweep_table(report, SweepMetric::DeltaAvgPowerW);
    CHECK(table.find("delta avg power (W) vs pbotlev") == 0);
    CHECK(table.find("512") != std::string::npos);
    CHECK(table.find("768") != std::string::npos);
    CHECK(table.find("fs2") != std::string::npos);
    CHECK(table.find("ts2@30") != std::string::npos);
    CHECK(table.find("ts2@50") != std::string::npos);

    const std::string gating = render_sweep_table(report, SweepMetric::PctTargetUnusable);
    CHECK(gating.find("ts2@30") != std::string::npos);
    CHECK(gating.find("fs2") == std::string::npos);

    const std::string all = render_sweep_tables(report);
    for (SweepMetric m : {SweepMetric::DeltaAvgPowerW, SweepMetric::DeltaAvgPowerPct,
                          SweepMetric::DeltaGflopsPerWatt, SweepMetric::DeltaGflopsPerWattPct,
                          SweepMetric::PctTargetUnusable})
        CHECK(all.find(render_sweep_table(report, m)) != std::string::npos);
}

TEST_CASE("misconfigured sweeps are rejected up front") {
    const PlatformModel platform = PlatformModel::exynos5422_default();
    SweepSpec spec = small_spec();
    spec.cells.clear();
    CHECK_THROWS_AS(run_sweep(spec, platform), ConfigError);

    spec = small_spec();
    spec.cells[0] = {1000, 300}; // block does not divide the matrix
    CHECK_THROWS_AS(run_sweep(spec, platform), ConfigError);

    spec = small_spec();
    spec.workers = 0;
    CHECK_THROWS_AS(run_sweep(spec, platform), ConfigError);

    spec = small_spec();
    spec.thresholds.clear(); // ts2 is in the policy list and needs them
    CHECK_THROWS_AS(run_sweep(spec, platform), ConfigError);
}
