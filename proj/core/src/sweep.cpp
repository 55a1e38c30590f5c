#include "asymsim/sweep.hpp"

#include "asymsim/engine.hpp"
#include "asymsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

namespace asymsim {

std::vector<SweepCell> default_sweep_cells() {
    return {
        {1024, 64},  {1024, 128}, {4096, 256}, {4096, 512},
        {4608, 256}, {4608, 512}, {5120, 512}, {5120, 1024},
        {6144, 512}, {6144, 1024}, {8192, 512}, {8192, 1024},
    };
}

std::vector<double> default_sweep_thresholds() {
    return {10, 20, 30, 40, 50};
}

void SweepSpec::validate() const {
    if (cells.empty())
        throw ConfigError("sweep needs at least one (m, b) cell");
    for (const SweepCell& c : cells)
        CholeskySpec{c.matrix_dim, c.block_dim}.validate();
    if (policies.empty())
        throw ConfigError("sweep needs at least one policy");
    for (PolicyKind p : policies) {
        PolicyConfig cfg;
        cfg.kind = p;
        if (cfg.is_ts()) {
            if (thresholds.empty())
                throw ConfigError("threshold policies in the sweep need thresholds");
            for (double t : thresholds) {
                cfg.n_thres_pct = t;
                cfg.validate();
            }
        }
    }
    if (workers < 1)
        throw ConfigError("workers must be at least 1");
}

namespace {

MetricSnapshot snapshot(const SimulationResult& r) {
    return {r.makespan_s, r.gflops, r.energy_j, r.avg_power_w, r.gflops_per_watt};
}

struct PolicyRow {
    PolicyKind kind;
    std::optional<double> threshold;
};

std::vector<PolicyRow> policy_rows(const SweepSpec& spec) {
    std::vector<PolicyRow> rows;
    for (PolicyKind p : spec.policies) {
        PolicyConfig probe;
        probe.kind = p;
        if (probe.is_ts())
            for (double t : spec.thresholds)
                rows.push_back({p, t});
        else
            rows.push_back({p, std::nullopt});
    }
    return rows;
}

// All rows for one cell, in row order. Shares the cell's baseline run.
std::vector<SweepOutcome> run_cell(const SweepSpec& spec, const PlatformModel& platform,
                                   const SweepCell& cell, const std::vector<PolicyRow>& rows) {
    std::vector<SweepOutcome> outcomes;
    outcomes.reserve(rows.size());

    TaskGraph graph;
    MetricSnapshot baseline;
    std::string cell_error;
    try {
        graph = generate_cholesky({cell.matrix_dim, cell.block_dim}, spec.flop_accounting);
        PolicyConfig base;
        base.kind = PolicyKind::PBotlev;
        baseline = snapshot(simulate(graph, platform, spec.scheduler, base, spec.seed));
    } catch (const std::exception& e) {
        cell_error = e.what();
    }

    for (const PolicyRow& row : rows) {
        SweepOutcome o;
        o.cell = cell;
        o.policy = row.kind;
        o.n_thres_pct = row.threshold;
        o.baseline = baseline;
        if (!cell_error.empty()) {
            o.error = cell_error;
            outcomes.push_back(std::move(o));
            continue;
        }
        try {
            PolicyConfig cfg;
            cfg.kind = row.kind;
            if (row.threshold)
                cfg.n_thres_pct = *row.threshold;
            const SimulationResult r = simulate(graph, platform, spec.scheduler, cfg, spec.seed);
            o.result = snapshot(r);
            o.delta_avg_power_w = o.result.avg_power_w - baseline.avg_power_w;
            o.delta_gflops_per_watt = o.result.gflops_per_watt - baseline.gflops_per_watt;
            o.delta_avg_power_pct =
                baseline.avg_power_w > 0.0 ? o.delta_avg_power_w / baseline.avg_power_w * 100.0 : 0.0;
            o.delta_gflops_per_watt_pct = baseline.gflops_per_watt > 0.0
                ? o.delta_gflops_per_watt / baseline.gflops_per_watt * 100.0
                : 0.0;
            if (cfg.is_ts()) {
                Policy bound(cfg, platform);
                o.pct_target_unusable = pct_time_unusable(r, bound.target_cluster());
            }
        } catch (const std::exception& e) {
            o.error = e.what();
        }
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

std::string fmt(double v, const char* pattern) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

} // namespace

SweepReport run_sweep(const SweepSpec& spec, const PlatformModel& platform) {
    spec.validate();
    platform.validate();

    const std::vector<PolicyRow> rows = policy_rows(spec);
    std::vector<std::vector<SweepOutcome>> per_cell(spec.cells.size());

    const int workers = std::min<int>(spec.workers, static_cast<int>(spec.cells.size()));
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.cells.size())
                return;
            per_cell[i] = run_cell(spec, platform, spec.cells[i], rows);
        }
    };
    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(drain);
        for (std::thread& t : pool)
            t.join();
    }

    // Assemble in canonical (policy row, cell) order regardless of how the
    // cells were distributed over threads.
    SweepReport report;
    report.cells = spec.cells;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < spec.cells.size(); ++c)
            report.outcomes.push_back(per_cell[c][r]);
    return report;
}

namespace {

nlohmann::ordered_json snapshot_json(const MetricSnapshot& m) {
    return {{"makespan_s", m.makespan_s},
            {"gflops", m.gflops},
            {"energy_j", m.energy_j},
            {"avg_power_w", m.avg_power_w},
            {"gflops_per_watt", m.gflops_per_watt}};
}

MetricSnapshot snapshot_from_json(const nlohmann::json& j) {
    MetricSnapshot m;
    m.makespan_s = j.value("makespan_s", 0.0);
    m.gflops = j.value("gflops", 0.0);
    m.energy_j = j.value("energy_j", 0.0);
    m.avg_power_w = j.value("avg_power_w", 0.0);
    m.gflops_per_watt = j.value("gflops_per_watt", 0.0);
    return m;
}

} // namespace

std::string sweep_report_json(const SweepReport& report, const PlatformModel& platform) {
    nlohmann::ordered_json j;
    j["platform"] = platform.name;
    j["cells"] = nlohmann::ordered_json::array();
    for (const SweepCell& c : report.cells)
        j["cells"].push_back({{"m", c.matrix_dim}, {"b", c.block_dim}});
    j["outcomes"] = nlohmann::ordered_json::array();
    for (const SweepOutcome& o : report.outcomes) {
        nlohmann::ordered_json jo;
        jo["m"] = o.cell.matrix_dim;
        jo["b"] = o.cell.block_dim;
        jo["policy"] = to_string(o.policy);
        if (o.n_thres_pct)
            jo["n_thres_pct"] = *o.n_thres_pct;
        else
            jo["n_thres_pct"] = nullptr;
        if (!o.error.empty()) {
            jo["error"] = o.error;
            j["outcomes"].push_back(std::move(jo));
            continue;
        }
        jo["baseline"] = snapshot_json(o.baseline);
        jo["result"] = snapshot_json(o.result);
        jo["delta_avg_power_w"] = o.delta_avg_power_w;
        jo["delta_avg_power_pct"] = o.delta_avg_power_pct;
        jo["delta_gflops_per_watt"] = o.delta_gflops_per_watt;
        jo["delta_gflops_per_watt_pct"] = o.delta_gflops_per_watt_pct;
        jo["pct_target_unusable"] = o.pct_target_unusable;
        j["outcomes"].push_back(std::move(jo));
    }
    return j.dump(2) + "\n";
}

SweepReport sweep_report_from_json_string(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError("sweep report: not valid JSON");
    SweepReport report;
    for (const auto& jc : j.value("cells", nlohmann::json::array()))
        report.cells.push_back({jc.value("m", 0), jc.value("b", 0)});
    for (const auto& jo : j.value("outcomes", nlohmann::json::array())) {
        SweepOutcome o;
        o.cell = {jo.value("m", 0), jo.value("b", 0)};
        o.policy = policy_from_string(jo.value("policy", "pbotlev"));
        if (jo.contains("n_thres_pct") && !jo["n_thres_pct"].is_null())
            o.n_thres_pct = jo["n_thres_pct"].get<double>();
        if (jo.contains("error")) {
            o.error = jo["error"].get<std::string>();
        } else {
            if (jo.contains("baseline"))
                o.baseline = snapshot_from_json(jo["baseline"]);
            if (jo.contains("result"))
                o.result = snapshot_from_json(jo["result"]);
            o.delta_avg_power_w = jo.value("delta_avg_power_w", 0.0);
            o.delta_avg_power_pct = jo.value("delta_avg_power_pct", 0.0);
            o.delta_gflops_per_watt = jo.value("delta_gflops_per_watt", 0.0);
            o.delta_gflops_per_watt_pct = jo.value("delta_gflops_per_watt_pct", 0.0);
            o.pct_target_unusable = jo.value("pct_target_unusable", 0.0);
        }
        report.outcomes.push_back(std::move(o));
    }
    return report;
}

namespace {

const char* metric_title(SweepMetric metric) {
    switch (metric) {
    case SweepMetric::DeltaAvgPowerW: return "delta avg power (W) vs pbotlev";
    case SweepMetric::DeltaAvgPowerPct: return "delta avg power (%) vs pbotlev";
    case SweepMetric::DeltaGflopsPerWatt: return "delta gflops/W vs pbotlev";
    case SweepMetric::DeltaGflopsPerWattPct: return "delta gflops/W (%) vs pbotlev";
    case SweepMetric::PctTargetUnusable: return "target cluster unusable (% of time)";
    }
    return "";
}

double metric_value(const SweepOutcome& o, SweepMetric metric) {
    switch (metric) {
    case SweepMetric::DeltaAvgPowerW: return o.delta_avg_power_w;
    case SweepMetric::DeltaAvgPowerPct: return o.delta_avg_power_pct;
    case SweepMetric::DeltaGflopsPerWatt: return o.delta_gflops_per_watt;
    case SweepMetric::DeltaGflopsPerWattPct: return o.delta_gflops_per_watt_pct;
    case SweepMetric::PctTargetUnusable: return o.pct_target_unusable;
    }
    return 0.0;
}

std::string row_label(const SweepOutcome& o) {
    std::string label(to_string(o.policy));
    if (o.n_thres_pct)
        label += "@" + fmt(*o.n_thres_pct, "%g");
    return label;
}

} // namespace

std::string render_sweep_table(const SweepReport& report, SweepMetric metric) {
    constexpr int kLabelWidth = 10;
    constexpr int kColWidth = 9;

    std::ostringstream out;
    out << metric_title(metric) << '\n';
    out << std::string(static_cast<std::size_t>(kLabelWidth), ' ');
    for (const SweepCell& c : report.cells)
        out << fmt(c.matrix_dim, "%9.0f");
    out << "\n" << std::string(static_cast<std::size_t>(kLabelWidth), ' ');
    for (const SweepCell& c : report.cells)
        out << fmt(c.block_dim, "%9.0f");
    out << '\n';

    // Outcomes arrive grouped by policy row; walk them in blocks of one row
    // per cell.
    for (std::size_t i = 0; i < report.outcomes.size(); i += report.cells.size()) {
        const SweepOutcome& head = report.outcomes[i];
        if (metric == SweepMetric::PctTargetUnusable && !head.n_thres_pct)
            continue; // gating share only means something for threshold rows
        std::string label = row_label(head);
        label.resize(static_cast<std::size_t>(kLabelWidth), ' ');
        out << label;
        for (std::size_t k = 0; k < report.cells.size() && i + k < report.outcomes.size(); ++k) {
            const SweepOutcome& o = report.outcomes[i + k];
            if (o.failed())
                out << std::string(static_cast<std::size_t>(kColWidth) - 3, ' ') << "err";
            else
                out << fmt(metric_value(o, metric), "%+9.3f");
        }
        out << '\n';
    }
    return out.str();
}

std::string render_sweep_tables(const SweepReport& report) {
    std::string text;
    text += render_sweep_table(report, SweepMetric::DeltaAvgPowerW) + "\n";
    text += render_sweep_table(report, SweepMetric::DeltaAvgPowerPct) + "\n";
    text += render_sweep_table(report, SweepMetric::DeltaGflopsPerWatt) + "\n";
    text += render_sweep_table(report, SweepMetric::DeltaGflopsPerWattPct) + "\n";
    bool any_ts = false;
    for (const SweepOutcome& o : report.outcomes)
        any_ts = any_ts || o.n_thres_pct.has_value();
    if (any_ts)
        text += render_sweep_table(report, SweepMetric::PctTargetUnusable) + "\n";
    return text;
}

} // namespace asymsim
