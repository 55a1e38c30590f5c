#include "asymsim/result_io.hpp"

#include "asymsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

namespace asymsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void write_trace_csv(const SimulationResult& result, std::ostream& out) {
    out << "core,task_id,kind,start_s,end_s,freq_mhz\n";
    for (const TraceRecord& r : result.trace)
        out << r.core << ',' << r.task << ',' << to_string(r.kind) << ','
            << fmt(r.start_s) << ',' << fmt(r.end_s) << ',' << r.freq_mhz << '\n';
}

void write_series_csv(const SimulationResult& result, const PlatformModel& platform,
                      std::ostream& out) {
    const int little = platform.little_index();
    const int big = platform.big_index();

    std::set<double> times;
    for (const QueuePoint& p : result.queue_series)
        times.insert(p.t_s);
    for (const FreqPoint& p : result.freq_series)
        times.insert(p.t_s);
    for (const FlagPoint& p : result.schedulable_series)
        times.insert(p.t_s);

    std::int64_t n_crit = 0;
    std::int64_t n_noncrit = 0;
    int freq_little = 0;
    int freq_big = 0;
    int big_ok = 1;
    int little_ok = 1;

    std::size_t qi = 0;
    std::size_t fi = 0;
    std::size_t si = 0;

    out << "t_s,n_crit,n_noncrit,freq_little_mhz,freq_big_mhz,big_schedulable,little_schedulable\n";
    for (double t : times) {
        for (; qi < result.queue_series.size() && result.queue_series[qi].t_s <= t; ++qi) {
            n_crit = result.queue_series[qi].n_crit;
            n_noncrit = result.queue_series[qi].n_non_crit;
        }
        for (; fi < result.freq_series.size() && result.freq_series[fi].t_s <= t; ++fi) {
            const FreqPoint& p = result.freq_series[fi];
            (p.cluster == little ? freq_little : freq_big) = p.freq_mhz;
        }
        for (; si < result.schedulable_series.size() && result.schedulable_series[si].t_s <= t; ++si) {
            const FlagPoint& p = result.schedulable_series[si];
            (p.cluster == big ? big_ok : little_ok) = p.value ? 1 : 0;
        }
        out << fmt(t) << ',' << n_crit << ',' << n_noncrit << ',' << freq_little << ','
            << freq_big << ',' << big_ok << ',' << little_ok << '\n';
    }
}

std::string result_summary_json(const SimulationResult& result,
                                const PlatformModel& platform,
                                const RunMetadata& metadata) {
    nlohmann::ordered_json j;
    j["policy"] = metadata.policy;
    if (metadata.has_threshold)
        j["n_thres_pct"] = metadata.n_thres_pct;
    j["work_stealing"] = metadata.work_stealing;
    j["blevel_weights"] = metadata.blevel_weights;
    j["platform"] = platform.name;
    j["dag"] = {{"source", metadata.dag_source},
                {"tasks", metadata.task_count},
                {"edges", metadata.edge_count}};
    j["seed"] = metadata.seed;
    j["makespan_s"] = result.makespan_s;
    j["total_flops"] = result.total_flops;
    j["gflops"] = result.gflops;
    j["energy_j"] = result.energy_j;
    j["avg_power_w"] = result.avg_power_w;
    j["gflops_per_watt"] = result.gflops_per_watt;
    nlohmann::ordered_json unusable;
    nlohmann::ordered_json off_s;
    for (int c = 0; c < platform.cluster_count(); ++c) {
        const std::string& name = platform.clusters[static_cast<std::size_t>(c)].name;
        unusable[name] = result.pct_time_unusable[static_cast<std::size_t>(c)];
        off_s[name] = result.powered_off_s[static_cast<std::size_t>(c)];
    }
    j["pct_time_unusable"] = std::move(unusable);
    j["powered_off_s"] = std::move(off_s);
    return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& file, std::string_view content) {
    std::ofstream out(file);
    if (!out)
        throw SimulationError("cannot write " + file.string());
    out << content;
    if (!out)
        throw SimulationError("failed writing " + file.string());
}

} // namespace asymsim
