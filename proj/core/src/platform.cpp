#include "asymsim/platform.hpp"

#include "asymsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace asymsim {

double DynPowerModel::watts_at(int freq_mhz, int ref_freq_mhz) const {
    if (parametric)
        return at_ref_w * std::pow(static_cast<double>(freq_mhz) / ref_freq_mhz, exponent);
    auto it = table_w.find(freq_mhz);
    if (it == table_w.end())
        throw ConfigError("dyn_power table has no entry for " + std::to_string(freq_mhz) + " MHz");
    return it->second;
}

bool ClusterModel::has_frequency(int mhz) const {
    return std::find(freq_table_mhz.begin(), freq_table_mhz.end(), mhz) != freq_table_mhz.end();
}

int ClusterModel::kth_max_frequency_mhz(int k) const {
    const int n = static_cast<int>(freq_table_mhz.size());
    k = std::clamp(k, 1, n);
    return freq_table_mhz[n - k];
}

double ClusterModel::speed_gflops_at(TaskKind kind, int freq_mhz) const {
    auto it = speed_gflops.find(kind);
    if (it == speed_gflops.end())
        throw ConfigError("cluster " + name + " has no speed entry for task kind " +
                          std::string(to_string(kind)));
    return it->second * static_cast<double>(freq_mhz) / ref_freq_mhz;
}

double ClusterModel::dyn_power_w_at(int freq_mhz) const {
    return dyn_power.watts_at(freq_mhz, ref_freq_mhz);
}

double ClusterModel::idle_power_at(int busy_cores) const {
    if (busy_cores < 0 || busy_cores > core_count)
        throw ConfigError("cluster " + name + ": busy core count " +
                          std::to_string(busy_cores) + " out of range");
    return idle_power_w[static_cast<std::size_t>(busy_cores)];
}

void ClusterModel::validate() const {
    if (name.empty())
        throw ConfigError("cluster without a name");
    if (core_count <= 0)
        throw ConfigError("cluster " + name + ": core_count must be positive");
    if (freq_table_mhz.empty())
        throw ConfigError("cluster " + name + ": empty frequency table");
    for (std::size_t i = 0; i < freq_table_mhz.size(); ++i) {
        if (freq_table_mhz[i] <= 0)
            throw ConfigError("cluster " + name + ": frequencies must be positive");
        if (i > 0 && freq_table_mhz[i] <= freq_table_mhz[i - 1])
            throw ConfigError("cluster " + name + ": frequency table must be strictly ascending");
    }
    if (!has_frequency(ref_freq_mhz))
        throw ConfigError("cluster " + name + ": ref_freq_mhz not in the frequency table");
    if (!has_frequency(initial_freq_mhz))
        throw ConfigError("cluster " + name + ": initial_freq_mhz not in the frequency table");
    if (speed_gflops.empty())
        throw ConfigError("cluster " + name + ": no per-kind speeds");
    for (const auto& [kind, gflops] : speed_gflops)
        if (!std::isfinite(gflops) || gflops <= 0.0)
            throw ConfigError("cluster " + name + ": speed for " + std::string(to_string(kind)) +
                              " must be positive");
    if (idle_power_w.size() != static_cast<std::size_t>(core_count) + 1)
        throw ConfigError("cluster " + name + ": idle_power_w needs core_count+1 entries");
    for (std::size_t i = 0; i < idle_power_w.size(); ++i) {
        if (!std::isfinite(idle_power_w[i]) || idle_power_w[i] < 0.0)
            throw ConfigError("cluster " + name + ": idle power must be non-negative");
        if (i > 0 && idle_power_w[i] < idle_power_w[i - 1])
            throw ConfigError("cluster " + name + ": idle_power_w must be non-decreasing");
    }
    if (dyn_power.parametric) {
        if (!std::isfinite(dyn_power.at_ref_w) || dyn_power.at_ref_w < 0.0)
            throw ConfigError("cluster " + name + ": dyn_power.at_ref_w must be non-negative");
        if (!std::isfinite(dyn_power.exponent) || dyn_power.exponent < 0.0)
            throw ConfigError("cluster " + name + ": dyn_power.exponent must be non-negative");
    } else {
        for (int f : freq_table_mhz)
            (void)dyn_power.watts_at(f, ref_freq_mhz); // every step needs an entry
    }
    if (!std::isfinite(power_off_floor_w) || power_off_floor_w < 0.0)
        throw ConfigError("cluster " + name + ": power_off_floor_w must be non-negative");
}

int PlatformModel::total_cores() const {
    int n = 0;
    for (const ClusterModel& c : clusters)
        n += c.core_count;
    return n;
}

// Global numbering starts with core0_cluster, then the remaining clusters in
// declaration order (LITTLE-first matches how these boards enumerate cores).
int PlatformModel::global_core_id(CoreId core) const {
    int base = 0;
    auto add = [&](int cluster) {
        if (cluster == core.cluster)
            return true;
        base += clusters[static_cast<std::size_t>(cluster)].core_count;
        return false;
    };
    if (add(core0_cluster))
        return base + core.index;
    for (int c = 0; c < cluster_count(); ++c)
        if (c != core0_cluster && add(c))
            return base + core.index;
    throw ConfigError("unknown cluster index " + std::to_string(core.cluster));
}

CoreId PlatformModel::core_at(int global_id) const {
    int base = 0;
    auto take = [&](int cluster) -> std::optional<CoreId> {
        int n = clusters[static_cast<std::size_t>(cluster)].core_count;
        if (global_id < base + n)
            return CoreId{cluster, global_id - base};
        base += n;
        return std::nullopt;
    };
    if (auto core = take(core0_cluster))
        return *core;
    for (int c = 0; c < cluster_count(); ++c)
        if (c != core0_cluster)
            if (auto core = take(c))
                return *core;
    throw ConfigError("global core id " + std::to_string(global_id) + " out of range");
}

int PlatformModel::find_cluster(std::string_view cluster_name) const {
    for (int c = 0; c < cluster_count(); ++c)
        if (clusters[static_cast<std::size_t>(c)].name == cluster_name)
            return c;
    return -1;
}

int PlatformModel::cluster_index(std::string_view cluster_name) const {
    int c = find_cluster(cluster_name);
    if (c < 0)
        throw ConfigError("platform " + name + " has no cluster named \"" +
                          std::string(cluster_name) + "\"");
    return c;
}

void PlatformModel::validate() const {
    if (clusters.empty())
        throw ConfigError("platform needs at least one cluster");
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        clusters[i].validate();
        for (std::size_t k = i + 1; k < clusters.size(); ++k)
            if (clusters[i].name == clusters[k].name)
                throw ConfigError("duplicate cluster name " + clusters[i].name);
    }
    if (core0_cluster < 0 || core0_cluster >= cluster_count())
        throw ConfigError("core0_cluster out of range");
    if (!std::isfinite(dvfs_latency_s) || dvfs_latency_s < 0.0)
        throw ConfigError("dvfs_latency_s must be non-negative");
    if (!std::isfinite(migration_penalty_s) || migration_penalty_s < 0.0)
        throw ConfigError("migration_penalty_s must be non-negative");
}

PlatformModel PlatformModel::exynos5422_default() {
    PlatformModel p;
    p.name = "exynos5422";
    p.dvfs_latency_s = 0.0;
    p.migration_penalty_s = 0.005;
    p.core0_cluster = 0;
    p.retime_on_dvfs = false;

    ClusterModel little;
    little.name = "LITTLE";
    little.core_count = 4;
    little.freq_table_mhz = {800, 900, 1000, 1100, 1200, 1300};
    little.ref_freq_mhz = 1300;
    little.initial_freq_mhz = 1300;
    little.speed_gflops = {
        {TaskKind::Potrf, 0.6}, {TaskKind::Trsm, 1.0},   {TaskKind::Syrk, 1.1},
        {TaskKind::Gemm, 1.2},  {TaskKind::Generic, 1.0},
    };
    little.idle_power_w = {0.08, 0.10, 0.12, 0.14, 0.16};
    little.dyn_power = {true, 0.35, 3.0, {}};
    little.supports_power_off = false; // hosts core 0, which cannot go down
    little.power_off_floor_w = 0.0;

    ClusterModel big;
    big.name = "big";
    big.core_count = 4;
    big.freq_table_mhz = {800, 900, 1000, 1100, 1200, 1300};
    big.ref_freq_mhz = 1300;
    big.initial_freq_mhz = 1300;
    big.speed_gflops = {
        {TaskKind::Potrf, 2.4}, {TaskKind::Trsm, 4.0},   {TaskKind::Syrk, 4.4},
        {TaskKind::Gemm, 4.8},  {TaskKind::Generic, 4.0},
    };
    big.idle_power_w = {0.45, 0.55, 0.65, 0.75, 0.85};
    big.dyn_power = {true, 1.50, 3.0, {}};
    big.supports_power_off = true;
    big.power_off_floor_w = 0.0;

    p.clusters = {little, big};
    p.validate();
    return p;
}

namespace {

DynPowerModel dyn_power_from_json(const nlohmann::json& j, const std::string& cluster) {
    DynPowerModel m;
    if (j.contains("table_w")) {
        m.parametric = false;
        for (const auto& [key, value] : j["table_w"].items()) {
            try {
                m.table_w[std::stoi(key)] = value.get<double>();
            } catch (const std::exception&) {
                throw ParseError("cluster " + cluster + ": bad dyn_power table key \"" + key + "\"");
            }
        }
    } else {
        m.parametric = true;
        if (!j.contains("at_ref_w"))
            throw ParseError("cluster " + cluster + ": dyn_power needs at_ref_w or table_w");
        m.at_ref_w = j["at_ref_w"].get<double>();
        m.exponent = j.value("exponent", 3.0);
    }
    return m;
}

ClusterModel cluster_from_json(const nlohmann::json& j) {
    ClusterModel c;
    if (!j.contains("name") || !j["name"].is_string())
        throw ParseError("cluster without a name");
    c.name = j["name"].get<std::string>();
    if (!j.contains("core_count"))
        throw ParseError("cluster " + c.name + ": missing core_count");
    c.core_count = j["core_count"].get<int>();
    if (!j.contains("freq_table_mhz") || !j["freq_table_mhz"].is_array())
        throw ParseError("cluster " + c.name + ": missing freq_table_mhz");
    for (const auto& f : j["freq_table_mhz"])
        c.freq_table_mhz.push_back(f.get<int>());
    const int fallback = c.freq_table_mhz.empty() ? 0 : c.freq_table_mhz.back();
    c.ref_freq_mhz = j.value("ref_freq_mhz", fallback);
    c.initial_freq_mhz = j.value("initial_freq_mhz", fallback);
    if (!j.contains("speed_gflops") || !j["speed_gflops"].is_object())
        throw ParseError("cluster " + c.name + ": missing speed_gflops");
    for (const auto& [kind, gflops] : j["speed_gflops"].items())
        c.speed_gflops[task_kind_from_string(kind)] = gflops.get<double>();
    if (!j.contains("idle_power_w") || !j["idle_power_w"].is_array())
        throw ParseError("cluster " + c.name + ": missing idle_power_w");
    for (const auto& w : j["idle_power_w"])
        c.idle_power_w.push_back(w.get<double>());
    if (!j.contains("dyn_power"))
        throw ParseError("cluster " + c.name + ": missing dyn_power");
    c.dyn_power = dyn_power_from_json(j["dyn_power"], c.name);
    c.supports_power_off = j.value("supports_power_off", false);
    c.power_off_floor_w = j.value("power_off_floor_w", 0.0);
    return c;
}

nlohmann::ordered_json cluster_to_json(const ClusterModel& c) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["core_count"] = c.core_count;
    j["freq_table_mhz"] = c.freq_table_mhz;
    j["ref_freq_mhz"] = c.ref_freq_mhz;
    j["initial_freq_mhz"] = c.initial_freq_mhz;
    nlohmann::ordered_json speeds;
    for (const auto& [kind, gflops] : c.speed_gflops)
        speeds[std::string(to_string(kind))] = gflops;
    j["speed_gflops"] = std::move(speeds);
    j["idle_power_w"] = c.idle_power_w;
    if (c.dyn_power.parametric) {
        j["dyn_power"] = {{"at_ref_w", c.dyn_power.at_ref_w},
                          {"exponent", c.dyn_power.exponent}};
    } else {
        nlohmann::ordered_json table;
        for (const auto& [f, w] : c.dyn_power.table_w)
            table[std::to_string(f)] = w;
        j["dyn_power"] = {{"table_w", std::move(table)}};
    }
    j["supports_power_off"] = c.supports_power_off;
    j["power_off_floor_w"] = c.power_off_floor_w;
    return j;
}

} // namespace

PlatformModel platform_from_json_string(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError("platform file: not valid JSON");
    PlatformModel p;
    p.name = j.value("name", "unnamed");
    if (!j.contains("clusters") || !j["clusters"].is_array())
        throw ParseError("platform file: missing \"clusters\" array");
    for (const auto& jc : j["clusters"])
        p.clusters.push_back(cluster_from_json(jc));
    p.dvfs_latency_s = j.value("dvfs_latency_s", 0.0);
    p.migration_penalty_s = j.value("migration_penalty_s", 0.0);
    p.retime_on_dvfs = j.value("retime_on_dvfs", false);
    if (j.contains("core0_cluster")) {
        const auto& jc = j["core0_cluster"];
        if (jc.is_string())
            p.core0_cluster = p.cluster_index(jc.get<std::string>());
        else
            p.core0_cluster = jc.get<int>();
    }
    p.validate();
    return p;
}

std::string platform_to_json_string(const PlatformModel& p) {
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["dvfs_latency_s"] = p.dvfs_latency_s;
    j["migration_penalty_s"] = p.migration_penalty_s;
    j["core0_cluster"] = p.clusters[static_cast<std::size_t>(p.core0_cluster)].name;
    j["retime_on_dvfs"] = p.retime_on_dvfs;
    j["clusters"] = nlohmann::ordered_json::array();
    for (const ClusterModel& c : p.clusters)
        j["clusters"].push_back(cluster_to_json(c));
    return j.dump(2) + "\n";
}

PlatformModel load_platform(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ParseError("cannot open platform file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return platform_from_json_string(buf.str());
}

double exec_time_s(const Task& task, const ClusterModel& cluster, int freq_mhz) {
    const double gflops = cluster.speed_gflops_at(task.kind, freq_mhz);
    return task.flops / (gflops * 1e9);
}

double instantaneous_power_w(const PlatformModel& platform,
                             std::span<const ClusterPowerState> states) {
    if (states.size() != platform.clusters.size())
        throw ConfigError("power state count does not match cluster count");
    double watts = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const ClusterModel& c = platform.clusters[i];
        const ClusterPowerState& s = states[i];
        if (!s.powered_on) {
            watts += c.power_off_floor_w;
            continue;
        }
        watts += c.idle_power_at(s.busy_cores) + s.busy_cores * c.dyn_power_w_at(s.freq_mhz);
    }
    return watts;
}

} // namespace asymsim
