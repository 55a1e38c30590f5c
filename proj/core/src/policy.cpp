#include "asymsim/policy.hpp"

#include "asymsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace asymsim {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::PBotlev: return "pbotlev";
    case PolicyKind::Fs1: return "fs1";
    case PolicyKind::Fs2: return "fs2";
    case PolicyKind::Fs2Prime: return "fs2p";
    case PolicyKind::Fs3: return "fs3";
    case PolicyKind::Ts1: return "ts1";
    case PolicyKind::Ts2: return "ts2";
    case PolicyKind::Ts3: return "ts3";
    }
    throw ConfigError("invalid policy kind value");
}

PolicyKind policy_from_string(std::string_view name) {
    if (name == "pbotlev") return PolicyKind::PBotlev;
    if (name == "fs1") return PolicyKind::Fs1;
    if (name == "fs2") return PolicyKind::Fs2;
    if (name == "fs2p") return PolicyKind::Fs2Prime;
    if (name == "fs3") return PolicyKind::Fs3;
    if (name == "ts1") return PolicyKind::Ts1;
    if (name == "ts2") return PolicyKind::Ts2;
    if (name == "ts3") return PolicyKind::Ts3;
    throw ConfigError("unknown policy \"" + std::string(name) + "\"");
}

bool PolicyConfig::is_fs() const {
    return kind == PolicyKind::Fs1 || kind == PolicyKind::Fs2 ||
           kind == PolicyKind::Fs2Prime || kind == PolicyKind::Fs3;
}

bool PolicyConfig::is_ts() const {
    return kind == PolicyKind::Ts1 || kind == PolicyKind::Ts2 || kind == PolicyKind::Ts3;
}

std::string_view PolicyConfig::target_cluster_name() const {
    switch (kind) {
    case PolicyKind::Fs1:
    case PolicyKind::Fs2:
    case PolicyKind::Fs2Prime:
    case PolicyKind::Ts1:
        return "LITTLE";
    case PolicyKind::Fs3:
    case PolicyKind::Ts2:
    case PolicyKind::Ts3:
        return "big";
    case PolicyKind::PBotlev:
        break;
    }
    return "";
}

void PolicyConfig::validate() const {
    if (is_ts()) {
        if (!std::isfinite(n_thres_pct) || n_thres_pct <= 0.0 || n_thres_pct > 100.0)
            throw ConfigError("threshold policies need n_thres_pct in (0, 100]");
        if (!std::isfinite(ts_hysteresis_pct) || ts_hysteresis_pct < 0.0)
            throw ConfigError("ts_hysteresis_pct must be non-negative");
    }
}

int fs1_frequency_mhz(std::int64_t n_crit, std::int64_t n_non_crit,
                      const std::vector<int>& table_mhz) {
    if (table_mhz.empty())
        throw ConfigError("empty frequency table");
    if (n_non_crit <= 0)
        return n_crit > 0 ? table_mhz.front() : table_mhz.back();
    if (n_crit <= n_non_crit)
        return table_mhz.back();
    const auto k = static_cast<std::int64_t>(n_crit / n_non_crit);
    const auto n = static_cast<std::int64_t>(table_mhz.size());
    return table_mhz[static_cast<std::size_t>(n - std::clamp<std::int64_t>(k, 1, n))];
}

int fs2_frequency_mhz(std::int64_t n_non_crit, std::int64_t n_max_nc,
                      const std::vector<int>& table_mhz) {
    if (table_mhz.empty())
        throw ConfigError("empty frequency table");
    if (n_max_nc <= 0 || n_non_crit >= n_max_nc)
        return table_mhz.back();
    // floor((n/max) * size) done in integers so step boundaries are exact
    const auto size = static_cast<std::int64_t>(table_mhz.size());
    const std::int64_t idx = std::min(n_non_crit * size / n_max_nc, size - 1);
    return table_mhz[static_cast<std::size_t>(idx)];
}

int fs2p_frequency_mhz(std::int64_t n_non_crit, std::int64_t n_max_nc,
                       const std::vector<int>& table_mhz) {
    if (table_mhz.empty())
        throw ConfigError("empty frequency table");
    if (n_max_nc <= 0 || 2 * n_non_crit >= n_max_nc)
        return table_mhz.back();
    return table_mhz.front();
}

bool ts_cluster_disabled(std::int64_t n_ready, std::int64_t n_max,
                         const PolicyConfig& config, bool currently_disabled) {
    const double bound = config.n_thres_pct / 100.0 * static_cast<double>(n_max);
    if (!currently_disabled)
        return static_cast<double>(n_ready) < bound;
    const double enable_bound =
        (config.n_thres_pct + config.ts_hysteresis_pct) / 100.0 * static_cast<double>(n_max);
    return static_cast<double>(n_ready) < enable_bound;
}

Policy::Policy(const PolicyConfig& config, const PlatformModel& platform)
    : config_(config), platform_(&platform) {
    config_.validate();
    const std::string_view target = config_.target_cluster_name();
    if (!target.empty()) {
        target_cluster_ = platform.cluster_index(target);
        if (config_.kind == PolicyKind::Ts3 &&
            !platform.clusters[static_cast<std::size_t>(target_cluster_)].supports_power_off)
            throw ConfigError("ts3 needs a cluster that supports powering off; " +
                              std::string(target) + " does not");
    }
}

PolicyDecision Policy::on_ready_set_change(const SchedulerState& state) const {
    PolicyDecision decision;
    if (config_.kind == PolicyKind::PBotlev)
        return decision;

    const ClusterModel& target = platform_->clusters[static_cast<std::size_t>(target_cluster_)];
    switch (config_.kind) {
    case PolicyKind::Fs1:
        decision.frequency = {target_cluster_,
                              fs1_frequency_mhz(state.n_crit(), state.n_non_crit(),
                                                target.freq_table_mhz)};
        break;
    case PolicyKind::Fs2:
    case PolicyKind::Fs3:
        decision.frequency = {target_cluster_,
                              fs2_frequency_mhz(state.n_non_crit(), state.n_max_nc(),
                                                target.freq_table_mhz)};
        break;
    case PolicyKind::Fs2Prime:
        decision.frequency = {target_cluster_,
                              fs2p_frequency_mhz(state.n_non_crit(), state.n_max_nc(),
                                                 target.freq_table_mhz)};
        break;
    case PolicyKind::Ts1:
    case PolicyKind::Ts2:
    case PolicyKind::Ts3: {
        const bool currently_disabled = !state.schedulable(target_cluster_);
        const bool disabled =
            ts_cluster_disabled(state.n_ready(), state.n_max(), config_, currently_disabled);
        if (disabled != currently_disabled) {
            decision.schedulable = {target_cluster_, !disabled};
            if (config_.kind == PolicyKind::Ts3)
                decision.power = {target_cluster_, !disabled};
        }
        break;
    }
    case PolicyKind::PBotlev:
        break;
    }
    return decision;
}

} // namespace asymsim
