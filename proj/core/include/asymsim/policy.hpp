#pragma once

#include "asymsim/platform.hpp"
#include "asymsim/scheduler.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace asymsim {

// pbotlev: two-queue scheduling only, no frequency or gating action.
// fs1/fs2/fs2p: scale the LITTLE cluster frequency from queue counters.
// fs3: fs2's rule aimed at the big cluster.
// ts1/ts2/ts3: gate LITTLE (ts1) or big (ts2, ts3) below a parallelism
// threshold; ts3 additionally powers the gated cluster off once drained.
enum class PolicyKind { PBotlev, Fs1, Fs2, Fs2Prime, Fs3, Ts1, Ts2, Ts3 };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_from_string(std::string_view name);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::PBotlev;
    double n_thres_pct = 0.0;      // required for ts*, in (0, 100]
    double ts_hysteresis_pct = 0.0; // extra margin before re-enabling

    bool is_fs() const;
    bool is_ts() const;
    // "LITTLE" for fs1/fs2/fs2p/ts1, "big" for fs3/ts2/ts3, "" otherwise.
    std::string_view target_cluster_name() const;
    void validate() const;
};

// Frequency-step rules. Tables are ascending; counters come from the
// scheduler right after a ready-set change.
//
// fs1: k = floor(n_crit / n_non_crit) picks the k-th highest step; more
//      critical than non-critical work slows the LITTLE cluster down.
//      No critical work pending -> lowest step; n_crit <= n_non_crit -> highest.
int fs1_frequency_mhz(std::int64_t n_crit, std::int64_t n_non_crit,
                      const std::vector<int>& table_mhz);
// fs2: r = n_non_crit / n_max_nc quantized linearly over the whole table,
//      table[floor(r * size)] with r >= 1 saturating at the highest step.
int fs2_frequency_mhz(std::int64_t n_non_crit, std::int64_t n_max_nc,
                      const std::vector<int>& table_mhz);
// fs2p: two-level variant of fs2, lowest step below r = 0.5, highest at or above.
int fs2p_frequency_mhz(std::int64_t n_non_crit, std::int64_t n_max_nc,
                       const std::vector<int>& table_mhz);

// Gate when n_ready < (n_thres_pct/100) * n_max; re-enable at >=.
// A nonzero hysteresis raises the re-enable bound to (pct + hysteresis)%.
bool ts_cluster_disabled(std::int64_t n_ready, std::int64_t n_max,
                         const PolicyConfig& config, bool currently_disabled);

struct PolicyDecision {
    struct Frequency {
        int cluster = 0;
        int freq_mhz = 0;
    };
    struct Schedulable {
        int cluster = 0;
        bool value = true;
    };
    struct Power {
        int cluster = 0;
        bool powered_on = true;
    };
    std::optional<Frequency> frequency;
    std::optional<Schedulable> schedulable;
    std::optional<Power> power; // desired state; power-off waits for drain
    bool empty() const { return !frequency && !schedulable && !power; }
};

// A policy bound to a platform: target cluster resolved and config checked
// up front (ts3 needs a cluster that supports powering off).
class Policy {
public:
    Policy(const PolicyConfig& config, const PlatformModel& platform);

    // Evaluated synchronously after every ready-set change.
    PolicyDecision on_ready_set_change(const SchedulerState& state) const;

    const PolicyConfig& config() const { return config_; }
    int target_cluster() const { return target_cluster_; } // -1 for pbotlev

private:
    PolicyConfig config_;
    const PlatformModel* platform_;
    int target_cluster_ = -1;
};

} // namespace asymsim
