#pragma once

#include "asymsim/engine.hpp"
#include "asymsim/platform.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace asymsim {

// core,task_id,kind,start_s,end_s,freq_mhz
void write_trace_csv(const SimulationResult& result, std::ostream& out);

// t_s,n_crit,n_noncrit,freq_little_mhz,freq_big_mhz,big_schedulable,little_schedulable
// One row per instant at which any column changed; values hold until the next row.
void write_series_csv(const SimulationResult& result, const PlatformModel& platform,
                      std::ostream& out);

struct RunMetadata {
    std::string policy;
    std::string work_stealing;
    std::string blevel_weights;
    std::string dag_source; // e.g. "cholesky m=4096 b=512" or a file name
    double n_thres_pct = 0.0; // meaningful for ts* only
    bool has_threshold = false;
    std::uint64_t seed = 0;
    std::size_t task_count = 0;
    std::size_t edge_count = 0;
};

std::string result_summary_json(const SimulationResult& result,
                                const PlatformModel& platform,
                                const RunMetadata& metadata);

void write_text_file(const std::filesystem::path& file, std::string_view content);

} // namespace asymsim
