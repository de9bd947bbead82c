#pragma once

#include <filesystem>
#include <string>

#include "autopv/time_series.hpp"

#include <json.hpp>

namespace autopv {

/// One structured config file drives every command; CLI flags override
/// individual fields. Unknown keys in the file are rejected so typos fail
/// loudly instead of silently using a default.
struct RunConfig {
    std::filesystem::path data_dir = "data";
    std::filesystem::path model_dir = "models";
    std::filesystem::path report_dir = "reports";
    std::string fleet = "default-11";                 // generator preset
    std::uint64_t seed = 1;
    std::string start = "2018-01-01T00:00:00Z";       // first generated day
    int days = 1096;                                  // generated span
    std::string test_start = "2020-01-01T00:00:00Z";  // pretrain/test boundary
    int cycle_days = 28;                              // adaptation cadence
    std::size_t window_samples = 2688;                // optimization window
    int max_trials = 200;                             // per configuration search
    bool adaptation_enabled = true;
    unsigned threads = 0;                             // 0: hardware concurrency

    void validate() const;
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::filesystem::path& path);
};

}  // namespace autopv
