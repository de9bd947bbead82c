#include "autopv/run_config.hpp"

#include <array>
#include <algorithm>

#include "autopv/csv_io.hpp"
#include "autopv/errors.hpp"

namespace autopv {

void RunConfig::validate() const {
    if (data_dir.empty() || model_dir.empty() || report_dir.empty()) {
        throw ConfigError("data_dir, model_dir, and report_dir must not be empty");
    }
    if (fleet != "default-11") throw ConfigError("unknown fleet preset '" + fleet + "'");
    if (days < 1) throw ConfigError("days must be at least 1");
    if (cycle_days < 1) throw ConfigError("cycle_days must be at least 1");
    if (window_samples < 1) throw ConfigError("window_samples must be at least 1");
    if (max_trials < 1) throw ConfigError("max_trials must be at least 1");
    // must parse; whether test_start falls inside the data on disk is
    // checked where the split is actually formed
    try {
        parse_iso8601(start);
        parse_iso8601(test_start);
    } catch (const InvalidSeriesError& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"data_dir", data_dir.string()},
        {"model_dir", model_dir.string()},
        {"report_dir", report_dir.string()},
        {"fleet", fleet},
        {"seed", seed},
        {"start", start},
        {"days", days},
        {"test_start", test_start},
        {"cycle_days", cycle_days},
        {"window_samples", window_samples},
        {"max_trials", max_trials},
        {"adaptation_enabled", adaptation_enabled},
        {"threads", threads},
    };
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    static constexpr std::array known{"data_dir",    "model_dir",      "report_dir", "fleet",
                                      "seed",        "start",          "days",       "test_start",
                                      "cycle_days",  "window_samples", "max_trials",
                                      "adaptation_enabled", "threads"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    RunConfig cfg;
    cfg.data_dir = j.value("data_dir", cfg.data_dir.string());
    cfg.model_dir = j.value("model_dir", cfg.model_dir.string());
    cfg.report_dir = j.value("report_dir", cfg.report_dir.string());
    cfg.fleet = j.value("fleet", cfg.fleet);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.start = j.value("start", cfg.start);
    cfg.days = j.value("days", cfg.days);
    cfg.test_start = j.value("test_start", cfg.test_start);
    cfg.cycle_days = j.value("cycle_days", cfg.cycle_days);
    cfg.window_samples = j.value("window_samples", cfg.window_samples);
    cfg.max_trials = j.value("max_trials", cfg.max_trials);
    cfg.adaptation_enabled = j.value("adaptation_enabled", cfg.adaptation_enabled);
    cfg.threads = j.value("threads", cfg.threads);
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    return from_json(read_json_file(path));
}

}  // namespace autopv
