#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace autopv {

/// One exception type per error category named in the module contracts.
struct InvalidSeriesError : std::runtime_error {
    explicit InvalidSeriesError(const std::string& msg) : std::runtime_error("invalid-series: " + msg) {}
};

struct InvalidPlantError : std::runtime_error {
    explicit InvalidPlantError(const std::string& msg) : std::runtime_error("invalid-plant: " + msg) {}
};

struct InvalidPoolError : std::runtime_error {
    explicit InvalidPoolError(const std::string& msg) : std::runtime_error("invalid-pool: " + msg) {}
};

struct FeatureDomainError : std::domain_error {
    explicit FeatureDomainError(const std::string& msg) : std::domain_error("domain: " + msg) {}
};

struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error("insufficient-data: " + msg) {}
};

struct InvalidDataError : std::runtime_error {
    explicit InvalidDataError(const std::string& msg) : std::runtime_error("invalid-data: " + msg) {}
};

struct DegenerateDataError : std::runtime_error {
    explicit DegenerateDataError(const std::string& msg) : std::runtime_error("degenerate-data: " + msg) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error("shape: " + msg) {}
};

/// Raised when every CASH trial failed; keeps the per-trial causes.
struct SearchFailedError : std::runtime_error {
    std::vector<std::string> causes;
    explicit SearchFailedError(std::vector<std::string> trial_causes)
        : std::runtime_error("search-failed: all trials failed (" + std::to_string(trial_causes.size()) +
                             " causes recorded)"),
          causes(std::move(trial_causes)) {}
};

struct UndefinedMetricError : std::runtime_error {
    explicit UndefinedMetricError(const std::string& msg) : std::runtime_error("undefined-metric: " + msg) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error("unsupported: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

}  // namespace autopv
