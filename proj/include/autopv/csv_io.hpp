#pragma once

#include <filesystem>
#include <span>

#include "autopv/plant.hpp"

#include <json.hpp>

namespace autopv {

/// Columns `timestamp,power_kw`: ISO-8601 UTC timestamps on a uniform
/// cadence. The reader rejects gaps, irregular steps, and malformed rows.
TimeSeries read_power_csv(const std::filesystem::path& path);
void write_power_csv(const std::filesystem::path& path, const TimeSeries& series);

/// Columns `timestamp,ghat_wm2,that_c`, both series on one shared time axis.
WeatherForecast read_weather_csv(const std::filesystem::path& path);
void write_weather_csv(const std::filesystem::path& path, const WeatherForecast& weather);

/// Fleet directory layout: `manifest.json` plus `<id>.power.csv` and
/// `<id>.weather.csv` per plant. `extra` is merged into the manifest for
/// provenance (seed, generation parameters) and may not use the reserved
/// keys `format_version` and `plants`.
void save_fleet(const std::filesystem::path& dir, std::span<const PlantRecord> fleet,
                const nlohmann::json& extra = nlohmann::json::object());
std::vector<PlantRecord> load_fleet(const std::filesystem::path& dir);
nlohmann::json read_fleet_manifest(const std::filesystem::path& dir);

/// Generic writer: ISO-8601 timestamp column plus value columns sharing the
/// axis series' time grid. The header names every column.
void write_columns_csv(const std::filesystem::path& path, const std::string& header,
                       const TimeSeries& axis, std::span<const TimeSeries* const> columns);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace autopv
