#include "autopv/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "autopv/errors.hpp"

namespace autopv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

void append_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
    const std::string text(field);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty()) {
        throw IoError(path.string() + ": line " + std::to_string(line_no) + ": bad number '" + text +
                      "'");
    }
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

/// Shared reader for the two CSV schemas: validates the header, the row
/// shape, and the cadence, and hands back the time axis plus value columns.
struct CsvTable {
    Timestamp start = 0;
    Duration step = kQuarterHour;
    std::vector<std::vector<double>> columns;
};

CsvTable read_table(const std::filesystem::path& path, const std::string& expected_header,
                    std::size_t value_columns) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header) {
        throw IoError(path.string() + ": expected header '" + expected_header + "', got '" + line + "'");
    }

    CsvTable table;
    table.columns.resize(value_columns);
    Timestamp prev = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != value_columns + 1) {
            throw IoError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                          std::to_string(value_columns + 1) + " fields, got " +
                          std::to_string(fields.size()));
        }
        Timestamp t;
        try {
            t = parse_iso8601(std::string(fields[0]));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::size_t row = table.columns[0].size();
        if (row == 0) {
            table.start = t;
        } else if (row == 1) {
            if (t <= table.start) {
                throw IoError(path.string() + ": line " + std::to_string(line_no) +
                              ": timestamps must increase");
            }
            table.step = t - table.start;
        } else if (t - prev != table.step) {
            throw IoError(path.string() + ": line " + std::to_string(line_no) +
                          ": gap or irregular cadence (step " + std::to_string(t - prev) +
                          "s, expected " + std::to_string(table.step) + "s)");
        }
        prev = t;
        for (std::size_t c = 0; c < value_columns; ++c) {
            table.columns[c].push_back(parse_double(fields[c + 1], path, line_no));
        }
    }
    if (table.columns[0].empty()) throw IoError(path.string() + ": no data rows");
    return table;
}

// plant ids become file names, so keep them to a safe alphabet
void check_plant_id(const std::string& id) {
    if (id.empty()) throw IoError("plant id must not be empty");
    for (const char ch : id) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        if (!ok) throw IoError("plant id '" + id + "' contains characters unsafe for file names");
    }
}

}  // namespace

void write_columns_csv(const std::filesystem::path& path, const std::string& header,
                       const TimeSeries& axis, std::span<const TimeSeries* const> columns) {
    for (const TimeSeries* col : columns) require_aligned(axis, *col, "csv column");
    std::ofstream out = open_out(path);
    out << header << '\n';
    std::string line;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        line = format_iso8601(axis.time_at(k));
        for (const TimeSeries* col : columns) {
            line += ',';
            append_double(line, (*col)[k]);
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IoError("write failed: " + path.string());
}

TimeSeries read_power_csv(const std::filesystem::path& path) {
    CsvTable table = read_table(path, "timestamp,power_kw", 1);
    return TimeSeries(table.start, table.step, std::move(table.columns[0]));
}

void write_power_csv(const std::filesystem::path& path, const TimeSeries& series) {
    const TimeSeries* cols[] = {&series};
    write_columns_csv(path, "timestamp,power_kw", series, cols);
}

WeatherForecast read_weather_csv(const std::filesystem::path& path) {
    CsvTable table = read_table(path, "timestamp,ghat_wm2,that_c", 2);
    WeatherForecast w;
    w.g_hat_wm2 = TimeSeries(table.start, table.step, std::move(table.columns[0]));
    w.t_hat_c = TimeSeries(table.start, table.step, std::move(table.columns[1]));
    return w;
}

void write_weather_csv(const std::filesystem::path& path, const WeatherForecast& weather) {
    const TimeSeries* cols[] = {&weather.g_hat_wm2, &weather.t_hat_c};
    write_columns_csv(path, "timestamp,ghat_wm2,that_c", weather.g_hat_wm2, cols);
}

void save_fleet(const std::filesystem::path& dir, std::span<const PlantRecord> fleet,
                const nlohmann::json& extra) {
    if (fleet.empty()) throw IoError("refusing to save an empty fleet");
    std::filesystem::create_directories(dir);

    nlohmann::json manifest{{"format_version", 1}};
    for (const auto& [key, value] : extra.items()) {
        if (key == "format_version" || key == "plants") {
            throw ConfigError("manifest extra may not use reserved key '" + key + "'");
        }
        manifest[key] = value;
    }
    nlohmann::json plants = nlohmann::json::array();
    for (const PlantRecord& rec : fleet) {
        check_plant_id(rec.id);
        rec.validate();
        nlohmann::json entry{{"id", rec.id}, {"p_n_kw", rec.p_n_kw}};
        if (rec.mounting) {
            entry["mounting"] = {{"inclination_deg", rec.mounting->inclination_deg},
                                 {"azimuth_deg", rec.mounting->azimuth_deg}};
        }
        plants.push_back(std::move(entry));
        write_power_csv(dir / (rec.id + ".power.csv"), rec.power_kw);
        write_weather_csv(dir / (rec.id + ".weather.csv"), rec.weather);
    }
    manifest["plants"] = std::move(plants);
    write_json_file(dir / "manifest.json", manifest);
}

nlohmann::json read_fleet_manifest(const std::filesystem::path& dir) {
    nlohmann::json manifest = read_json_file(dir / "manifest.json");
    const int version = manifest.at("format_version").get<int>();
    if (version != 1) {
        throw IoError("unsupported fleet manifest format_version " + std::to_string(version));
    }
    return manifest;
}

std::vector<PlantRecord> load_fleet(const std::filesystem::path& dir) {
    const nlohmann::json manifest = read_fleet_manifest(dir);
    std::vector<PlantRecord> fleet;
    for (const auto& entry : manifest.at("plants")) {
        PlantRecord rec;
        rec.id = entry.at("id").get<std::string>();
        check_plant_id(rec.id);
        rec.p_n_kw = entry.at("p_n_kw").get<double>();
        if (entry.contains("mounting")) {
            rec.mounting = Mounting{entry["mounting"].at("inclination_deg").get<double>(),
                                    entry["mounting"].at("azimuth_deg").get<double>()};
        }
        rec.power_kw = read_power_csv(dir / (rec.id + ".power.csv"));
        rec.weather = read_weather_csv(dir / (rec.id + ".weather.csv"));
        rec.validate();
        fleet.push_back(std::move(rec));
    }
    if (fleet.empty()) throw IoError(dir.string() + ": manifest lists no plants");
    return fleet;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

}  // namespace autopv
