#pragma once

#include <span>
#include <string>
#include <vector>

#include "autopv/plant.hpp"

namespace autopv {

/// Blueprint for one generated plant. A plant is either a single panel plane
/// (inclination/azimuth) or a mixture of planes for multi-roof sites; mixture
/// fractions must sum to 1.
struct SyntheticPlantConfig {
    std::string id;
    double inclination_deg = 30.0;
    double azimuth_deg = 180.0;
    double p_n_kw = 10.0;
    double latitude_deg = 49.0;
    double noise_std = 0.06;  // measurement noise as a fraction of p_n

    struct Component {
        double inclination_deg;
        double azimuth_deg;
        double fraction;
    };
    std::vector<Component> mixture;  // empty: single plane

    void validate() const;
};

struct SolarPosition {
    double elevation_deg;
    double azimuth_deg;  // 0 = north, clockwise
};

/// Declination/hour-angle approximation; timestamps are treated as local
/// solar time. Polar latitudes are out of scope.
SolarPosition solar_position(double latitude_deg, Timestamp t);

/// Cloud attenuation and air temperature shared by every plant of a fleet.
struct RegionalWeather {
    TimeSeries cloud_factor;   // in [0.1, 1]
    TimeSeries temperature_c;
};

RegionalWeather generate_regional_weather(double latitude_deg, Timestamp start, int days,
                                          std::uint64_t seed);

/// Generates measured power plus a shared day-ahead style weather forecast
/// (truth smoothed over two hours, multiplicatively perturbed). Same seed,
/// same fleet, bit for bit. Plant noise streams are keyed by list position.
std::vector<PlantRecord> generate_fleet(std::span<const SyntheticPlantConfig> configs, Timestamp start,
                                        int days, std::uint64_t seed);

struct DipWindow {
    Timestamp start = 0;
    Timestamp end = 0;  // exclusive
    double factor = 0.0;
};

/// Scales measured power inside each window, modeling outages and partial
/// shading; weather is untouched. Windows must not overlap.
PlantRecord inject_dips(const PlantRecord& rec, std::span<const DipWindow> windows);

/// The desk-scale reference fleet: 11 plants at latitude 49, diverse
/// mountings, one two-roof mixture, quarter-hourly.
std::vector<SyntheticPlantConfig> default_fleet_configs();

/// Outage windows applied to pv07 in 2020: a full-month shutdown in May and
/// two partial dips in September and October.
std::vector<DipWindow> default_dip_windows();

/// Three calendar years 2018 through 2020 with the default configs and the
/// pv07 dips applied.
std::vector<PlantRecord> build_default_fleet(std::uint64_t seed);

}  // namespace autopv
