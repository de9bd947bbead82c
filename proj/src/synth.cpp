#include "autopv/synth.hpp"

#include <algorithm>
#include <cmath>

#include "autopv/errors.hpp"
#include "autopv/rng.hpp"

namespace autopv {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kSolarConstant = 1000.0;  // clear-sky scale, W/m^2
constexpr double kCloudMean = 0.72;
constexpr double kCloudPersistence = 0.985;
constexpr double kCloudShock = 0.035;
constexpr double kCloudFloor = 0.1;
constexpr double kTempMeanC = 11.0;
constexpr double kTempSeasonalAmpC = 9.0;
constexpr double kTempDiurnalAmpC = 4.0;
constexpr double kDerateFraction = 0.004;  // per degree above 25 C
constexpr double kDerateKneeC = 25.0;
constexpr double kPowerCap = 1.2;          // of p_n
constexpr int kForecastWindow = 9;         // centered, two hours at 15-min step

void check_mounting_angles(double inclination_deg, double azimuth_deg) {
    if (inclination_deg < 0.0 || inclination_deg > 90.0) {
        throw ConfigError("inclination " + std::to_string(inclination_deg) + " outside [0, 90]");
    }
    if (azimuth_deg < 0.0 || azimuth_deg >= 360.0) {
        throw ConfigError("azimuth " + std::to_string(azimuth_deg) + " outside [0, 360)");
    }
}

}  // namespace

void SyntheticPlantConfig::validate() const {
    if (id.empty()) throw ConfigError("plant config needs an id");
    if (!(p_n_kw > 0.0)) throw ConfigError("plant '" + id + "' nominal power must be positive");
    if (std::abs(latitude_deg) > 66.5) {
        throw UnsupportedError("latitude " + std::to_string(latitude_deg) + " is polar");
    }
    if (noise_std < 0.0) throw ConfigError("plant '" + id + "' noise_std must be non-negative");
    if (mixture.empty()) {
        check_mounting_angles(inclination_deg, azimuth_deg);
        return;
    }
    double total = 0.0;
    for (const Component& c : mixture) {
        check_mounting_angles(c.inclination_deg, c.azimuth_deg);
        if (!(c.fraction > 0.0)) throw ConfigError("mixture fractions must be positive");
        total += c.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("plant '" + id + "' mixture fractions sum to " + std::to_string(total));
    }
}

SolarPosition solar_position(double latitude_deg, Timestamp t) {
    if (std::abs(latitude_deg) > 66.5) {
        throw UnsupportedError("latitude " + std::to_string(latitude_deg) + " is polar");
    }
    const int doy = day_of_year(t);
    const double declination =
        23.45 * kDegToRad * std::sin(2.0 * kPi * (284.0 + doy) / 365.0);
    const CalendarFields cal = calendar_fields(t);
    const double hour_angle = (static_cast<double>(cal.minute_of_day) / 60.0 - 12.0) * 15.0 * kDegToRad;
    const double lat = latitude_deg * kDegToRad;

    const double sin_elev = std::sin(lat) * std::sin(declination) +
                            std::cos(lat) * std::cos(declination) * std::cos(hour_angle);
    const double elevation = std::asin(std::clamp(sin_elev, -1.0, 1.0));

    // from north, clockwise; the sun stands due south at local noon in the
    // northern mid-latitudes
    const double azimuth = std::atan2(std::sin(hour_angle),
                                      std::cos(hour_angle) * std::sin(lat) -
                                          std::tan(declination) * std::cos(lat)) /
                               kDegToRad +
                           180.0;
    return SolarPosition{elevation / kDegToRad, azimuth};
}

RegionalWeather generate_regional_weather(double latitude_deg, Timestamp start, int days,
                                          std::uint64_t seed) {
    if (days < 1) throw ConfigError("need at least one day");
    if (std::abs(latitude_deg) > 66.5) {
        throw UnsupportedError("latitude " + std::to_string(latitude_deg) + " is polar");
    }
    const std::size_t samples = static_cast<std::size_t>(days) * kSamplesPerDay;

    Rng cloud_rng(derive_seed(seed, "cloud"));
    std::vector<double> cloud(samples);
    double c = kCloudMean;
    for (std::size_t k = 0; k < samples; ++k) {
        c = std::clamp(kCloudMean + kCloudPersistence * (c - kCloudMean) + kCloudShock * cloud_rng.normal(),
                       kCloudFloor, 1.0);
        cloud[k] = c;
    }

    Rng temp_rng(derive_seed(seed, "temp"));
    std::vector<double> temp(samples);
    double noise = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Timestamp t = start + static_cast<Timestamp>(k) * kQuarterHour;
        const int doy = day_of_year(t);
        const CalendarFields cal = calendar_fields(t);
        const double seasonal =
            kTempMeanC + kTempSeasonalAmpC * std::sin(2.0 * kPi * (doy - 110) / 365.0);
        const double diurnal =
            kTempDiurnalAmpC * std::sin(2.0 * kPi * (cal.minute_of_day - 570) / 1440.0);
        noise = 0.98 * noise + 0.25 * temp_rng.normal();
        temp[k] = seasonal + diurnal + noise;
    }

    return RegionalWeather{TimeSeries(start, kQuarterHour, std::move(cloud)),
                           TimeSeries(start, kQuarterHour, std::move(temp))};
}

namespace {

// centered moving average with the window clipped at the series edges
std::vector<double> smooth(const std::vector<double>& v, int window) {
    const int half = window / 2;
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    std::vector<double> prefix(v.size() + 1, 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i)];
    std::vector<double> out(v.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min(n - 1, i + half);
        out[static_cast<std::size_t>(i)] =
            (prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)]) /
            static_cast<double>(hi - lo + 1);
    }
    return out;
}

// sun-to-panel incidence cosine, clamped at grazing
double plane_projection(const SolarPosition& sun, double inclination_deg, double azimuth_deg) {
    const double elev = sun.elevation_deg * kDegToRad;
    const double beta = inclination_deg * kDegToRad;
    const double cos_theta = std::sin(elev) * std::cos(beta) +
                             std::cos(elev) * std::sin(beta) *
                                 std::cos((sun.azimuth_deg - azimuth_deg) * kDegToRad);
    return std::max(0.0, cos_theta);
}

}  // namespace

std::vector<PlantRecord> generate_fleet(std::span<const SyntheticPlantConfig> configs, Timestamp start,
                                        int days, std::uint64_t seed) {
    if (days < 1) throw ConfigError("need at least one day");
    if (configs.empty()) throw ConfigError("no plant configs given");
    for (const SyntheticPlantConfig& cfg : configs) cfg.validate();

    const double latitude = configs.front().latitude_deg;
    const std::size_t samples = static_cast<std::size_t>(days) * kSamplesPerDay;
    const RegionalWeather weather = generate_regional_weather(latitude, start, days, seed);

    // geometry shared by every plant at this latitude
    std::vector<SolarPosition> sun(samples);
    std::vector<double> horizontal(samples);  // observed global irradiance, W/m^2
    std::vector<double> beam(samples);        // clear-sky beam scale before clouds
    for (std::size_t k = 0; k < samples; ++k) {
        const Timestamp t = start + static_cast<Timestamp>(k) * kQuarterHour;
        sun[k] = solar_position(latitude, t);
        const double sin_elev = std::sin(sun[k].elevation_deg * kDegToRad);
        if (sin_elev > 0.0) {
            horizontal[k] = kSolarConstant * std::pow(sin_elev, 1.2) * weather.cloud_factor[k];
            beam[k] = kSolarConstant * std::pow(sin_elev, 0.2);
        }
    }

    // one regional forecast shared by the fleet: smoothed truth with
    // persistent multiplicative (irradiance) and additive (temperature) error
    Rng gf_rng(derive_seed(seed, "forecast-g"));
    Rng tf_rng(derive_seed(seed, "forecast-t"));
    std::vector<double> g_hat = smooth(horizontal, kForecastWindow);
    std::vector<double> t_hat = smooth(weather.temperature_c.values(), kForecastWindow);
    double g_err = 0.0;
    double t_err = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        g_err = 0.97 * g_err + 0.243 * gf_rng.normal();
        t_err = 0.97 * t_err + 0.243 * tf_rng.normal();
        g_hat[k] *= std::max(0.0, 1.0 + 0.18 * g_err);
        t_hat[k] += 1.5 * t_err;
    }
    const TimeSeries g_hat_series(start, kQuarterHour, std::move(g_hat));
    const TimeSeries t_hat_series(start, kQuarterHour, std::move(t_hat));

    std::vector<PlantRecord> fleet;
    fleet.reserve(configs.size());
    for (std::size_t p = 0; p < configs.size(); ++p) {
        const SyntheticPlantConfig& cfg = configs[p];
        if (cfg.latitude_deg != latitude) {
            throw ConfigError("fleet plants must share one latitude (regional weather)");
        }

        std::vector<SyntheticPlantConfig::Component> parts = cfg.mixture;
        if (parts.empty()) parts.push_back({cfg.inclination_deg, cfg.azimuth_deg, 1.0});

        Rng noise_rng(derive_seed(seed, "plant", p));
        std::vector<double> power(samples, 0.0);
        for (std::size_t k = 0; k < samples; ++k) {
            if (sun[k].elevation_deg <= 0.0) continue;  // nights are exactly zero
            const double derate =
                1.0 - kDerateFraction * std::max(0.0, weather.temperature_c[k] - kDerateKneeC);
            const double eps = noise_rng.normal();
            double mixed = 0.0;
            for (const auto& part : parts) {
                const double poa = beam[k] * plane_projection(sun[k], part.inclination_deg,
                                                              part.azimuth_deg) *
                                   weather.cloud_factor[k] / kSolarConstant;
                const double clean = cfg.p_n_kw * poa * derate;
                const double noisy = clean + cfg.p_n_kw * cfg.noise_std * eps;
                mixed += part.fraction * std::clamp(noisy, 0.0, kPowerCap * cfg.p_n_kw);
            }
            power[k] = mixed;
        }

        PlantRecord rec;
        rec.id = cfg.id;
        rec.p_n_kw = cfg.p_n_kw;
        if (cfg.mixture.empty()) rec.mounting = Mounting{cfg.inclination_deg, cfg.azimuth_deg};
        rec.power_kw = TimeSeries(start, kQuarterHour, std::move(power));
        rec.weather = WeatherForecast{g_hat_series, t_hat_series};
        rec.validate();
        fleet.push_back(std::move(rec));
    }
    return fleet;
}

PlantRecord inject_dips(const PlantRecord& rec, std::span<const DipWindow> windows) {
    std::vector<DipWindow> sorted(windows.begin(), windows.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const DipWindow& a, const DipWindow& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const DipWindow& w = sorted[i];
        if (!(w.factor >= 0.0 && w.factor < 1.0)) {
            throw ConfigError("dip factor " + std::to_string(w.factor) + " outside [0, 1)");
        }
        if (w.end <= w.start) throw ConfigError("dip window must end after it starts");
        if (i > 0 && sorted[i - 1].end > w.start) throw ConfigError("dip windows overlap");
    }

    std::vector<double> power(rec.power_kw.values());
    for (const DipWindow& w : sorted) {
        for (std::size_t k = 0; k < power.size(); ++k) {
            const Timestamp t = rec.power_kw.time_at(k);
            if (t >= w.start && t < w.end) power[k] *= w.factor;
        }
    }

    PlantRecord out = rec;
    out.power_kw = TimeSeries(rec.power_kw.start_time(), rec.power_kw.step(), std::move(power));
    return out;
}

std::vector<SyntheticPlantConfig> default_fleet_configs() {
    std::vector<SyntheticPlantConfig> configs;
    const auto single = [&](const char* id, double incl, double az, double p_n) {
        SyntheticPlantConfig cfg;
        cfg.id = id;
        cfg.inclination_deg = incl;
        cfg.azimuth_deg = az;
        cfg.p_n_kw = p_n;
        configs.push_back(std::move(cfg));
    };
    single("pv01", 30.0, 180.0, 10.0);
    single("pv02", 30.0, 90.0, 8.2);
    single("pv03", 30.0, 270.0, 12.5);
    single("pv04", 50.0, 180.0, 5.5);
    single("pv05", 20.0, 170.0, 20.0);
    single("pv06", 32.0, 105.0, 7.5);
    single("pv07", 35.0, 225.0, 9.0);   // receives the outage windows in 2020
    single("pv08", 60.0, 180.0, 6.0);   // steepest mounting, unlike all others
    single("pv09", 28.0, 255.0, 15.0);
    single("pv10", 25.0, 160.0, 11.0);

    SyntheticPlantConfig two_roof;
    two_roof.id = "pv11";
    two_roof.p_n_kw = 9.8;
    two_roof.mixture = {{30.0, 90.0, 0.5}, {30.0, 270.0, 0.5}};
    configs.push_back(std::move(two_roof));
    return configs;
}

std::vector<DipWindow> default_dip_windows() {
    return {
        {to_timestamp({2020, 5, 1, 0, 0, 0}), to_timestamp({2020, 6, 1, 0, 0, 0}), 0.0},
        {to_timestamp({2020, 9, 10, 0, 0, 0}), to_timestamp({2020, 9, 21, 0, 0, 0}), 0.35},
        {to_timestamp({2020, 10, 3, 0, 0, 0}), to_timestamp({2020, 10, 13, 0, 0, 0}), 0.55},
    };
}

std::vector<PlantRecord> build_default_fleet(std::uint64_t seed) {
    const auto configs = default_fleet_configs();
    const Timestamp start = to_timestamp({2018, 1, 1, 0, 0, 0});
    std::vector<PlantRecord> fleet = generate_fleet(configs, start, 1096, seed);
    const auto dips = default_dip_windows();
    for (PlantRecord& rec : fleet) {
        if (rec.id == "pv07") rec = inject_dips(rec, dips);
    }
    return fleet;
}

}  // namespace autopv
