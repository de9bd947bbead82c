#pragma once

#include <optional>
#include <string>

#include "autopv/time_series.hpp"

namespace autopv {

/// Panel plane orientation. Azimuth convention: 0 = north, 90 = east,
/// 180 = south, 270 = west.
struct Mounting {
    double inclination_deg = 0.0;  // [0, 90]
    double azimuth_deg = 180.0;    // [0, 360)
};

/// Day-ahead weather forecast inputs: global radiation and air temperature.
struct WeatherForecast {
    TimeSeries g_hat_wm2;
    TimeSeries t_hat_c;
};

/// A plant's metadata plus its measurement and weather-forecast series.
/// `mounting` is ground truth for synthetic plants and normally unknown in
/// the field.
struct PlantRecord {
    std::string id;
    double p_n_kw = 0.0;
    std::optional<Mounting> mounting;
    TimeSeries power_kw;
    WeatherForecast weather;

    /// Throws unless p_n > 0 and all present series are mutually aligned.
    void validate() const;

    /// Sub-record over [t0, t1), all series sliced together.
    PlantRecord slice_time(Timestamp t0, Timestamp t1) const;
};

}  // namespace autopv
