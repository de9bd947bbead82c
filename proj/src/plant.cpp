#include "autopv/plant.hpp"

#include "autopv/errors.hpp"

namespace autopv {

void PlantRecord::validate() const {
    if (p_n_kw <= 0.0) {
        throw InvalidPlantError("plant '" + id + "': p_n must be positive");
    }
    if (mounting) {
        if (mounting->inclination_deg < 0.0 || mounting->inclination_deg > 90.0) {
            throw InvalidPlantError("plant '" + id + "': inclination outside [0, 90]");
        }
        if (mounting->azimuth_deg < 0.0 || mounting->azimuth_deg >= 360.0) {
            throw InvalidPlantError("plant '" + id + "': azimuth outside [0, 360)");
        }
    }
    if (!power_kw.empty() || !weather.g_hat_wm2.empty()) {
        require_aligned(power_kw, weather.g_hat_wm2, "plant power vs g_hat");
        require_aligned(power_kw, weather.t_hat_c, "plant power vs t_hat");
    }
}

PlantRecord PlantRecord::slice_time(Timestamp t0, Timestamp t1) const {
    PlantRecord out;
    out.id = id;
    out.p_n_kw = p_n_kw;
    out.mounting = mounting;
    out.power_kw = power_kw.slice_time(t0, t1);
    out.weather.g_hat_wm2 = weather.g_hat_wm2.slice_time(t0, t1);
    out.weather.t_hat_c = weather.t_hat_c.slice_time(t0, t1);
    return out;
}

}  // namespace autopv
