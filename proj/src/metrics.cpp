#include "autopv/metrics.hpp"

#include <cmath>

#include "autopv/errors.hpp"

namespace autopv {

double nmae(const TimeSeries& forecast_kw, const TimeSeries& actual_kw) {
    require_aligned(forecast_kw, actual_kw, "nmae");
    double abs_err = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < actual_kw.size(); ++k) {
        abs_err += std::abs(forecast_kw[k] - actual_kw[k]);
        total += actual_kw[k];
    }
    if (!(total > 0.0)) {
        throw UndefinedMetricError("actual series sums to " + std::to_string(total) +
                                   "; nmae needs positive total production");
    }
    return abs_err / total;
}

}  // namespace autopv
