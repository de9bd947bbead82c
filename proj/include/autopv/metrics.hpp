#pragma once

#include "autopv/time_series.hpp"

namespace autopv {

/// Mean absolute error normalized by total production: sum of |forecast −
/// actual| over sum of actual, every sample counted, nights included.
/// Undefined (throws) when the actual series sums to zero.
double nmae(const TimeSeries& forecast_kw, const TimeSeries& actual_kw);

}  // namespace autopv
