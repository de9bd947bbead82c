#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace autopv {

/// Seconds since the Unix epoch, always UTC.
using Timestamp = std::int64_t;
/// Step width in seconds.
using Duration = std::int64_t;

constexpr Duration kQuarterHour = 900;
constexpr Duration kDay = 86400;
constexpr int kSamplesPerDay = 96;  // at the quarter-hourly default step

struct CivilDateTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

Timestamp to_timestamp(const CivilDateTime& c);
CivilDateTime to_civil(Timestamp t);

/// Parses "YYYY-MM-DDTHH:MM:SS" with optional trailing "Z"; seconds optional.
Timestamp parse_iso8601(const std::string& text);
std::string format_iso8601(Timestamp t);

/// Day of year, 1-based (needed by the solar geometry).
int day_of_year(Timestamp t);

struct CalendarFields {
    int month;          // 1..12
    int minute_of_day;  // 0..1439
};

CalendarFields calendar_fields(Timestamp t);

/// Uniformly sampled scalar series. Immutable after construction; sample k
/// carries timestamp start + k*step with no gaps.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(Timestamp start, Duration step, std::vector<double> values);

    Timestamp start_time() const { return start_; }
    Duration step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double operator[](std::size_t k) const { return values_[k]; }
    const std::vector<double>& values() const { return values_; }
    Timestamp time_at(std::size_t k) const { return start_ + static_cast<Timestamp>(k) * step_; }
    Timestamp end_time() const { return time_at(size()); }
    double step_hours() const { return static_cast<double>(step_) / 3600.0; }

    /// Sub-series of samples with timestamps in [t0, t1). Both bounds must
    /// lie on the sampling grid.
    TimeSeries slice_time(Timestamp t0, Timestamp t1) const;
    TimeSeries slice_index(std::size_t first, std::size_t count) const;

    /// Last n samples.
    TimeSeries tail(std::size_t n) const;

private:
    Timestamp start_ = 0;
    Duration step_ = kQuarterHour;
    std::vector<double> values_;
};

bool aligned(const TimeSeries& a, const TimeSeries& b);
/// Throws InvalidSeriesError unless both series share start, step, and length.
void require_aligned(const TimeSeries& a, const TimeSeries& b, const char* context);

/// Mean power over each sample period: out[k] = e[k] / hours(step).
TimeSeries energy_to_mean_power(const TimeSeries& energy_kwh);

/// Dimensionless power: out[k] = y[k] / p_n. Values above 1 are legal.
TimeSeries scale_by_peak(const TimeSeries& power_kw, double p_n_kw);

/// Exact inverse of scale_by_peak.
TimeSeries rescale_by_peak(const TimeSeries& scaled, double p_n_new_kw);

}  // namespace autopv
