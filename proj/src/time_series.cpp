#include "autopv/time_series.hpp"

#include <cstdio>

#include "autopv/errors.hpp"

namespace autopv {

namespace {

// Civil <-> day-count conversions from Howard Hinnant's public-domain
// chrono algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u + static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yr + (m <= 2));
}

}  // namespace

Timestamp to_timestamp(const CivilDateTime& c) {
    return days_from_civil(c.year, c.month, c.day) * kDay + c.hour * 3600 + c.minute * 60 + c.second;
}

CivilDateTime to_civil(Timestamp t) {
    std::int64_t days = t / kDay;
    std::int64_t rem = t % kDay;
    if (rem < 0) {
        rem += kDay;
        days -= 1;
    }
    CivilDateTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem % 3600) / 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

Timestamp parse_iso8601(const std::string& text) {
    CivilDateTime c;
    char tail[8] = {0};
    int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%3s", &c.year, &c.month, &c.day, &c.hour, &c.minute,
                        &c.second, tail);
    if (n < 5) {
        throw InvalidSeriesError("unparseable ISO-8601 timestamp '" + text + "'");
    }
    if (n == 5) c.second = 0;
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 || c.minute > 59 || c.second > 59 ||
        c.hour < 0 || c.minute < 0 || c.second < 0) {
        throw InvalidSeriesError("out-of-range timestamp fields in '" + text + "'");
    }
    if (tail[0] != '\0' && !(tail[0] == 'Z' && tail[1] == '\0')) {
        throw InvalidSeriesError("unsupported timezone suffix in '" + text + "' (UTC only)");
    }
    return to_timestamp(c);
}

std::string format_iso8601(Timestamp t) {
    const CivilDateTime c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour, c.minute,
                  c.second);
    return buf;
}

int day_of_year(Timestamp t) {
    const CivilDateTime c = to_civil(t);
    return static_cast<int>(days_from_civil(c.year, c.month, c.day) - days_from_civil(c.year, 1, 1)) + 1;
}

CalendarFields calendar_fields(Timestamp t) {
    const CivilDateTime c = to_civil(t);
    return {c.month, c.hour * 60 + c.minute};
}

TimeSeries::TimeSeries(Timestamp start, Duration step, std::vector<double> values)
    : start_(start), step_(step), values_(std::move(values)) {
    if (step_ <= 0) {
        throw InvalidSeriesError("step must be positive, got " + std::to_string(step_));
    }
}

TimeSeries TimeSeries::slice_time(Timestamp t0, Timestamp t1) const {
    if ((t0 - start_) % step_ != 0 || (t1 - start_) % step_ != 0) {
        throw InvalidSeriesError("slice bounds are off the sampling grid");
    }
    if (t0 < start_ || t1 > end_time() || t1 < t0) {
        throw InvalidSeriesError("slice bounds outside series range");
    }
    const std::size_t first = static_cast<std::size_t>((t0 - start_) / step_);
    const std::size_t count = static_cast<std::size_t>((t1 - t0) / step_);
    return slice_index(first, count);
}

TimeSeries TimeSeries::slice_index(std::size_t first, std::size_t count) const {
    if (first + count > size()) {
        throw InvalidSeriesError("slice outside series range");
    }
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first),
                          values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return TimeSeries(time_at(first), step_, std::move(v));
}

TimeSeries TimeSeries::tail(std::size_t n) const {
    if (n > size()) {
        throw InvalidSeriesError("tail longer than series");
    }
    return slice_index(size() - n, n);
}

bool aligned(const TimeSeries& a, const TimeSeries& b) {
    return a.start_time() == b.start_time() && a.step() == b.step() && a.size() == b.size();
}

void require_aligned(const TimeSeries& a, const TimeSeries& b, const char* context) {
    if (!aligned(a, b)) {
        throw InvalidSeriesError(std::string(context) + ": series differ in start, step, or length");
    }
}

TimeSeries energy_to_mean_power(const TimeSeries& energy_kwh) {
    const double hours = energy_kwh.step_hours();
    std::vector<double> out(energy_kwh.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = energy_kwh[k] / hours;
    }
    return TimeSeries(energy_kwh.start_time(), energy_kwh.step(), std::move(out));
}

TimeSeries scale_by_peak(const TimeSeries& power_kw, double p_n_kw) {
    if (p_n_kw <= 0.0) {
        throw InvalidPlantError("peak power rating must be positive, got " + std::to_string(p_n_kw));
    }
    std::vector<double> out(power_kw.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = power_kw[k] / p_n_kw;
    }
    return TimeSeries(power_kw.start_time(), power_kw.step(), std::move(out));
}

TimeSeries rescale_by_peak(const TimeSeries& scaled, double p_n_new_kw) {
    if (p_n_new_kw <= 0.0) {
        throw InvalidPlantError("peak power rating must be positive, got " + std::to_string(p_n_new_kw));
    }
    std::vector<double> out(scaled.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = scaled[k] * p_n_new_kw;
    }
    return TimeSeries(scaled.start_time(), scaled.step(), std::move(out));
}

}  // namespace autopv
