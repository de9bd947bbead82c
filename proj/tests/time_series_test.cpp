#include <doctest.h>

#include "autopv/errors.hpp"
#include "autopv/time_series.hpp"

using namespace autopv;

TEST_CASE("iso8601 parse and format round-trip") {
    const Timestamp t = parse_iso8601("2020-06-15T12:30:00Z");
    CHECK(format_iso8601(t) == "2020-06-15T12:30:00Z");
    CHECK(parse_iso8601("2020-06-15T12:30:00") == t);  // Z optional
    CHECK(parse_iso8601("2020-06-15T12:30") == t);     // seconds optional
    CHECK(to_timestamp({2020, 1, 1, 0, 0, 0}) == 1577836800);
    CHECK(to_timestamp({1970, 1, 1, 0, 0, 0}) == 0);
}

TEST_CASE("iso8601 rejects malformed input") {
    CHECK_THROWS_AS(parse_iso8601("yesterday"), InvalidSeriesError);
    CHECK_THROWS_AS(parse_iso8601("2020-13-01T00:00:00Z"), InvalidSeriesError);
    CHECK_THROWS_AS(parse_iso8601("2020-06-15T12:30:00+02"), InvalidSeriesError);
}

TEST_CASE("civil conversions invert each other across year boundaries") {
    for (const char* text : {"1999-12-31T23:59:59Z", "2000-02-29T00:00:00Z", "2020-02-29T12:00:00Z",
                             "2038-01-19T03:14:07Z"}) {
        const Timestamp t = parse_iso8601(text);
        const CivilDateTime c = to_civil(t);
        CHECK(to_timestamp(c) == t);
        CHECK(format_iso8601(t) == text);
    }
}

TEST_CASE("day_of_year handles leap years") {
    CHECK(day_of_year(parse_iso8601("2020-01-01T00:00:00Z")) == 1);
    CHECK(day_of_year(parse_iso8601("2020-12-31T23:00:00Z")) == 366);
    CHECK(day_of_year(parse_iso8601("2019-12-31T00:00:00Z")) == 365);
    CHECK(day_of_year(parse_iso8601("2020-03-21T12:00:00Z")) == 81);
}

TEST_CASE("calendar_fields extracts month and minute of day") {
    const CalendarFields f = calendar_fields(parse_iso8601("2020-06-15T12:30:00Z"));
    CHECK(f.month == 6);
    CHECK(f.minute_of_day == 750);
    CHECK(calendar_fields(parse_iso8601("2020-06-15T00:00:00Z")).minute_of_day == 0);
}

TEST_CASE("time series slicing stays on the grid") {
    const Timestamp t0 = parse_iso8601("2020-01-01T00:00:00Z");
    std::vector<double> v(96 * 3);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k);
    const TimeSeries s(t0, kQuarterHour, v);

    CHECK(s.end_time() == t0 + 3 * kDay);
    CHECK(s.time_at(96) == t0 + kDay);

    const TimeSeries day2 = s.slice_time(t0 + kDay, t0 + 2 * kDay);
    CHECK(day2.size() == 96);
    CHECK(day2[0] == 96.0);
    CHECK(day2.start_time() == t0 + kDay);

    CHECK_THROWS_AS(s.slice_time(t0 + 17, t0 + kDay), InvalidSeriesError);        // off grid
    CHECK_THROWS_AS(s.slice_time(t0 - kDay, t0), InvalidSeriesError);             // before start
    CHECK_THROWS_AS(s.slice_time(t0, t0 + 4 * kDay), InvalidSeriesError);         // past end
    CHECK_THROWS_AS(TimeSeries(t0, 0, {1.0}), InvalidSeriesError);                // bad step

    const TimeSeries last = s.tail(10);
    CHECK(last.size() == 10);
    CHECK(last[9] == v.back());
    CHECK_THROWS_AS(s.tail(v.size() + 1), InvalidSeriesError);
}

TEST_CASE("alignment checks compare start, step, and length") {
    const TimeSeries a(0, 900, std::vector<double>(4, 1.0));
    const TimeSeries b(0, 900, std::vector<double>(4, 2.0));
    const TimeSeries c(900, 900, std::vector<double>(4, 2.0));
    CHECK(aligned(a, b));
    CHECK_FALSE(aligned(a, c));
    CHECK_NOTHROW(require_aligned(a, b, "test"));
    CHECK_THROWS_AS(require_aligned(a, c, "test"), InvalidSeriesError);
}

TEST_CASE("energy to mean power divides by the step in hours") {
    // 1 kWh delivered within a quarter hour is a mean power of 4 kW
    const TimeSeries energy(0, kQuarterHour, {1.0, 0.5, 0.0});
    const TimeSeries power = energy_to_mean_power(energy);
    CHECK(power[0] == doctest::Approx(4.0));
    CHECK(power[1] == doctest::Approx(2.0));
    CHECK(power[2] == 0.0);
}

TEST_CASE("peak scaling and its inverse") {
    const TimeSeries power(0, 900, {0.0, 5.0, 10.0, 12.0});
    const TimeSeries scaled = scale_by_peak(power, 10.0);
    CHECK(scaled[1] == doctest::Approx(0.5));
    CHECK(scaled[3] == doctest::Approx(1.2));  // above nominal is legal
    const TimeSeries back = rescale_by_peak(scaled, 10.0);
    for (std::size_t k = 0; k < power.size(); ++k) {
        CHECK(back[k] == doctest::Approx(power[k]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(scale_by_peak(power, 0.0), InvalidPlantError);
    CHECK_THROWS_AS(rescale_by_peak(scaled, -1.0), InvalidPlantError);
}
