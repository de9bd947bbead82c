#include "autopv/features.hpp"

#include <cmath>

#include "autopv/errors.hpp"

namespace autopv {

namespace {
constexpr double kTwoPi = 6.283185307179586;
constexpr double kMinStd = 1e-9;
}  // namespace

CyclicEncoding encode_cyclic(int month, int minute_of_day) {
    if (month < 1 || month > 12) {
        throw FeatureDomainError("month outside 1..12: " + std::to_string(month));
    }
    if (minute_of_day < 0 || minute_of_day > 1439) {
        throw FeatureDomainError("minute_of_day outside 0..1439: " + std::to_string(minute_of_day));
    }
    const double am = kTwoPi * month / 12.0;
    const double ad = kTwoPi * minute_of_day / 1440.0;
    return {std::sin(am), std::cos(am), std::sin(ad), std::cos(ad)};
}

FeatureMatrix::FeatureMatrix(Matrix m, std::vector<bool> night_mask) : m_(std::move(m)), night_(std::move(night_mask)) {
    if (m_.cols != kColumns) {
        throw ShapeError("feature matrix must have exactly 9 columns, got " + std::to_string(m_.cols));
    }
    if (night_.size() != m_.rows) {
        throw ShapeError("night mask length does not match row count");
    }
}

FeatureMatrix build_features(const TimeSeries& g_hat, const TimeSeries& t_hat) {
    require_aligned(g_hat, t_hat, "build_features");
    const std::size_t n = g_hat.size();
    Matrix m(n, FeatureMatrix::kColumns);
    std::vector<bool> night(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double g = g_hat[k];
        const double t = t_hat[k];
        const CalendarFields cal = calendar_fields(g_hat.time_at(k));
        const CyclicEncoding cyc = encode_cyclic(cal.month, cal.minute_of_day);
        double* row = m.data.data() + k * FeatureMatrix::kColumns;
        row[0] = g * g;
        row[1] = g;
        row[2] = g * t;
        row[3] = t;
        row[4] = t * t;
        row[5] = cyc.s12;
        row[6] = cyc.c12;
        row[7] = cyc.s1440;
        row[8] = cyc.c1440;
        night[k] = (g <= 0.0);
    }
    return FeatureMatrix(std::move(m), std::move(night));
}

ColumnStats compute_stats(const Matrix& m) {
    ColumnStats s;
    const std::size_t n = m.rows;
    for (std::size_t c = 0; c < FeatureMatrix::kColumns; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += m.at(r, c);
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = m.at(r, c) - mean;
            ss += d * d;
        }
        s.mean[c] = mean;
        // a column that is constant over the training window (e.g. the month
        // encodings of a single-month window) carries no signal; unit scale
        // keeps its standardized values bounded on off-window inputs instead
        // of amplifying them by 1/ulp
        const double sd = std::sqrt(ss / static_cast<double>(n));
        s.std[c] = sd > kMinStd * std::max(1.0, std::abs(mean)) ? sd : 1.0;
    }
    return s;
}

Matrix apply_stats(const Matrix& m, const ColumnStats& stats) {
    Matrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            out.at(r, c) = (m.at(r, c) - stats.mean[c]) / stats.std[c];
        }
    }
    return out;
}

std::pair<FeatureMatrix, ColumnStats> standardize(const FeatureMatrix& fm, const std::optional<ColumnStats>& stats) {
    ColumnStats used;
    if (stats) {
        used = *stats;
    } else {
        std::vector<std::size_t> day_rows;
        for (std::size_t r = 0; r < fm.rows(); ++r) {
            if (!fm.is_night(r)) day_rows.push_back(r);
        }
        if (day_rows.empty()) {
            throw DegenerateDataError("no daytime rows to compute standardization stats from");
        }
        used = compute_stats(fm.matrix().select_rows(day_rows));
    }
    return {FeatureMatrix(apply_stats(fm.matrix(), used), fm.night_mask()), used};
}

}  // namespace autopv
