#pragma once

#include <array>
#include <optional>
#include <vector>

#include "autopv/matrix.hpp"
#include "autopv/time_series.hpp"

namespace autopv {

/// Sin-cos pair values for the month and minute-of-day cycles.
struct CyclicEncoding {
    double s12;
    double c12;
    double s1440;
    double c1440;
};

/// x_s12 = sin(2*pi*month/12), x_c12 = cos(2*pi*month/12), and likewise for
/// the minute of the day over a 1440-minute period.
CyclicEncoding encode_cyclic(int month, int minute_of_day);

/// Row-per-sample estimator inputs in the fixed column order
/// [G^2, G, G*T, T, T^2, s12, c12, s1440, c1440]. Persisted models depend on
/// this order. night_mask is true where G <= 0.
class FeatureMatrix {
public:
    static constexpr std::size_t kColumns = 9;

    FeatureMatrix() = default;
    FeatureMatrix(Matrix m, std::vector<bool> night_mask);

    const Matrix& matrix() const { return m_; }
    std::size_t rows() const { return m_.rows; }
    double at(std::size_t r, std::size_t c) const { return m_.at(r, c); }
    const std::vector<bool>& night_mask() const { return night_; }
    bool is_night(std::size_t r) const { return night_[r]; }

private:
    Matrix m_;
    std::vector<bool> night_;
};

FeatureMatrix build_features(const TimeSeries& g_hat, const TimeSeries& t_hat);

/// Per-column standardization statistics.
struct ColumnStats {
    std::array<double, FeatureMatrix::kColumns> mean{};
    std::array<double, FeatureMatrix::kColumns> std{};
};

/// Stats over all rows of a raw matrix; std clamped below at 1e-9.
ColumnStats compute_stats(const Matrix& m);
Matrix apply_stats(const Matrix& m, const ColumnStats& stats);

/// Standardizes every row. When stats are absent they are computed from the
/// daytime rows only; the stats in use are returned for reuse at prediction
/// time.
std::pair<FeatureMatrix, ColumnStats> standardize(const FeatureMatrix& fm,
                                                  const std::optional<ColumnStats>& stats = std::nullopt);

}  // namespace autopv
