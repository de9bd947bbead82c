#pragma once

#include <array>

#include "autopv/estimator.hpp"
#include "autopv/features.hpp"

namespace autopv {

/// Linear least squares with an L2 penalty on the coefficients. Inputs are
/// standardized internally; the intercept is the target mean and carries no
/// penalty.
class RidgeRegressor : public Estimator {
public:
    static std::unique_ptr<RidgeRegressor> fit(const EstimatorSpec& spec, const Matrix& X,
                                               std::span<const double> y);
    static std::unique_ptr<RidgeRegressor> from_json(const nlohmann::json& j);

    const EstimatorSpec& spec() const override { return spec_; }
    const TrainingInfo& info() const override { return info_; }
    std::vector<double> predict(const Matrix& X) const override;
    nlohmann::json params_to_json() const override;

    /// Coefficients in standardized feature space.
    std::span<const double> coefficients() const { return coef_; }
    double intercept() const { return intercept_; }
    const ColumnStats& feature_stats() const { return stats_; }

private:
    EstimatorSpec spec_;
    TrainingInfo info_;
    ColumnStats stats_{};
    std::array<double, FeatureMatrix::kColumns> coef_{};
    double intercept_ = 0.0;
};

}  // namespace autopv
