#pragma once

#include "autopv/estimator.hpp"
#include "autopv/regression_tree.hpp"

namespace autopv {

/// Squared-error boosting: a constant base score plus shrunken regression
/// trees fitted to the running residual.
class GradientBoostingRegressor : public Estimator {
public:
    static std::unique_ptr<GradientBoostingRegressor> fit(const EstimatorSpec& spec, const Matrix& X,
                                                          std::span<const double> y);
    static std::unique_ptr<GradientBoostingRegressor> from_json(const nlohmann::json& j);

    const EstimatorSpec& spec() const override { return spec_; }
    const TrainingInfo& info() const override { return info_; }
    std::vector<double> predict(const Matrix& X) const override;
    nlohmann::json params_to_json() const override;

    double base_score() const { return base_score_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    /// Training MSE after each stage.
    std::span<const double> stage_losses() const { return stage_losses_; }

private:
    EstimatorSpec spec_;
    TrainingInfo info_;
    double base_score_ = 0.0;
    std::vector<RegressionTree> trees_;
    std::vector<double> stage_losses_;
};

}  // namespace autopv
