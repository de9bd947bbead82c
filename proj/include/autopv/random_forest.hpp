#pragma once

#include "autopv/estimator.hpp"
#include "autopv/regression_tree.hpp"

namespace autopv {

/// Mean of trees grown on bootstrap resamples with per-split feature
/// subsampling. Each tree draws from its own seed derived from the spec seed
/// and the tree index, so fits are reproducible regardless of build order.
class RandomForestRegressor : public Estimator {
public:
    static std::unique_ptr<RandomForestRegressor> fit(const EstimatorSpec& spec, const Matrix& X,
                                                      std::span<const double> y);
    static std::unique_ptr<RandomForestRegressor> from_json(const nlohmann::json& j);

    const EstimatorSpec& spec() const override { return spec_; }
    const TrainingInfo& info() const override { return info_; }
    std::vector<double> predict(const Matrix& X) const override;
    nlohmann::json params_to_json() const override;

    const std::vector<RegressionTree>& trees() const { return trees_; }

private:
    EstimatorSpec spec_;
    TrainingInfo info_;
    std::vector<RegressionTree> trees_;
};

}  // namespace autopv
