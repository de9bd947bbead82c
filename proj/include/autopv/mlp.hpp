#pragma once

#include "autopv/estimator.hpp"
#include "autopv/features.hpp"

namespace autopv {

/// Fully connected feed-forward net trained with Adam on mini-batch squared
/// error. The chronological tail of the provided rows is held out for early
/// stopping and the weights with the best held-out loss are restored after
/// training. Inputs are standardized internally.
class MlpRegressor : public Estimator {
public:
    static std::unique_ptr<MlpRegressor> fit(const EstimatorSpec& spec, const Matrix& X,
                                             std::span<const double> y);
    static std::unique_ptr<MlpRegressor> from_json(const nlohmann::json& j);

    const EstimatorSpec& spec() const override { return spec_; }
    const TrainingInfo& info() const override { return info_; }
    std::vector<double> predict(const Matrix& X) const override;
    nlohmann::json params_to_json() const override;

    /// Weights and biases flattened layer by layer (weights row-major, then
    /// biases); the layout matches loss_gradient.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> theta);

    /// Mean squared error over the given raw (unstandardized) rows.
    double loss(const Matrix& X, std::span<const double> y) const;
    /// Gradient of loss with respect to parameters(), same layout.
    std::vector<double> loss_gradient(const Matrix& X, std::span<const double> y) const;

private:
    struct Layer {
        Matrix w;                // rows = outputs, cols = inputs
        std::vector<double> b;   // one per output
    };

    friend struct MlpTrainer;

    EstimatorSpec spec_;
    TrainingInfo info_;
    ColumnStats stats_{};
    std::vector<Layer> layers_;
};

}  // namespace autopv
