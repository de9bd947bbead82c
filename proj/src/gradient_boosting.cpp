#include "autopv/gradient_boosting.hpp"

#include "autopv/errors.hpp"
#include "autopv/features.hpp"

namespace autopv {

std::unique_ptr<GradientBoostingRegressor> GradientBoostingRegressor::fit(const EstimatorSpec& spec,
                                                                          const Matrix& X,
                                                                          std::span<const double> y) {
    auto model = std::make_unique<GradientBoostingRegressor>();
    model->spec_ = spec;

    const std::size_t n = X.rows;
    double mean = 0.0;
    for (const double v : y) mean += v;
    mean /= static_cast<double>(n);
    model->base_score_ = mean;

    // residual of the current ensemble; its mean square is the training loss
    std::vector<double> residual(n);
    for (std::size_t r = 0; r < n; ++r) residual[r] = y[r] - mean;

    const TreeFitContext ctx(X);
    TreeFitOptions opt;
    opt.max_depth = spec.max_depth;

    model->trees_.reserve(static_cast<std::size_t>(spec.n_estimators));
    model->stage_losses_.reserve(static_cast<std::size_t>(spec.n_estimators));
    for (int stage = 0; stage < spec.n_estimators; ++stage) {
        RegressionTree tree = fit_regression_tree(ctx, residual, opt);
        double sse = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            residual[r] -= spec.learning_rate * tree.predict_row(X.row(r));
            sse += residual[r] * residual[r];
        }
        model->trees_.push_back(std::move(tree));
        model->stage_losses_.push_back(sse / static_cast<double>(n));
    }

    model->info_.iterations = spec.n_estimators;
    model->info_.final_training_loss = model->stage_losses_.back();
    return model;
}

std::vector<double> GradientBoostingRegressor::predict(const Matrix& X) const {
    if (X.cols != FeatureMatrix::kColumns) {
        throw ShapeError("gradient boosting expects " + std::to_string(FeatureMatrix::kColumns) +
                         " columns, got " + std::to_string(X.cols));
    }
    std::vector<double> out(X.rows, base_score_);
    for (std::size_t r = 0; r < X.rows; ++r) {
        const auto row = X.row(r);
        double acc = 0.0;
        for (const RegressionTree& tree : trees_) acc += tree.predict_row(row);
        out[r] += spec_.learning_rate * acc;
    }
    return out;
}

nlohmann::json GradientBoostingRegressor::params_to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const RegressionTree& t : trees_) trees.push_back(t.to_json());
    return {
        {"base_score", base_score_},
        {"trees", std::move(trees)},
        {"stage_losses", stage_losses_},
    };
}

std::unique_ptr<GradientBoostingRegressor> GradientBoostingRegressor::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<GradientBoostingRegressor>();
    model->spec_ = EstimatorSpec::from_json(j.at("spec"));
    model->info_.iterations = j.at("info").at("iterations").get<int>();
    model->info_.final_training_loss = j.at("info").at("final_training_loss").get<double>();
    const auto& p = j.at("params");
    model->base_score_ = p.at("base_score").get<double>();
    for (const auto& t : p.at("trees")) model->trees_.push_back(RegressionTree::from_json(t));
    model->stage_losses_ = p.at("stage_losses").get<std::vector<double>>();
    return model;
}

}  // namespace autopv
