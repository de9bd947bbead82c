#include "autopv/random_forest.hpp"

#include "autopv/errors.hpp"
#include "autopv/features.hpp"

namespace autopv {

std::unique_ptr<RandomForestRegressor> RandomForestRegressor::fit(const EstimatorSpec& spec, const Matrix& X,
                                                                  std::span<const double> y) {
    auto model = std::make_unique<RandomForestRegressor>();
    model->spec_ = spec;

    const std::size_t n = X.rows;
    const TreeFitContext ctx(X);
    std::vector<std::int32_t> counts(n);

    model->trees_.reserve(static_cast<std::size_t>(spec.n_estimators));
    for (int t = 0; t < spec.n_estimators; ++t) {
        Rng rng(derive_seed(spec.seed, "forest-tree", static_cast<std::uint64_t>(t)));
        TreeFitOptions opt;
        opt.max_depth = spec.max_depth;
        opt.features_per_split = spec.rf_features_per_split;
        opt.rng = &rng;
        if (spec.rf_bootstrap) {
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t d = 0; d < n; ++d) {
                const auto pick = static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
                ++counts[pick];
            }
            opt.row_weight = counts;
        }
        model->trees_.push_back(fit_regression_tree(ctx, y, opt));
    }

    double sse = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (const RegressionTree& tree : model->trees_) acc += tree.predict_row(X.row(r));
        const double e = acc / static_cast<double>(spec.n_estimators) - y[r];
        sse += e * e;
    }
    model->info_.iterations = spec.n_estimators;
    model->info_.final_training_loss = sse / static_cast<double>(n);
    return model;
}

std::vector<double> RandomForestRegressor::predict(const Matrix& X) const {
    if (X.cols != FeatureMatrix::kColumns) {
        throw ShapeError("random forest expects " + std::to_string(FeatureMatrix::kColumns) +
                         " columns, got " + std::to_string(X.cols));
    }
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
        const auto row = X.row(r);
        double acc = 0.0;
        for (const RegressionTree& tree : trees_) acc += tree.predict_row(row);
        out[r] = acc / static_cast<double>(trees_.size());
    }
    return out;
}

nlohmann::json RandomForestRegressor::params_to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const RegressionTree& t : trees_) trees.push_back(t.to_json());
    return {{"trees", std::move(trees)}};
}

std::unique_ptr<RandomForestRegressor> RandomForestRegressor::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<RandomForestRegressor>();
    model->spec_ = EstimatorSpec::from_json(j.at("spec"));
    model->info_.iterations = j.at("info").at("iterations").get<int>();
    model->info_.final_training_loss = j.at("info").at("final_training_loss").get<double>();
    for (const auto& t : j.at("params").at("trees")) model->trees_.push_back(RegressionTree::from_json(t));
    return model;
}

}  // namespace autopv
