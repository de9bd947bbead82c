#include "autopv/ridge.hpp"

#include <Eigen/Dense>

#include "autopv/errors.hpp"

namespace autopv {

namespace {
constexpr std::size_t kCols = FeatureMatrix::kColumns;
}

std::unique_ptr<RidgeRegressor> RidgeRegressor::fit(const EstimatorSpec& spec, const Matrix& X,
                                                    std::span<const double> y) {
    auto model = std::make_unique<RidgeRegressor>();
    model->spec_ = spec;
    model->stats_ = compute_stats(X);
    const Matrix Z = apply_stats(X, model->stats_);

    const std::size_t n = X.rows;
    double y_mean = 0.0;
    for (const double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);

    Eigen::Matrix<double, kCols, kCols> gram = Eigen::Matrix<double, kCols, kCols>::Zero();
    Eigen::Matrix<double, kCols, 1> rhs = Eigen::Matrix<double, kCols, 1>::Zero();
    for (std::size_t r = 0; r < n; ++r) {
        Eigen::Map<const Eigen::Matrix<double, kCols, 1>> z(Z.row(r).data());
        gram.noalias() += z * z.transpose();
        rhs.noalias() += z * (y[r] - y_mean);
    }
    gram.diagonal().array() += spec.alpha;

    const Eigen::Matrix<double, kCols, 1> beta = gram.ldlt().solve(rhs);
    for (std::size_t c = 0; c < kCols; ++c) model->coef_[c] = beta(static_cast<Eigen::Index>(c));
    model->intercept_ = y_mean;

    double sse = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double pred = model->intercept_;
        const auto row = Z.row(r);
        for (std::size_t c = 0; c < kCols; ++c) pred += model->coef_[c] * row[c];
        const double e = pred - y[r];
        sse += e * e;
    }
    model->info_.iterations = 1;
    model->info_.final_training_loss = sse / static_cast<double>(n);
    return model;
}

std::vector<double> RidgeRegressor::predict(const Matrix& X) const {
    if (X.cols != kCols) {
        throw ShapeError("ridge expects " + std::to_string(kCols) + " columns, got " + std::to_string(X.cols));
    }
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
        double pred = intercept_;
        const auto row = X.row(r);
        for (std::size_t c = 0; c < kCols; ++c) {
            pred += coef_[c] * (row[c] - stats_.mean[c]) / stats_.std[c];
        }
        out[r] = pred;
    }
    return out;
}

nlohmann::json RidgeRegressor::params_to_json() const {
    return {
        {"mean", stats_.mean},
        {"std", stats_.std},
        {"coef", coef_},
        {"intercept", intercept_},
    };
}

std::unique_ptr<RidgeRegressor> RidgeRegressor::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<RidgeRegressor>();
    model->spec_ = EstimatorSpec::from_json(j.at("spec"));
    model->info_.iterations = j.at("info").at("iterations").get<int>();
    model->info_.final_training_loss = j.at("info").at("final_training_loss").get<double>();
    const auto& p = j.at("params");
    for (std::size_t c = 0; c < kCols; ++c) {
        model->stats_.mean[c] = p.at("mean").at(c).get<double>();
        model->stats_.std[c] = p.at("std").at(c).get<double>();
        model->coef_[c] = p.at("coef").at(c).get<double>();
    }
    model->intercept_ = p.at("intercept").get<double>();
    return model;
}

}  // namespace autopv
