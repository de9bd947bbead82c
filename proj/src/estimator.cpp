#include "autopv/estimator.hpp"

#include <cmath>
#include <cstdio>

#include "autopv/errors.hpp"
#include "autopv/features.hpp"
#include "autopv/gradient_boosting.hpp"
#include "autopv/mlp.hpp"
#include "autopv/random_forest.hpp"
#include "autopv/ridge.hpp"

namespace autopv {

namespace {
constexpr int kFormatVersion = 1;
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Ridge: return "ridge";
        case EstimatorKind::Mlp: return "mlp";
        case EstimatorKind::GradientBoosting: return "gradient_boosting";
        case EstimatorKind::RandomForest: return "random_forest";
    }
    throw ConfigError("unknown estimator kind");
}

EstimatorKind estimator_kind_from_string(const std::string& s) {
    if (s == "ridge") return EstimatorKind::Ridge;
    if (s == "mlp") return EstimatorKind::Mlp;
    if (s == "gradient_boosting") return EstimatorKind::GradientBoosting;
    if (s == "random_forest") return EstimatorKind::RandomForest;
    throw ConfigError("unknown estimator kind '" + s + "'");
}

std::string to_string(MlpActivation a) {
    switch (a) {
        case MlpActivation::Logistic: return "logistic";
        case MlpActivation::Tanh: return "tanh";
        case MlpActivation::Relu: return "relu";
    }
    throw ConfigError("unknown activation");
}

MlpActivation mlp_activation_from_string(const std::string& s) {
    if (s == "logistic") return MlpActivation::Logistic;
    if (s == "tanh") return MlpActivation::Tanh;
    if (s == "relu") return MlpActivation::Relu;
    throw ConfigError("unknown activation '" + s + "'");
}

void EstimatorSpec::validate() const {
    switch (kind) {
        case EstimatorKind::Ridge:
            if (!(alpha >= 0.05 && alpha <= 1.0)) {
                throw ConfigError("ridge alpha " + std::to_string(alpha) + " outside [0.05, 1]");
            }
            break;
        case EstimatorKind::Mlp:
            if (hidden_layer_sizes.empty() || hidden_layer_sizes.size() > 3) {
                throw ConfigError("net needs 1 to 3 hidden layers, got " +
                                  std::to_string(hidden_layer_sizes.size()));
            }
            for (const int h : hidden_layer_sizes) {
                if (h < 10 || h > 100) {
                    throw ConfigError("hidden layer width " + std::to_string(h) + " outside [10, 100]");
                }
            }
            break;
        case EstimatorKind::GradientBoosting:
            if (!(learning_rate >= 0.01 && learning_rate <= 1.0)) {
                throw ConfigError("learning_rate " + std::to_string(learning_rate) + " outside [0.01, 1]");
            }
            [[fallthrough]];
        case EstimatorKind::RandomForest:
            if (n_estimators < 10 || n_estimators > 300) {
                throw ConfigError("n_estimators " + std::to_string(n_estimators) + " outside [10, 300]");
            }
            if (max_depth < 1 || max_depth > 10) {
                throw ConfigError("max_depth " + std::to_string(max_depth) + " outside [1, 10]");
            }
            break;
    }
}

std::string EstimatorSpec::describe() const {
    char buf[160];
    switch (kind) {
        case EstimatorKind::Ridge:
            std::snprintf(buf, sizeof buf, "ridge(alpha=%.4g)", alpha);
            break;
        case EstimatorKind::Mlp: {
            std::string sizes;
            for (const int h : hidden_layer_sizes) {
                if (!sizes.empty()) sizes += 'x';
                sizes += std::to_string(h);
            }
            std::snprintf(buf, sizeof buf, "mlp(%s, %s)", sizes.c_str(), to_string(activation).c_str());
            break;
        }
        case EstimatorKind::GradientBoosting:
            std::snprintf(buf, sizeof buf, "gradient_boosting(lr=%.4g, trees=%d, depth=%d)", learning_rate,
                          n_estimators, max_depth);
            break;
        case EstimatorKind::RandomForest:
            std::snprintf(buf, sizeof buf, "random_forest(trees=%d, depth=%d)", n_estimators, max_depth);
            break;
    }
    return buf;
}

nlohmann::json EstimatorSpec::to_json() const {
    nlohmann::json j{{"kind", autopv::to_string(kind)}, {"seed", seed}};
    switch (kind) {
        case EstimatorKind::Ridge:
            j["alpha"] = alpha;
            break;
        case EstimatorKind::Mlp:
            j["activation"] = autopv::to_string(activation);
            j["hidden_layer_sizes"] = hidden_layer_sizes;
            break;
        case EstimatorKind::GradientBoosting:
            j["learning_rate"] = learning_rate;
            j["n_estimators"] = n_estimators;
            j["max_depth"] = max_depth;
            break;
        case EstimatorKind::RandomForest:
            j["n_estimators"] = n_estimators;
            j["max_depth"] = max_depth;
            j["rf_bootstrap"] = rf_bootstrap;
            j["rf_features_per_split"] = rf_features_per_split;
            break;
    }
    return j;
}

EstimatorSpec EstimatorSpec::from_json(const nlohmann::json& j) {
    EstimatorSpec spec;
    spec.kind = estimator_kind_from_string(j.at("kind").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    switch (spec.kind) {
        case EstimatorKind::Ridge:
            spec.alpha = j.at("alpha").get<double>();
            break;
        case EstimatorKind::Mlp:
            spec.activation = mlp_activation_from_string(j.at("activation").get<std::string>());
            spec.hidden_layer_sizes = j.at("hidden_layer_sizes").get<std::vector<int>>();
            break;
        case EstimatorKind::GradientBoosting:
            spec.learning_rate = j.at("learning_rate").get<double>();
            spec.n_estimators = j.at("n_estimators").get<int>();
            spec.max_depth = j.at("max_depth").get<int>();
            break;
        case EstimatorKind::RandomForest:
            spec.n_estimators = j.at("n_estimators").get<int>();
            spec.max_depth = j.at("max_depth").get<int>();
            spec.rf_bootstrap = j.value("rf_bootstrap", true);
            spec.rf_features_per_split = j.value("rf_features_per_split", 3);
            break;
    }
    return spec;
}

namespace detail {

void check_training_inputs(const Matrix& X, std::span<const double> y) {
    if (X.cols != FeatureMatrix::kColumns) {
        throw ShapeError("training matrix has " + std::to_string(X.cols) + " columns, expected " +
                         std::to_string(FeatureMatrix::kColumns));
    }
    if (X.rows != y.size()) {
        throw ShapeError("target length " + std::to_string(y.size()) + " does not match " +
                         std::to_string(X.rows) + " rows");
    }
    if (X.rows < 20) {
        throw InsufficientDataError("training needs at least 20 rows, got " + std::to_string(X.rows));
    }
    for (const double v : X.data) {
        if (!std::isfinite(v)) throw InvalidDataError("training matrix contains a non-finite value");
    }
    for (const double v : y) {
        if (!std::isfinite(v)) throw InvalidDataError("training target contains a non-finite value");
    }
}

}  // namespace detail

namespace {

// Structural bounds only: the fit itself accepts configurations outside the
// search ranges (e.g. a one-tree ensemble), validate() guards the sampler.
void check_fitable(const EstimatorSpec& spec) {
    switch (spec.kind) {
        case EstimatorKind::Ridge:
            if (!(spec.alpha > 0.0)) throw ConfigError("ridge alpha must be positive");
            break;
        case EstimatorKind::Mlp:
            if (spec.hidden_layer_sizes.empty()) throw ConfigError("net needs at least one hidden layer");
            for (const int h : spec.hidden_layer_sizes) {
                if (h < 1) throw ConfigError("hidden layer width must be positive");
            }
            break;
        case EstimatorKind::GradientBoosting:
            if (!(spec.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
            [[fallthrough]];
        case EstimatorKind::RandomForest:
            if (spec.n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
            if (spec.max_depth < 1) throw ConfigError("max_depth must be at least 1");
            if (spec.rf_features_per_split < 1) throw ConfigError("features per split must be at least 1");
            break;
    }
}

}  // namespace

std::unique_ptr<Estimator> fit_estimator(const EstimatorSpec& spec, const Matrix& X,
                                         std::span<const double> y) {
    detail::check_training_inputs(X, y);
    check_fitable(spec);
    switch (spec.kind) {
        case EstimatorKind::Ridge: return RidgeRegressor::fit(spec, X, y);
        case EstimatorKind::Mlp: return MlpRegressor::fit(spec, X, y);
        case EstimatorKind::GradientBoosting: return GradientBoostingRegressor::fit(spec, X, y);
        case EstimatorKind::RandomForest: return RandomForestRegressor::fit(spec, X, y);
    }
    throw ConfigError("unknown estimator kind");
}

nlohmann::json estimator_to_json(const Estimator& est) {
    return {
        {"format_version", kFormatVersion},
        {"spec", est.spec().to_json()},
        {"info",
         {{"iterations", est.info().iterations}, {"final_training_loss", est.info().final_training_loss}}},
        {"params", est.params_to_json()},
    };
}

std::unique_ptr<Estimator> estimator_from_json(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
        throw IoError("unsupported estimator format_version " + std::to_string(version));
    }
    const auto kind = estimator_kind_from_string(j.at("spec").at("kind").get<std::string>());
    switch (kind) {
        case EstimatorKind::Ridge: return RidgeRegressor::from_json(j);
        case EstimatorKind::Mlp: return MlpRegressor::from_json(j);
        case EstimatorKind::GradientBoosting: return GradientBoostingRegressor::from_json(j);
        case EstimatorKind::RandomForest: return RandomForestRegressor::from_json(j);
    }
    throw IoError("unknown estimator kind in serialized model");
}

}  // namespace autopv
