#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "autopv/matrix.hpp"

namespace autopv {

enum class EstimatorKind { Ridge, Mlp, GradientBoosting, RandomForest };
enum class MlpActivation { Logistic, Tanh, Relu };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& s);
std::string to_string(MlpActivation a);
MlpActivation mlp_activation_from_string(const std::string& s);

/// A point in the estimator configuration space: family plus its
/// hyperparameters. validate() enforces the sampled ranges
/// (ridge alpha in [0.05, 1]; 1-3 hidden layers each in [10, 100];
/// learning_rate in [0.01, 1]; n_estimators in [10, 300]; max_depth in
/// [1, 10]).
struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Ridge;
    std::uint64_t seed = 0;

    // ridge
    double alpha = 0.1;

    // mlp
    MlpActivation activation = MlpActivation::Relu;
    std::vector<int> hidden_layer_sizes = {50};

    // tree ensembles
    double learning_rate = 0.1;  // gradient boosting only
    int n_estimators = 100;
    int max_depth = 3;

    // random forest internals, fixed rather than searched
    bool rf_bootstrap = true;
    int rf_features_per_split = 3;

    void validate() const;
    std::string describe() const;

    nlohmann::json to_json() const;
    static EstimatorSpec from_json(const nlohmann::json& j);
};

struct TrainingInfo {
    int iterations = 0;  // epochs or trees built
    double final_training_loss = 0.0;
};

/// A fitted estimator. Prediction is deterministic given the learned state;
/// all randomness happens at fit time.
class Estimator {
public:
    virtual ~Estimator() = default;
    virtual const EstimatorSpec& spec() const = 0;
    virtual const TrainingInfo& info() const = 0;

    /// One finite real per row; may be negative or exceed 1 (the pipeline
    /// applies the night/negativity rules, not the estimator).
    virtual std::vector<double> predict(const Matrix& X) const = 0;

    /// Kind-specific learned state.
    virtual nlohmann::json params_to_json() const = 0;
};

/// Fits the estimator family selected by the spec. Requires at least 20 rows
/// of finite data; the caller is responsible for dropping night rows first.
std::unique_ptr<Estimator> fit_estimator(const EstimatorSpec& spec, const Matrix& X, std::span<const double> y);

/// Versioned self-describing serialization; round-trips bit-exactly.
nlohmann::json estimator_to_json(const Estimator& est);
std::unique_ptr<Estimator> estimator_from_json(const nlohmann::json& j);

namespace detail {
/// Shared entry checks for fit_estimator implementations.
void check_training_inputs(const Matrix& X, std::span<const double> y);
}  // namespace detail

}  // namespace autopv
