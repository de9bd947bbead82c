#pragma once

#include <memory>
#include <string>

#include "autopv/cash.hpp"
#include "autopv/features.hpp"
#include "autopv/plant.hpp"

namespace autopv {

/// Everything needed to forecast one plant from weather alone. Immutable
/// after training so pools can be shared across threads.
struct TrainedPlantModel {
    std::string plant_id;
    double p_n_kw = 0.0;
    std::shared_ptr<const Estimator> estimator;
    ColumnStats feature_stats{};  // stats of the daytime training rows

    nlohmann::json to_json() const;
    static TrainedPlantModel from_json(const nlohmann::json& j);
};

/// Daytime-only training rows with peak-scaled targets.
struct TrainingSet {
    Matrix x;
    std::vector<double> y;
};

/// Drops night rows and scales the measured power by the nominal rating.
TrainingSet make_training_set(const PlantRecord& rec);

struct PlantTrainingResult {
    TrainedPlantModel model;
    SearchState search;
};

/// Full training path for one plant: scale, featurize, drop nights, split
/// chronologically, search. Requires at least 60 days of aligned data.
PlantTrainingResult train_plant_model(const PlantRecord& rec, std::uint64_t seed,
                                      const CashOptions& options = {});

/// Dimensionless forecast: max(0, estimator output) where the irradiance
/// forecast is positive, exactly 0 everywhere else.
TimeSeries predict_scaled(const TrainedPlantModel& model, const TimeSeries& g_hat, const TimeSeries& t_hat);

using ModelPool = std::vector<std::shared_ptr<const TrainedPlantModel>>;

nlohmann::json pool_to_json(const ModelPool& pool);
ModelPool pool_from_json(const nlohmann::json& j);

}  // namespace autopv
