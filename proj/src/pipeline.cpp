#include "autopv/pipeline.hpp"

#include <algorithm>

#include "autopv/errors.hpp"

namespace autopv {

TrainingSet make_training_set(const PlantRecord& rec) {
    rec.validate();
    const TimeSeries target = scale_by_peak(rec.power_kw, rec.p_n_kw);
    const FeatureMatrix fm = build_features(rec.weather.g_hat_wm2, rec.weather.t_hat_c);

    std::vector<std::size_t> day_rows;
    day_rows.reserve(fm.rows());
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        if (!fm.is_night(r)) day_rows.push_back(r);
    }

    TrainingSet set;
    set.x = fm.matrix().select_rows(day_rows);
    set.y.reserve(day_rows.size());
    for (const std::size_t r : day_rows) set.y.push_back(target.values()[r]);
    return set;
}

PlantTrainingResult train_plant_model(const PlantRecord& rec, std::uint64_t seed,
                                      const CashOptions& options) {
    rec.validate();
    const Timestamp span = rec.power_kw.end_time() - rec.power_kw.start_time();
    if (span < 60 * kDay) {
        throw InsufficientDataError("plant '" + rec.id + "' has " +
                                    std::to_string(span / kDay) + " days of data, need 60");
    }

    const TrainingSet set = make_training_set(rec);
    if (set.x.rows < 25) {
        throw InsufficientDataError("plant '" + rec.id + "' has only " + std::to_string(set.x.rows) +
                                    " daytime rows");
    }

    const auto [train_idx, val_idx] = chronological_split(set.x.rows);
    const Matrix x_train = set.x.select_rows(train_idx);
    const Matrix x_val = set.x.select_rows(val_idx);
    std::vector<double> y_train;
    y_train.reserve(train_idx.size());
    for (const std::size_t i : train_idx) y_train.push_back(set.y[i]);
    std::vector<double> y_val;
    y_val.reserve(val_idx.size());
    for (const std::size_t i : val_idx) y_val.push_back(set.y[i]);

    CashResult cash = run_cash(x_train, y_train, x_val, y_val, seed, options);

    PlantTrainingResult result;
    result.model.plant_id = rec.id;
    result.model.p_n_kw = rec.p_n_kw;
    result.model.estimator = std::shared_ptr<const Estimator>(std::move(cash.estimator));
    result.model.feature_stats = compute_stats(x_train);
    result.search = std::move(cash.state);
    return result;
}

TimeSeries predict_scaled(const TrainedPlantModel& model, const TimeSeries& g_hat,
                          const TimeSeries& t_hat) {
    if (!model.estimator) throw InvalidPlantError("model '" + model.plant_id + "' has no estimator");
    require_aligned(g_hat, t_hat, "weather forecast");
    const FeatureMatrix fm = build_features(g_hat, t_hat);
    const std::vector<double> raw = model.estimator->predict(fm.matrix());
    std::vector<double> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        out[k] = fm.is_night(k) ? 0.0 : std::max(0.0, raw[k]);
    }
    return TimeSeries(g_hat.start_time(), g_hat.step(), std::move(out));
}

nlohmann::json TrainedPlantModel::to_json() const {
    if (!estimator) throw InvalidPlantError("model '" + plant_id + "' has no estimator");
    return {
        {"format_version", 1},
        {"plant_id", plant_id},
        {"p_n_kw", p_n_kw},
        {"feature_stats", {{"mean", feature_stats.mean}, {"std", feature_stats.std}}},
        {"estimator", estimator_to_json(*estimator)},
    };
}

TrainedPlantModel TrainedPlantModel::from_json(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != 1) throw IoError("unsupported model format_version " + std::to_string(version));
    TrainedPlantModel model;
    model.plant_id = j.at("plant_id").get<std::string>();
    model.p_n_kw = j.at("p_n_kw").get<double>();
    for (std::size_t c = 0; c < FeatureMatrix::kColumns; ++c) {
        model.feature_stats.mean[c] = j.at("feature_stats").at("mean").at(c).get<double>();
        model.feature_stats.std[c] = j.at("feature_stats").at("std").at(c).get<double>();
    }
    model.estimator = std::shared_ptr<const Estimator>(estimator_from_json(j.at("estimator")));
    return model;
}

nlohmann::json pool_to_json(const ModelPool& pool) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : pool) {
        if (!m) throw InvalidPoolError("pool contains a null model");
        models.push_back(m->to_json());
    }
    return {{"format_version", 1}, {"models", std::move(models)}};
}

ModelPool pool_from_json(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != 1) throw IoError("unsupported pool format_version " + std::to_string(version));
    ModelPool pool;
    for (const auto& e : j.at("models")) {
        pool.push_back(std::make_shared<const TrainedPlantModel>(TrainedPlantModel::from_json(e)));
    }
    return pool;
}

}  // namespace autopv
