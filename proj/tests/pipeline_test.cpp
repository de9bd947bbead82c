#include "autopv/pipeline.hpp"

#include <cmath>
#include <vector>

#include "autopv/errors.hpp"
#include "autopv/synth.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace autopv;

namespace {

PlantRecord noiseless_plant(int days, std::uint64_t seed) {
    SyntheticPlantConfig cfg;
    cfg.id = "solo";
    cfg.inclination_deg = 35.0;
    cfg.azimuth_deg = 170.0;
    cfg.p_n_kw = 8.0;
    cfg.noise_std = 0.0;
    return generate_fleet(std::vector{cfg}, parse_iso8601("2019-01-01T00:00:00Z"), days, seed).front();
}

TimeSeries constant_series(Timestamp start, std::size_t n, double value) {
    return TimeSeries(start, 900, std::vector<double>(n, value));
}

// Plant model whose estimator always predicts near `level` (ridge on a
// constant target), for exercising the clipping rules directly.
TrainedPlantModel constant_model(double level) {
    const auto data = testutil::make_dataset(60, 2);
    const std::vector<double> y(data.x.rows, level);
    EstimatorSpec spec;
    spec.kind = EstimatorKind::Ridge;
    spec.alpha = 0.05;
    TrainedPlantModel model;
    model.plant_id = "const";
    model.p_n_kw = 5.0;
    model.estimator = std::shared_ptr<const Estimator>(fit_estimator(spec, data.x, y));
    model.feature_stats = compute_stats(data.x);
    return model;
}

}  // namespace

TEST_CASE("training set keeps exactly the rows with positive irradiance forecast") {
    const PlantRecord rec = noiseless_plant(3, 4);
    const TrainingSet set = make_training_set(rec);

    std::size_t day_count = 0;
    std::vector<double> expected_y;
    for (std::size_t k = 0; k < rec.weather.g_hat_wm2.size(); ++k) {
        if (rec.weather.g_hat_wm2[k] > 0.0) {
            ++day_count;
            expected_y.push_back(rec.power_kw[k] / rec.p_n_kw);
        }
    }
    REQUIRE(set.x.rows == day_count);
    REQUIRE(set.y.size() == day_count);
    for (std::size_t i = 0; i < set.y.size(); ++i) {
        CHECK(std::isfinite(set.y[i]));
        CHECK(set.y[i] >= 0.0);
        CHECK(set.y[i] == expected_y[i]);
    }
}

TEST_CASE("plant training rejects short or sunless records") {
    CHECK_THROWS_AS(train_plant_model(noiseless_plant(59, 4), 1), InsufficientDataError);

    // 61 days of zero irradiance forecast: no daytime rows survive
    const Timestamp start = parse_iso8601("2019-01-01T00:00:00Z");
    const std::size_t n = 61 * 96;
    PlantRecord dark;
    dark.id = "dark";
    dark.p_n_kw = 5.0;
    dark.power_kw = constant_series(start, n, 0.0);
    dark.weather.g_hat_wm2 = constant_series(start, n, 0.0);
    dark.weather.t_hat_c = constant_series(start, n, 10.0);
    CHECK_THROWS_AS(train_plant_model(dark, 1), InsufficientDataError);
}

TEST_CASE("trained model generalizes on a noiseless plant and obeys the output rules") {
    const PlantRecord rec = noiseless_plant(90, 13);
    const Timestamp cut = rec.power_kw.start_time() + 75 * kDay;
    const PlantRecord train = rec.slice_time(rec.power_kw.start_time(), cut);
    const PlantRecord hold = rec.slice_time(cut, rec.power_kw.end_time());

    const PlantTrainingResult result = train_plant_model(train, 21);
    CHECK(result.model.plant_id == "solo");
    CHECK(result.model.p_n_kw == 8.0);
    REQUIRE(result.model.estimator != nullptr);
    CHECK_FALSE(result.search.trials.empty());
    CHECK(result.search.best >= 0);

    const TimeSeries forecast =
        predict_scaled(result.model, hold.weather.g_hat_wm2, hold.weather.t_hat_c);
    REQUIRE(forecast.size() == hold.power_kw.size());

    double sse = 0.0;
    std::size_t day_rows = 0;
    for (std::size_t k = 0; k < forecast.size(); ++k) {
        CHECK(forecast[k] >= 0.0);
        if (hold.weather.g_hat_wm2[k] <= 0.0) {
            CHECK(forecast[k] == 0.0);
        } else {
            const double e = forecast[k] - hold.power_kw[k] / hold.p_n_kw;
            sse += e * e;
            ++day_rows;
        }
    }
    REQUIRE(day_rows > 0);
    CHECK(sse / static_cast<double>(day_rows) <= 0.01);

    // deterministic inference
    const TimeSeries again =
        predict_scaled(result.model, hold.weather.g_hat_wm2, hold.weather.t_hat_c);
    for (std::size_t k = 0; k < forecast.size(); ++k) CHECK(again[k] == forecast[k]);
}

TEST_CASE("negative estimator output is clipped; zero irradiance forces zero") {
    const TrainedPlantModel low = constant_model(-0.5);
    const Timestamp start = parse_iso8601("2020-06-01T00:00:00Z");
    std::vector<double> g{0.0, 500.0, 0.0, 800.0, 120.0, 0.0};
    const TimeSeries g_hat(start, 900, g);
    const TimeSeries t_hat = constant_series(start, g.size(), 15.0);

    const TimeSeries clipped = predict_scaled(low, g_hat, t_hat);
    for (std::size_t k = 0; k < clipped.size(); ++k) CHECK(clipped[k] == 0.0);

    const TrainedPlantModel high = constant_model(0.4);
    const TimeSeries mixed = predict_scaled(high, g_hat, t_hat);
    for (std::size_t k = 0; k < mixed.size(); ++k) {
        if (g[k] <= 0.0) {
            CHECK(mixed[k] == 0.0);
        } else {
            CHECK(mixed[k] == doctest::Approx(0.4).epsilon(0.05));
        }
    }

    // an all-night day stays identically zero
    const TimeSeries dark = constant_series(start, 96, 0.0);
    const TimeSeries t_day = constant_series(start, 96, 15.0);
    const TimeSeries out = predict_scaled(high, dark, t_day);
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == 0.0);

    TrainedPlantModel empty;
    empty.plant_id = "empty";
    CHECK_THROWS_AS(predict_scaled(empty, g_hat, t_hat), InvalidPlantError);
}

TEST_CASE("model and pool serialization round-trip to identical forecasts") {
    const PlantRecord rec = noiseless_plant(62, 8);
    CashOptions options;
    options.max_trials = 30;
    const PlantTrainingResult trained = train_plant_model(rec, 5, options);

    const nlohmann::json j = trained.model.to_json();
    const TrainedPlantModel reloaded = TrainedPlantModel::from_json(j);
    CHECK(reloaded.plant_id == trained.model.plant_id);
    CHECK(reloaded.p_n_kw == trained.model.p_n_kw);

    const TimeSeries a = predict_scaled(trained.model, rec.weather.g_hat_wm2, rec.weather.t_hat_c);
    const TimeSeries b = predict_scaled(reloaded, rec.weather.g_hat_wm2, rec.weather.t_hat_c);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);

    nlohmann::json bad = j;
    bad["format_version"] = 2;
    CHECK_THROWS_AS(TrainedPlantModel::from_json(bad), IoError);

    ModelPool pool{std::make_shared<const TrainedPlantModel>(trained.model),
                   std::make_shared<const TrainedPlantModel>(constant_model(0.2))};
    const ModelPool reloaded_pool = pool_from_json(pool_to_json(pool));
    REQUIRE(reloaded_pool.size() == 2);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const TimeSeries x = predict_scaled(*pool[i], rec.weather.g_hat_wm2, rec.weather.t_hat_c);
        const TimeSeries y =
            predict_scaled(*reloaded_pool[i], rec.weather.g_hat_wm2, rec.weather.t_hat_c);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == y[k]);
    }

    ModelPool with_null = pool;
    with_null.push_back(nullptr);
    CHECK_THROWS_AS(pool_to_json(with_null), InvalidPoolError);

    TrainedPlantModel no_estimator;
    no_estimator.plant_id = "none";
    CHECK_THROWS_AS(no_estimator.to_json(), InvalidPlantError);
}
