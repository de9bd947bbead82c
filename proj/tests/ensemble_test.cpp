#include "autopv/ensemble.hpp"

#include <cmath>
#include <vector>

#include "autopv/errors.hpp"
#include "autopv/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace autopv;

namespace {

constexpr Timestamp kStart = 1577836800;  // 2020-01-01T00:00:00Z

TimeSeries series(std::vector<double> v) { return TimeSeries(kStart, 900, std::move(v)); }

// Plant model whose estimator always predicts near `level`.
std::shared_ptr<const TrainedPlantModel> constant_model(double level) {
    const auto data = testutil::make_dataset(60, 2);
    const std::vector<double> y(data.x.rows, level);
    EstimatorSpec spec;
    spec.kind = EstimatorKind::Ridge;
    spec.alpha = 0.05;
    auto model = std::make_shared<TrainedPlantModel>();
    model->plant_id = "const";
    model->p_n_kw = 5.0;
    model->estimator = std::shared_ptr<const Estimator>(fit_estimator(spec, data.x, y));
    model->feature_stats = compute_stats(data.x);
    return model;
}

double window_mse(std::span<const double> w, std::span<const TimeSeries> forecasts,
                  const TimeSeries& target) {
    double sse = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        double combined = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) combined += w[i] * forecasts[i][k];
        const double e = combined - target[k];
        sse += e * e;
    }
    return sse / static_cast<double>(target.size());
}

// Exhaustive search over the 0.05-step simplex grid for three weights.
double grid_best_mse(std::span<const TimeSeries> forecasts, const TimeSeries& target) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; i + j <= 20; ++j) {
            const double w[3] = {i / 20.0, j / 20.0, (20 - i - j) / 20.0};
            best = std::min(best, window_mse(std::span<const double>(w, 3), forecasts, target));
        }
    }
    return best;
}

// Three linearly independent non-negative "scaled forecast" shapes.
std::vector<TimeSeries> basis_forecasts(std::size_t len) {
    std::vector<double> f1(len), f2(len), f3(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double t = static_cast<double>(k);
        f1[k] = 0.5 + 0.4 * std::sin(t / 5.0);
        f2[k] = 0.4 + 0.3 * std::cos(t / 7.0);
        f3[k] = 0.1 + 0.8 * (t / static_cast<double>(len));
    }
    std::vector<TimeSeries> out;
    out.push_back(series(std::move(f1)));
    out.push_back(series(std::move(f2)));
    out.push_back(series(std::move(f3)));
    return out;
}

}  // namespace

TEST_CASE("weight vectors enforce the simplex constraints") {
    CHECK_THROWS_AS(WeightVector(std::vector<double>{}), InvalidPoolError);
    CHECK_THROWS_AS(WeightVector({0.5, 0.6}), InvalidPoolError);
    CHECK_THROWS_AS(WeightVector({-0.1, 1.1}), InvalidPoolError);
    CHECK_THROWS_AS(WeightVector({0.4, 0.4}), InvalidPoolError);
    CHECK_NOTHROW(WeightVector({0.25, 0.75}));

    const WeightVector tenth = WeightVector::equal(10);
    REQUIRE(tenth.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(tenth[i] == 0.1);
    const WeightVector half = WeightVector::equal(2);
    CHECK(half[0] == 0.5);
    CHECK(half[1] == 0.5);
    const WeightVector seventh = WeightVector::equal(7);
    double sum = 0.0;
    for (const double v : seventh.values()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(WeightVector::equal(0), InvalidPoolError);
}

TEST_CASE("equal-weight start requires a usable pool and window") {
    ModelPool pool{constant_model(0.3), constant_model(0.6)};
    const EnsembleState st = init_equal(pool, 7.5, 28, 2688);
    CHECK(st.weights.size() == 2);
    CHECK(st.weights[0] == 0.5);
    CHECK(st.p_n_new_kw == 7.5);
    CHECK(st.last_adaptation == 0);

    CHECK_THROWS_AS(init_equal(ModelPool{constant_model(0.3)}, 7.5), InvalidPoolError);
    CHECK_THROWS_AS(init_equal(pool, 0.0), InvalidPlantError);
    CHECK_THROWS_AS(init_equal(pool, 7.5, 0), ConfigError);
    CHECK_THROWS_AS(init_equal(pool, 7.5, 28, 1), InvalidPoolError);
    ModelPool with_untrained = pool;
    with_untrained.push_back(std::make_shared<const TrainedPlantModel>());
    CHECK_THROWS_AS(init_equal(with_untrained, 7.5), InvalidPoolError);
}

TEST_CASE("ensemble prediction is the re-scaled convex combination of members") {
    ModelPool pool{constant_model(0.3), constant_model(0.6)};
    EnsembleState st = init_equal(pool, 4.0, 28, 2688);

    std::vector<double> g{0.0, 300.0, 700.0, 0.0, 150.0, 900.0};
    const TimeSeries g_hat = series(g);
    const TimeSeries t_hat = series(std::vector<double>(g.size(), 12.0));

    const TimeSeries m0 = predict_scaled(*pool[0], g_hat, t_hat);
    const TimeSeries m1 = predict_scaled(*pool[1], g_hat, t_hat);

    // one-hot weights reproduce the selected member exactly
    st.weights = WeightVector({0.0, 1.0});
    const TimeSeries picked = ensemble_predict(st, g_hat, t_hat);
    for (std::size_t k = 0; k < picked.size(); ++k) CHECK(picked[k] == 4.0 * m1[k]);

    st.weights = WeightVector::equal(2);
    const TimeSeries blended = ensemble_predict(st, g_hat, t_hat);
    for (std::size_t k = 0; k < blended.size(); ++k) {
        CHECK(blended[k] >= 0.0);
        CHECK(blended[k] <= 4.0 * std::max(m0[k], m1[k]) + 1e-15);
        if (g[k] <= 0.0) CHECK(blended[k] == 0.0);
    }
}

TEST_CASE("bounded least squares projects the free optimum onto the box") {
    Matrix eye(2, 2);
    eye.at(0, 0) = 1.0;
    eye.at(1, 1) = 1.0;
    const std::vector<double> b{2.0, -1.0};
    const std::vector<double> w = bounded_least_squares(eye, b, 0.0, 1.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w[1] == doctest::Approx(0.0).epsilon(1e-9));

    // interior optimum is reached exactly
    const std::vector<double> b2{0.25, 0.6};
    const std::vector<double> w2 = bounded_least_squares(eye, b2, 0.0, 1.0);
    CHECK(w2[0] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(w2[1] == doctest::Approx(0.6).epsilon(1e-8));

    CHECK_THROWS_AS(bounded_least_squares(eye, std::vector<double>{1.0}, 0.0, 1.0), ShapeError);
    CHECK_THROWS_AS(bounded_least_squares(eye, b, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(bounded_least_squares(Matrix(), std::vector<double>{}, 0.0, 1.0), ShapeError);
}

TEST_CASE("weight optimization recovers exact memberships and mixtures") {
    const auto forecasts = basis_forecasts(96);
    const WeightVector prev = WeightVector::equal(3);

    // target equals member 2 exactly
    std::vector<double> t_onehot(96);
    for (std::size_t k = 0; k < 96; ++k) t_onehot[k] = forecasts[2][k];
    const WeightOptimization onehot = optimize_weights(forecasts, series(t_onehot), prev);
    CHECK_FALSE(onehot.degenerate);
    CHECK(std::abs(onehot.weights[0] - 0.0) <= 1e-6);
    CHECK(std::abs(onehot.weights[1] - 0.0) <= 1e-6);
    CHECK(std::abs(onehot.weights[2] - 1.0) <= 1e-6);
    CHECK(onehot.windowed_mse <= 1e-12);

    // target is an interior convex mixture
    std::vector<double> t_mix(96);
    for (std::size_t k = 0; k < 96; ++k) t_mix[k] = 0.7 * forecasts[0][k] + 0.3 * forecasts[1][k];
    const WeightOptimization mix = optimize_weights(forecasts, series(t_mix), prev);
    CHECK_FALSE(mix.degenerate);
    CHECK(std::abs(mix.weights[0] - 0.7) <= 1e-6);
    CHECK(std::abs(mix.weights[1] - 0.3) <= 1e-6);
    CHECK(std::abs(mix.weights[2] - 0.0) <= 1e-6);
    CHECK(mix.windowed_mse <= 1e-12);
}

TEST_CASE("solver never loses to the simplex grid oracle on mixture windows") {
    const double noise_levels[] = {0.0, 0.01, 0.03, 0.1};
    for (std::uint64_t rep = 0; rep < 8; ++rep) {
        for (const double noise : noise_levels) {
            Rng rng(derive_seed(900, "oracle", rep * 8 + static_cast<std::uint64_t>(noise * 100)));
            const std::size_t len = 120;
            std::vector<std::vector<double>> f(3, std::vector<double>(len));
            for (auto& col : f) {
                for (double& v : col) v = rng.uniform01();
            }
            // random simplex point as the generating mixture
            double u0 = rng.uniform01(), u1 = rng.uniform01(), u2 = rng.uniform01();
            const double us = u0 + u1 + u2;
            u0 /= us;
            u1 /= us;
            u2 /= us;
            std::vector<double> target(len);
            for (std::size_t k = 0; k < len; ++k) {
                target[k] = u0 * f[0][k] + u1 * f[1][k] + u2 * f[2][k] + noise * rng.normal();
            }
            std::vector<TimeSeries> forecasts;
            for (auto& col : f) forecasts.push_back(series(std::move(col)));
            const TimeSeries target_series = series(std::move(target));

            const WeightOptimization opt =
                optimize_weights(forecasts, target_series, WeightVector::equal(3));
            REQUIRE_FALSE(opt.degenerate);
            const double oracle = grid_best_mse(forecasts, target_series);
            CHECK(opt.windowed_mse <= oracle + 1e-9);
        }
    }
}

TEST_CASE("identical members tie: any simplex point matches the endpoints") {
    const auto base = basis_forecasts(96);
    std::vector<TimeSeries> twins{base[0], base[0]};
    std::vector<double> target(96);
    for (std::size_t k = 0; k < 96; ++k) target[k] = base[0][k] * 0.8;
    const TimeSeries target_series = series(std::move(target));

    const WeightOptimization opt = optimize_weights(twins, target_series, WeightVector::equal(2));
    REQUIRE_FALSE(opt.degenerate);
    double sum = 0.0;
    for (const double v : opt.weights.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    // brute force over w1: the objective is flat in the tie direction
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double w[2] = {i / 100.0, 1.0 - i / 100.0};
        best = std::min(best, window_mse(std::span<const double>(w, 2), twins, target_series));
    }
    CHECK(opt.windowed_mse <= best + 1e-9);
}

TEST_CASE("degenerate windows leave the previous weights in place") {
    const auto forecasts = basis_forecasts(40);
    const WeightVector prev({0.2, 0.5, 0.3});

    // all members silent (snowed-in month)
    std::vector<TimeSeries> silent;
    for (int i = 0; i < 3; ++i) silent.push_back(series(std::vector<double>(40, 0.0)));
    const WeightOptimization od =
        optimize_weights(silent, series(std::vector<double>(40, 0.1)), prev);
    CHECK(od.degenerate);
    for (std::size_t i = 0; i < 3; ++i) CHECK(od.weights[i] == prev[i]);

    // zero target collapses the box fit to the all-zero corner
    const WeightOptimization oz =
        optimize_weights(forecasts, series(std::vector<double>(40, 0.0)), prev);
    CHECK(oz.degenerate);
    for (std::size_t i = 0; i < 3; ++i) CHECK(oz.weights[i] == prev[i]);

    CHECK_THROWS_AS(optimize_weights(forecasts, series(std::vector<double>(41, 0.1)), prev),
                    InvalidSeriesError);
    CHECK_THROWS_AS(optimize_weights(std::vector<TimeSeries>{forecasts[0]},
                                     series(std::vector<double>(40, 0.1)), prev),
                    InvalidPoolError);
}

TEST_CASE("silent night rows do not move the optimized weights") {
    const auto day = basis_forecasts(60);
    std::vector<double> target(60);
    for (std::size_t k = 0; k < 60; ++k) target[k] = 0.6 * day[0][k] + 0.4 * day[2][k];

    std::vector<TimeSeries> padded;
    for (const TimeSeries& f : day) {
        std::vector<double> v(f.values().begin(), f.values().end());
        v.resize(90, 0.0);
        padded.push_back(series(std::move(v)));
    }
    std::vector<double> target_padded = target;
    target_padded.resize(90, 0.0);

    const WeightVector prev = WeightVector::equal(3);
    const WeightOptimization plain = optimize_weights(day, series(std::move(target)), prev);
    const WeightOptimization night =
        optimize_weights(padded, series(std::move(target_padded)), prev);
    REQUIRE_FALSE(plain.degenerate);
    REQUIRE_FALSE(night.degenerate);
    for (std::size_t i = 0; i < 3; ++i) CHECK(night.weights[i] == plain.weights[i]);
}

TEST_CASE("adaptation waits for a full window, then fits its tail") {
    const auto base = basis_forecasts(96);
    ModelPool pool{constant_model(0.3), constant_model(0.6), constant_model(0.1)};
    EnsembleState st = init_equal(pool, 2.0, 28, 64);

    // shorter history than the window: cold start continues
    const auto short_hist = basis_forecasts(40);
    const TimeSeries short_meas = series(std::vector<double>(40, 0.5));
    const AdaptationResult waiting = adaptation_step(st, short_meas, short_hist);
    CHECK(waiting.outcome == AdaptationOutcome::NotEnoughSamples);
    for (std::size_t i = 0; i < 3; ++i) CHECK(waiting.state.weights[i] == st.weights[i]);
    CHECK(waiting.state.last_adaptation == 0);

    // 96 samples of history; the first 32 are garbage, the final 64 encode
    // a clean 0.25/0.75 mixture of members 0 and 1. Recovering it proves
    // only the most recent window is used.
    std::vector<double> meas(96);
    for (std::size_t k = 0; k < 96; ++k) {
        if (k < 32) {
            meas[k] = 2.0 * base[2][k];
        } else {
            meas[k] = 2.0 * (0.25 * base[0][k] + 0.75 * base[1][k]);
        }
    }
    const TimeSeries measurements = series(std::move(meas));
    const AdaptationResult adapted = adaptation_step(st, measurements, base);
    CHECK(adapted.outcome == AdaptationOutcome::Adapted);
    CHECK(adapted.state.last_adaptation == measurements.end_time());
    CHECK(std::abs(adapted.state.weights[0] - 0.25) <= 1e-6);
    CHECK(std::abs(adapted.state.weights[1] - 0.75) <= 1e-6);
    CHECK(std::abs(adapted.state.weights[2] - 0.0) <= 1e-6);

    // idempotent on identical window data
    const AdaptationResult again = adaptation_step(adapted.state, measurements, base);
    CHECK(again.outcome == AdaptationOutcome::Adapted);
    for (std::size_t i = 0; i < 3; ++i) CHECK(again.state.weights[i] == adapted.state.weights[i]);

    // silent window: outcome reported, weights kept
    std::vector<TimeSeries> silent;
    for (int i = 0; i < 3; ++i) silent.push_back(series(std::vector<double>(96, 0.0)));
    const AdaptationResult degen = adaptation_step(adapted.state, measurements, silent);
    CHECK(degen.outcome == AdaptationOutcome::DegenerateWindow);
    for (std::size_t i = 0; i < 3; ++i) CHECK(degen.state.weights[i] == adapted.state.weights[i]);

    std::vector<TimeSeries> wrong_count{base[0], base[1]};
    CHECK_THROWS_AS(adaptation_step(st, measurements, wrong_count), InvalidPoolError);
}
