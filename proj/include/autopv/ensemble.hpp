#pragma once

#include "autopv/pipeline.hpp"

namespace autopv {

/// Convex-combination weights aligned with the pool order: every entry in
/// [0, 1], summing to 1 within 1e-9.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<double> w);

    static WeightVector equal(std::size_t n);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    std::span<const double> values() const { return w_; }

private:
    std::vector<double> w_;
};

/// Target-plant ensemble: the shared pool, current weights, and the
/// adaptation cadence. Value-semantic; adaptation returns a new state.
struct EnsembleState {
    ModelPool pool;
    WeightVector weights;
    double p_n_new_kw = 0.0;
    int cycle_days = 28;
    std::size_t window_samples = 28 * static_cast<std::size_t>(kSamplesPerDay);
    Timestamp last_adaptation = 0;  // end of the most recent optimization window, 0 = never
};

/// Cold start: every pool model weighted 1/N. The window must hold at least
/// as many samples as the pool has models, otherwise the weight optimization
/// would be underdetermined.
EnsembleState init_equal(ModelPool pool, double p_n_new_kw, int cycle_days = 28,
                         std::size_t window_samples = 28 * static_cast<std::size_t>(kSamplesPerDay));

/// Weighted sum of the pool's scaled forecasts, re-scaled by the target
/// plant's nominal power.
TimeSeries ensemble_predict(const EnsembleState& st, const TimeSeries& g_hat, const TimeSeries& t_hat);

/// min ‖Aw − b‖² subject to lo <= w_i <= hi, via an active-set method on the
/// normal equations. A 1e-10 ridge on the diagonal keeps the system positive
/// definite when columns coincide.
std::vector<double> bounded_least_squares(const Matrix& a, std::span<const double> b, double lo,
                                          double hi);

struct WeightOptimization {
    WeightVector weights;
    bool degenerate = false;   // window carried no usable signal; weights are prev
    double windowed_mse = 0.0; // of the returned weights over the window
};

/// Box-bounded least squares fit of the pool forecasts to the scaled target,
/// then L1 normalization onto the simplex. Returns prev unchanged when every
/// pool forecast is identically zero over the window or the fit collapses to
/// the all-zero vector.
WeightOptimization optimize_weights(std::span<const TimeSeries> pool_forecasts,
                                    const TimeSeries& target_scaled, const WeightVector& prev);

enum class AdaptationOutcome { Adapted, NotEnoughSamples, DegenerateWindow };

struct AdaptationResult {
    EnsembleState state;
    AdaptationOutcome outcome = AdaptationOutcome::NotEnoughSamples;
    double windowed_mse = 0.0;
};

/// One adaptation cycle: take the most recent window_samples of measurements
/// and matching pool forecasts, scale the measurements by p_n_new, and
/// re-optimize the weights. With fewer samples than the window needs the
/// state is returned unchanged (the cold-start period).
AdaptationResult adaptation_step(const EnsembleState& st, const TimeSeries& new_measurements_kw,
                                 std::span<const TimeSeries> pool_forecast_history);

/// One line of the weight evolution log.
struct WeightLogEntry {
    Timestamp at = 0;
    std::vector<double> weights;
    double windowed_mse = 0.0;
};

}  // namespace autopv
