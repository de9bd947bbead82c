#include "autopv/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "autopv/errors.hpp"

namespace autopv {

namespace {
constexpr double kDiagonalRidge = 1e-10;
constexpr double kDegenerateSum = 1e-9;
}  // namespace

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw InvalidPoolError("weight vector is empty");
    double sum = 0.0;
    for (const double v : w_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidPoolError("weight " + std::to_string(v) + " outside [0, 1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidPoolError("weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

WeightVector WeightVector::equal(std::size_t n) {
    if (n == 0) throw InvalidPoolError("weight vector is empty");
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

EnsembleState init_equal(ModelPool pool, double p_n_new_kw, int cycle_days,
                         std::size_t window_samples) {
    if (pool.size() < 2) {
        throw InvalidPoolError("pool needs at least 2 models, got " + std::to_string(pool.size()));
    }
    for (const auto& m : pool) {
        if (!m || !m->estimator) throw InvalidPoolError("pool contains an untrained model");
    }
    if (!(p_n_new_kw > 0.0)) throw InvalidPlantError("nominal power must be positive");
    if (cycle_days < 1) throw ConfigError("cycle_days must be at least 1");
    if (window_samples < pool.size()) {
        throw InvalidPoolError("window of " + std::to_string(window_samples) +
                               " samples is shorter than the pool size " + std::to_string(pool.size()));
    }
    EnsembleState st;
    st.weights = WeightVector::equal(pool.size());
    st.pool = std::move(pool);
    st.p_n_new_kw = p_n_new_kw;
    st.cycle_days = cycle_days;
    st.window_samples = window_samples;
    return st;
}

TimeSeries ensemble_predict(const EnsembleState& st, const TimeSeries& g_hat, const TimeSeries& t_hat) {
    require_aligned(g_hat, t_hat, "ensemble weather forecast");
    if (st.weights.size() != st.pool.size()) {
        throw InvalidPoolError("weight count does not match pool size");
    }
    std::vector<double> acc(g_hat.size(), 0.0);
    for (std::size_t n = 0; n < st.pool.size(); ++n) {
        const TimeSeries member = predict_scaled(*st.pool[n], g_hat, t_hat);
        const double w = st.weights[n];
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * member[k];
    }
    for (double& v : acc) v *= st.p_n_new_kw;
    return TimeSeries(g_hat.start_time(), g_hat.step(), std::move(acc));
}

std::vector<double> bounded_least_squares(const Matrix& a, std::span<const double> b, double lo,
                                          double hi) {
    const std::size_t rows = a.rows;
    const auto n = static_cast<Eigen::Index>(a.cols);
    if (b.size() != rows) throw ShapeError("bounded LSQ target length does not match rows");
    if (n == 0) throw ShapeError("bounded LSQ needs at least one column");
    if (!(lo < hi)) throw ConfigError("bounded LSQ needs lo < hi");

    // normal equations accumulated as pure sums: rows that are zero on both
    // sides are exact no-ops, so night samples cannot move the solution
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < rows; ++k) {
        const Eigen::Map<const Eigen::VectorXd> r(a.row(k).data(), n);
        h.noalias() += r * r.transpose();
        c.noalias() += r * b[k];
    }
    h.diagonal().array() += kDiagonalRidge;

    enum class Where { Lo, Free, Hi };
    std::vector<Where> state(static_cast<std::size_t>(n), Where::Lo);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, lo);
    const double tol = 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff());

    const int max_outer = 30 + 3 * static_cast<int>(n) * static_cast<int>(n);
    for (int outer = 0; outer < max_outer; ++outer) {
        const Eigen::VectorXd g = h * w - c;  // gradient of the quadratic
        Eigen::Index enter = -1;
        double worst = tol;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto s = state[static_cast<std::size_t>(i)];
            if (s == Where::Lo && -g(i) > worst) {
                worst = -g(i);
                enter = i;
            } else if (s == Where::Hi && g(i) > worst) {
                worst = g(i);
                enter = i;
            }
        }
        if (enter < 0) break;  // bound multipliers all have the right sign
        state[static_cast<std::size_t>(enter)] = Where::Free;

        for (Eigen::Index inner = 0; inner <= n; ++inner) {
            std::vector<Eigen::Index> free;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (state[static_cast<std::size_t>(i)] == Where::Free) free.push_back(i);
            }
            if (free.empty()) break;

            const auto nf = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd hff(nf, nf);
            Eigen::VectorXd rhs(nf);
            for (Eigen::Index i = 0; i < nf; ++i) {
                for (Eigen::Index j = 0; j < nf; ++j) hff(i, j) = h(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
                double adj = c(free[static_cast<std::size_t>(i)]);
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (state[static_cast<std::size_t>(j)] != Where::Free) {
                        adj -= h(free[static_cast<std::size_t>(i)], j) * w(j);
                    }
                }
                rhs(i) = adj;
            }
            const Eigen::VectorXd x = hff.ldlt().solve(rhs);

            // step from w toward x, stopping at the first violated bound
            double alpha = 1.0;
            Eigen::Index blocking = -1;
            bool block_at_hi = false;
            for (Eigen::Index i = 0; i < nf; ++i) {
                const double cur = w(free[static_cast<std::size_t>(i)]);
                const double tgt = x(i);
                double bound = 0.0;
                if (tgt > hi + 1e-12) {
                    bound = hi;
                } else if (tgt < lo - 1e-12) {
                    bound = lo;
                } else {
                    continue;
                }
                const double step = (bound - cur) / (tgt - cur);
                if (step < alpha) {
                    alpha = step;
                    blocking = free[static_cast<std::size_t>(i)];
                    block_at_hi = bound == hi;
                }
            }

            if (blocking < 0) {
                for (Eigen::Index i = 0; i < nf; ++i) w(free[static_cast<std::size_t>(i)]) = x(i);
                break;
            }
            for (Eigen::Index i = 0; i < nf; ++i) {
                const Eigen::Index fi = free[static_cast<std::size_t>(i)];
                w(fi) += alpha * (x(i) - w(fi));
            }
            w(blocking) = block_at_hi ? hi : lo;
            state[static_cast<std::size_t>(blocking)] = block_at_hi ? Where::Hi : Where::Lo;
        }
    }

    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = std::clamp(w(i), lo, hi);
    }
    return out;
}

WeightOptimization optimize_weights(std::span<const TimeSeries> pool_forecasts,
                                    const TimeSeries& target_scaled, const WeightVector& prev) {
    const std::size_t n = pool_forecasts.size();
    if (n != prev.size()) throw InvalidPoolError("forecast count does not match weight count");
    if (n < 1) throw InvalidPoolError("no pool forecasts given");
    for (const TimeSeries& f : pool_forecasts) require_aligned(f, target_scaled, "optimization window");
    const std::size_t window = target_scaled.size();
    if (window == 0) throw InvalidSeriesError("optimization window is empty");

    const auto windowed_mse = [&](std::span<const double> weights) {
        double sse = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            double combined = 0.0;
            for (std::size_t i = 0; i < n; ++i) combined += weights[i] * pool_forecasts[i][k];
            const double e = combined - target_scaled[k];
            sse += e * e;
        }
        return sse / static_cast<double>(window);
    };

    bool all_zero = true;
    for (const TimeSeries& f : pool_forecasts) {
        for (const double v : f.values()) {
            if (v != 0.0) {
                all_zero = false;
                break;
            }
        }
        if (!all_zero) break;
    }
    if (all_zero) {
        return WeightOptimization{prev, true, windowed_mse(prev.values())};
    }

    Matrix a(window, n);
    for (std::size_t k = 0; k < window; ++k) {
        for (std::size_t i = 0; i < n; ++i) a.at(k, i) = pool_forecasts[i][k];
    }
    std::vector<double> w = bounded_least_squares(a, target_scaled.values(), 0.0, 1.0);

    double sum = 0.0;
    for (const double v : w) sum += v;
    if (sum < kDegenerateSum) {
        return WeightOptimization{prev, true, windowed_mse(prev.values())};
    }
    for (double& v : w) v /= sum;

    WeightOptimization result;
    result.weights = WeightVector(std::move(w));
    result.degenerate = false;
    result.windowed_mse = windowed_mse(result.weights.values());
    return result;
}

AdaptationResult adaptation_step(const EnsembleState& st, const TimeSeries& new_measurements_kw,
                                 std::span<const TimeSeries> pool_forecast_history) {
    if (pool_forecast_history.size() != st.pool.size()) {
        throw InvalidPoolError("forecast history count does not match pool size");
    }
    for (const TimeSeries& f : pool_forecast_history) {
        require_aligned(f, new_measurements_kw, "adaptation history");
    }

    AdaptationResult result;
    result.state = st;
    if (new_measurements_kw.size() < st.window_samples) {
        result.outcome = AdaptationOutcome::NotEnoughSamples;
        return result;
    }

    std::vector<TimeSeries> window_forecasts;
    window_forecasts.reserve(st.pool.size());
    for (const TimeSeries& f : pool_forecast_history) window_forecasts.push_back(f.tail(st.window_samples));
    const TimeSeries target =
        scale_by_peak(new_measurements_kw.tail(st.window_samples), st.p_n_new_kw);

    const WeightOptimization opt = optimize_weights(window_forecasts, target, st.weights);
    result.state.weights = opt.weights;
    result.state.last_adaptation = new_measurements_kw.end_time();
    result.outcome = opt.degenerate ? AdaptationOutcome::DegenerateWindow : AdaptationOutcome::Adapted;
    result.windowed_mse = opt.windowed_mse;
    return result;
}

}  // namespace autopv
