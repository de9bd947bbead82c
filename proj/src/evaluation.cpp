#include "autopv/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include "autopv/errors.hpp"
#include "autopv/parallel.hpp"

namespace autopv {

void EvalSplit::validate() const {
    if (!(pretrain_start < test_start && test_start < test_end)) {
        throw ConfigError("split must order pretrain_start < test_start < test_end");
    }
}

TaggedRecord slice_period(const PlantRecord& rec, const EvalSplit& split, DataPeriod period) {
    split.validate();
    const Timestamp t0 = period == DataPeriod::Pretrain ? split.pretrain_start : split.test_start;
    const Timestamp t1 = period == DataPeriod::Pretrain ? split.test_start : split.test_end;
    TaggedRecord tagged{rec.slice_time(t0, t1), period};
    if (!tagged.rec.power_kw.empty() &&
        (tagged.rec.power_kw.start_time() < t0 || tagged.rec.power_kw.end_time() > t1)) {
        throw InvalidDataError("sliced series escaped its period bounds");
    }
    return tagged;
}

void require_period(const TaggedRecord& tagged, DataPeriod expected, const char* context) {
    if (tagged.period != expected) {
        const auto name = [](DataPeriod p) { return p == DataPeriod::Pretrain ? "pretrain" : "test"; };
        throw InvalidDataError(std::string("provenance: ") + context + " requires " + name(expected) +
                               " data but received " + name(tagged.period) + " data");
    }
}

namespace {

std::vector<TimeSeries> member_forecasts(const ModelPool& pool, const WeatherForecast& weather) {
    std::vector<TimeSeries> members;
    members.reserve(pool.size());
    for (const auto& model : pool) {
        members.push_back(predict_scaled(*model, weather.g_hat_wm2, weather.t_hat_c));
    }
    return members;
}

struct AutoPvRun {
    TimeSeries forecast_kw;
    std::vector<WeightLogEntry> log;
};

// walks the test stretch cycle by cycle: the forecast for a segment always
// uses the weights fixed before the segment began
AutoPvRun run_autopv(const ModelPool& pool, const std::vector<TimeSeries>& members,
                     const TimeSeries& actual_kw, double p_n_kw, int cycle_days,
                     std::size_t window_samples, bool adaptation_enabled) {
    EnsembleState st = init_equal(pool, p_n_kw, cycle_days, window_samples);
    const Timestamp start = actual_kw.start_time();
    const Timestamp end = actual_kw.end_time();
    const Duration step = actual_kw.step();

    AutoPvRun run;
    std::vector<double> out(actual_kw.size(), 0.0);
    for (int cycle = 0;; ++cycle) {
        const Timestamp boundary = start + static_cast<Timestamp>(cycle) * cycle_days * kDay;
        if (boundary > end) break;

        // weights are re-fit at every completed cycle boundary, including one
        // that lands exactly on the end of the data (nothing left to
        // forecast, but the weight log still records the cycle)
        if (cycle >= 1 && adaptation_enabled) {
            const TimeSeries seen = actual_kw.slice_time(start, boundary);
            std::vector<TimeSeries> history;
            history.reserve(members.size());
            for (const TimeSeries& m : members) history.push_back(m.slice_time(start, boundary));
            const AdaptationResult res = adaptation_step(st, seen, history);
            st = res.state;
            if (res.outcome != AdaptationOutcome::NotEnoughSamples) {
                run.log.push_back(WeightLogEntry{
                    boundary,
                    std::vector<double>(st.weights.values().begin(), st.weights.values().end()),
                    res.windowed_mse});
            }
        }
        if (boundary >= end) break;

        const Timestamp seg_end = std::min<Timestamp>(boundary + cycle_days * kDay, end);
        const auto k0 = static_cast<std::size_t>((boundary - start) / step);
        const auto k1 = static_cast<std::size_t>((seg_end - start) / step);
        const std::span<const double> w = st.weights.values();
        for (std::size_t k = k0; k < k1; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < members.size(); ++j) acc += w[j] * members[j][k];
            out[k] = p_n_kw * acc;
        }
    }
    run.forecast_kw = TimeSeries(start, step, std::move(out));
    return run;
}

// individual model trained inside the test stretch only: nothing to predict
// with during the first cycle, then a configuration search on the first
// cycle's data, refit on everything seen so far at each later cycle
TimeSeries run_incremental(const TaggedRecord& tagged, int cycle_days, std::uint64_t seed,
                           const CashOptions& cash) {
    require_period(tagged, DataPeriod::Test, "incremental training");
    const PlantRecord& rec = tagged.rec;
    const Timestamp start = rec.power_kw.start_time();
    const Timestamp end = rec.power_kw.end_time();
    const Duration step = rec.power_kw.step();

    std::vector<double> out(rec.power_kw.size(), 0.0);
    std::unique_ptr<Estimator> search_pick;
    for (int cycle = 1;; ++cycle) {
        const Timestamp boundary = start + static_cast<Timestamp>(cycle) * cycle_days * kDay;
        if (boundary >= end) break;

        const PlantRecord seen = rec.slice_time(start, boundary);
        const TrainingSet set = make_training_set(seen);
        if (set.x.rows < 25) continue;  // degenerate stretch, keep forecasting zero

        EstimatorSpec spec;
        if (!search_pick) {
            const auto [train_idx, val_idx] = chronological_split(set.x.rows);
            const Matrix x_train = set.x.select_rows(train_idx);
            const Matrix x_val = set.x.select_rows(val_idx);
            std::vector<double> y_train;
            for (const std::size_t r : train_idx) y_train.push_back(set.y[r]);
            std::vector<double> y_val;
            for (const std::size_t r : val_idx) y_val.push_back(set.y[r]);
            CashResult res = run_cash(x_train, y_train, x_val, y_val, seed, cash);
            search_pick = std::move(res.estimator);
        }
        spec = search_pick->spec();

        TrainedPlantModel model;
        model.plant_id = rec.id;
        model.p_n_kw = rec.p_n_kw;
        model.estimator = std::shared_ptr<const Estimator>(fit_estimator(spec, set.x, set.y));
        model.feature_stats = compute_stats(set.x);

        const Timestamp seg_end = std::min<Timestamp>(boundary + cycle_days * kDay, end);
        const TimeSeries g = rec.weather.g_hat_wm2.slice_time(boundary, seg_end);
        const TimeSeries t = rec.weather.t_hat_c.slice_time(boundary, seg_end);
        const TimeSeries seg = rescale_by_peak(predict_scaled(model, g, t), rec.p_n_kw);
        const auto k0 = static_cast<std::size_t>((boundary - start) / step);
        for (std::size_t k = 0; k < seg.size(); ++k) out[k0 + k] = seg[k];
    }
    return TimeSeries(start, step, std::move(out));
}

std::vector<std::shared_ptr<const TrainedPlantModel>> train_fleet_models(
    std::span<const PlantRecord> fleet, const EvalSplit& split, std::uint64_t seed,
    const EvalOptions& options) {
    std::vector<std::shared_ptr<const TrainedPlantModel>> models(fleet.size());
    parallel_for(
        fleet.size(),
        [&](std::size_t i) {
            const TaggedRecord pre = slice_period(fleet[i], split, DataPeriod::Pretrain);
            require_period(pre, DataPeriod::Pretrain, "pool training");
            PlantTrainingResult res =
                train_plant_model(pre.rec, derive_seed(seed, "pool", i), options.cash);
            models[i] = std::make_shared<const TrainedPlantModel>(std::move(res.model));
        },
        options.threads);
    return models;
}

MethodScores mean_scores(std::span<const PlantEvaluation> plants) {
    MethodScores mean;
    for (const PlantEvaluation& p : plants) {
        mean.im_hda += p.scores.im_hda;
        mean.im_it += p.scores.im_it;
        mean.averaging += p.scores.averaging;
        mean.autopv += p.scores.autopv;
    }
    const auto n = static_cast<double>(plants.size());
    mean.im_hda /= n;
    mean.im_it /= n;
    mean.averaging /= n;
    mean.autopv /= n;
    return mean;
}

}  // namespace

SimulationResult simulate_target(const ModelPool& pool, const TaggedRecord& test,
                                 const EvalOptions& options) {
    require_period(test, DataPeriod::Test, "day-ahead replay");
    const std::vector<TimeSeries> members = member_forecasts(pool, test.rec.weather);
    AutoPvRun run = run_autopv(pool, members, test.rec.power_kw, test.rec.p_n_kw, options.cycle_days,
                               options.window_samples, options.adaptation_enabled);
    return SimulationResult{std::move(run.forecast_kw), std::move(run.log)};
}

EvaluationReport run_leave_one_out(std::span<const PlantRecord> fleet, const EvalSplit& split,
                                   std::uint64_t seed, const EvalOptions& options) {
    split.validate();
    if (fleet.size() < 3) {
        throw InvalidPoolError("leave-one-out needs at least 3 plants, got " +
                               std::to_string(fleet.size()));
    }
    if (options.cycle_days < 1) throw ConfigError("cycle_days must be at least 1");

    const auto models = train_fleet_models(fleet, split, seed, options);

    EvaluationReport report;
    report.plants.resize(fleet.size());
    report.seed = seed;
    report.cycle_days = options.cycle_days;
    report.window_samples = options.window_samples;
    report.split = split;

    parallel_for(
        fleet.size(),
        [&](std::size_t i) {
            const PlantRecord& target = fleet[i];
            const TaggedRecord test = slice_period(target, split, DataPeriod::Test);
            const TimeSeries& actual = test.rec.power_kw;

            ModelPool pool;
            pool.reserve(fleet.size() - 1);
            for (std::size_t j = 0; j < fleet.size(); ++j) {
                if (j != i) pool.push_back(models[j]);
            }
            const std::vector<TimeSeries> members = member_forecasts(pool, test.rec.weather);

            const AutoPvRun averaging = run_autopv(pool, members, actual, target.p_n_kw,
                                                   options.cycle_days, options.window_samples, false);
            const AutoPvRun autopv =
                run_autopv(pool, members, actual, target.p_n_kw, options.cycle_days,
                           options.window_samples, options.adaptation_enabled);

            const TimeSeries hda = rescale_by_peak(
                predict_scaled(*models[i], test.rec.weather.g_hat_wm2, test.rec.weather.t_hat_c),
                target.p_n_kw);
            const TimeSeries imit =
                run_incremental(test, options.cycle_days, derive_seed(seed, "imit", i), options.cash);

            PlantEvaluation& out = report.plants[i];
            out.plant_id = target.id;
            out.scores.im_hda = nmae(hda, actual);
            out.scores.im_it = nmae(imit, actual);
            out.scores.averaging = nmae(averaging.forecast_kw, actual);
            out.scores.autopv = nmae(autopv.forecast_kw, actual);
            out.weight_log = autopv.log;
            out.curves = MethodCurves{actual, hda, imit, averaging.forecast_kw, autopv.forecast_kw};
        },
        options.threads);

    report.mean = mean_scores(report.plants);
    return report;
}

std::vector<ConsistencyResult> run_consistency(std::span<const PlantRecord> fleet, const EvalSplit& split,
                                               std::uint64_t seed, const EvalOptions& options) {
    split.validate();
    if (fleet.size() < 2) {
        throw InvalidPoolError("consistency run needs at least 2 plants");
    }
    const auto models = train_fleet_models(fleet, split, seed, options);
    const ModelPool pool(models.begin(), models.end());

    std::vector<ConsistencyResult> results(fleet.size());
    parallel_for(
        fleet.size(),
        [&](std::size_t i) {
            const PlantRecord& target = fleet[i];
            const TaggedRecord test = slice_period(target, split, DataPeriod::Test);
            const std::vector<TimeSeries> members = member_forecasts(pool, test.rec.weather);
            const AutoPvRun run =
                run_autopv(pool, members, test.rec.power_kw, target.p_n_kw, options.cycle_days,
                           options.window_samples, options.adaptation_enabled);

            ConsistencyResult& out = results[i];
            out.plant_id = target.id;
            out.own_index = i;
            out.autopv_nmae = nmae(run.forecast_kw, test.rec.power_kw);
            out.weight_log = run.log;
            double own_sum = 0.0;
            for (const WeightLogEntry& e : run.log) own_sum += e.weights[i];
            out.own_mean_weight = run.log.empty() ? 0.0 : own_sum / static_cast<double>(run.log.size());
        },
        options.threads);
    return results;
}

namespace {

nlohmann::json scores_to_json(const MethodScores& s) {
    return {{"im_hda", s.im_hda}, {"im_it", s.im_it}, {"averaging", s.averaging}, {"autopv", s.autopv}};
}

MethodScores scores_from_json(const nlohmann::json& j) {
    MethodScores s;
    s.im_hda = j.at("im_hda").get<double>();
    s.im_it = j.at("im_it").get<double>();
    s.averaging = j.at("averaging").get<double>();
    s.autopv = j.at("autopv").get<double>();
    return s;
}

}  // namespace

nlohmann::json EvaluationReport::to_json() const {
    nlohmann::json plant_arr = nlohmann::json::array();
    for (const PlantEvaluation& p : plants) {
        nlohmann::json log = nlohmann::json::array();
        for (const WeightLogEntry& e : p.weight_log) {
            log.push_back({{"at", format_iso8601(e.at)},
                           {"weights", e.weights},
                           {"windowed_mse", e.windowed_mse}});
        }
        plant_arr.push_back(
            {{"plant_id", p.plant_id}, {"nmae", scores_to_json(p.scores)}, {"weight_log", std::move(log)}});
    }
    return {
        {"format_version", 1},
        {"seed", seed},
        {"cycle_days", cycle_days},
        {"window_samples", window_samples},
        {"split",
         {{"pretrain_start", format_iso8601(split.pretrain_start)},
          {"test_start", format_iso8601(split.test_start)},
          {"test_end", format_iso8601(split.test_end)}}},
        {"plants", std::move(plant_arr)},
        {"mean", scores_to_json(mean)},
    };
}

EvaluationReport EvaluationReport::from_json(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != 1) throw IoError("unsupported report format_version " + std::to_string(version));
    EvaluationReport report;
    report.seed = j.at("seed").get<std::uint64_t>();
    report.cycle_days = j.at("cycle_days").get<int>();
    report.window_samples = j.at("window_samples").get<std::size_t>();
    report.split.pretrain_start = parse_iso8601(j.at("split").at("pretrain_start").get<std::string>());
    report.split.test_start = parse_iso8601(j.at("split").at("test_start").get<std::string>());
    report.split.test_end = parse_iso8601(j.at("split").at("test_end").get<std::string>());
    for (const auto& p : j.at("plants")) {
        PlantEvaluation pe;
        pe.plant_id = p.at("plant_id").get<std::string>();
        pe.scores = scores_from_json(p.at("nmae"));
        for (const auto& e : p.at("weight_log")) {
            WeightLogEntry entry;
            entry.at = parse_iso8601(e.at("at").get<std::string>());
            entry.weights = e.at("weights").get<std::vector<double>>();
            entry.windowed_mse = e.at("windowed_mse").get<double>();
            pe.weight_log.push_back(std::move(entry));
        }
        report.plants.push_back(std::move(pe));
    }
    report.mean = scores_from_json(j.at("mean"));
    return report;
}

std::string EvaluationReport::to_text() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s\n", "plant", "im-hda", "im-it",
                  "averaging", "autopv");
    out += line;
    const auto row = [&](const std::string& id, const MethodScores& s) {
        std::snprintf(line, sizeof line, "%-10s %10.4f %10.4f %10.4f %10.4f\n", id.c_str(), s.im_hda,
                      s.im_it, s.averaging, s.autopv);
        out += line;
    };
    for (const PlantEvaluation& p : plants) row(p.plant_id, p.scores);
    row("mean", mean);
    return out;
}

}  // namespace autopv
