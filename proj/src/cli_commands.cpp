#include "autopv/cli_commands.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "autopv/csv_io.hpp"
#include "autopv/errors.hpp"
#include "autopv/parallel.hpp"
#include "autopv/synth.hpp"

namespace autopv {

namespace {

EvalOptions eval_options(const RunConfig& cfg) {
    EvalOptions opt;
    opt.cycle_days = cfg.cycle_days;
    opt.window_samples = cfg.window_samples;
    opt.adaptation_enabled = cfg.adaptation_enabled;
    opt.cash.max_trials = cfg.max_trials;
    opt.threads = cfg.threads;
    return opt;
}

std::string format_double(double v, const char* fmt = "%.17g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

void write_weight_log_csv(const std::filesystem::path& path, std::span<const std::string> member_ids,
                          std::span<const WeightLogEntry> log) {
    std::string text = "timestamp";
    for (const std::string& id : member_ids) text += ",w_" + id;
    text += ",windowed_mse\n";
    for (const WeightLogEntry& e : log) {
        if (e.weights.size() != member_ids.size()) {
            throw ShapeError("weight log entry has " + std::to_string(e.weights.size()) +
                             " weights for " + std::to_string(member_ids.size()) + " members");
        }
        text += format_iso8601(e.at);
        for (const double w : e.weights) text += ',' + format_double(w);
        text += ',' + format_double(e.windowed_mse);
        text += '\n';
    }
    write_text_file(path, text);
}

/// Per-plant model training shared by pretrain and evaluate: same seeds,
/// same slices, so pretrained bundles match what the evaluation output uses.
std::vector<PlantTrainingResult> pretrain_fleet(std::span<const PlantRecord> fleet,
                                                const EvalSplit& split, const RunConfig& cfg) {
    std::vector<PlantTrainingResult> results(fleet.size());
    CashOptions cash;
    cash.max_trials = cfg.max_trials;
    parallel_for(
        fleet.size(),
        [&](std::size_t i) {
            const TaggedRecord pre = slice_period(fleet[i], split, DataPeriod::Pretrain);
            require_period(pre, DataPeriod::Pretrain, "pool training");
            results[i] = train_plant_model(pre.rec, derive_seed(cfg.seed, "pool", i), cash);
        },
        cfg.threads);
    return results;
}

}  // namespace

EvalSplit config_split(const RunConfig& cfg, std::span<const PlantRecord> fleet) {
    if (fleet.empty()) throw InvalidPoolError("fleet is empty");
    EvalSplit split;
    split.pretrain_start = fleet.front().power_kw.start_time();
    split.test_end = fleet.front().power_kw.end_time();
    for (const PlantRecord& rec : fleet) {
        split.pretrain_start = std::min(split.pretrain_start, rec.power_kw.start_time());
        split.test_end = std::max(split.test_end, rec.power_kw.end_time());
    }
    split.test_start = parse_iso8601(cfg.test_start);
    split.validate();
    return split;
}

void cmd_generate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const Timestamp start = parse_iso8601(cfg.start);
    const Timestamp end = start + static_cast<Timestamp>(cfg.days) * kDay;

    const std::vector<SyntheticPlantConfig> configs = default_fleet_configs();
    std::vector<PlantRecord> fleet = generate_fleet(configs, start, cfg.days, cfg.seed);

    // outage windows are calendar-anchored; apply the ones the span covers
    std::vector<DipWindow> windows;
    for (const DipWindow& w : default_dip_windows()) {
        if (w.start >= start && w.end <= end) windows.push_back(w);
    }
    if (!windows.empty()) {
        const auto it = std::find_if(fleet.begin(), fleet.end(),
                                     [](const PlantRecord& r) { return r.id == "pv07"; });
        if (it != fleet.end()) *it = inject_dips(*it, windows);
    }

    const nlohmann::json extra{
        {"fleet", cfg.fleet}, {"seed", cfg.seed}, {"start", cfg.start}, {"days", cfg.days}};
    save_fleet(cfg.data_dir, fleet, extra);

    out << "wrote " << fleet.size() << " plants to " << cfg.data_dir.string() << " (seed " << cfg.seed
        << ", " << cfg.days << " days from " << cfg.start << ")\n";
    for (const PlantRecord& rec : fleet) {
        out << "  " << rec.id << "  p_n=" << format_double(rec.p_n_kw, "%g") << " kW  ";
        if (rec.mounting) {
            out << "inclination=" << format_double(rec.mounting->inclination_deg, "%g")
                << " azimuth=" << format_double(rec.mounting->azimuth_deg, "%g") << "\n";
        } else {
            out << "multi-roof mixture\n";
        }
    }
}

void cmd_pretrain(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const std::vector<PlantRecord> fleet = load_fleet(cfg.data_dir);
    const EvalSplit split = config_split(cfg, fleet);
    const std::vector<PlantTrainingResult> results = pretrain_fleet(fleet, split, cfg);

    std::filesystem::create_directories(cfg.model_dir);
    ModelPool pool;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const PlantTrainingResult& res = results[i];
        write_json_file(cfg.model_dir / (fleet[i].id + ".model.json"), res.model.to_json());
        write_text_file(cfg.model_dir / (fleet[i].id + ".trials.jsonl"), trial_log_jsonl(res.search));
        pool.push_back(std::make_shared<const TrainedPlantModel>(res.model));
    }
    write_json_file(cfg.model_dir / "pool.json", pool_to_json(pool));

    out << "trained " << fleet.size() << " pool models into " << cfg.model_dir.string() << "\n";
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const SearchState& st = results[i].search;
        const TrialRecord& best = st.trials.at(static_cast<std::size_t>(st.best));
        out << "  " << fleet[i].id << "  " << st.trials.size() << " trials  best " << best.spec.describe()
            << "  val_mse=" << format_double(best.validation_mse, "%.6g") << "\n";
    }
}

void cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out) {
    cfg.validate();
    if (args.target_id.empty()) throw ConfigError("simulate needs a target plant id");
    if (args.truncate_after_day < 0) throw ConfigError("truncate_after_day must be non-negative");

    const std::vector<PlantRecord> fleet = load_fleet(cfg.data_dir);
    const auto it = std::find_if(fleet.begin(), fleet.end(),
                                 [&](const PlantRecord& r) { return r.id == args.target_id; });
    if (it == fleet.end()) throw ConfigError("unknown plant id '" + args.target_id + "'");

    const ModelPool all = pool_from_json(read_json_file(cfg.model_dir / "pool.json"));
    ModelPool pool;
    std::vector<std::string> member_ids;
    for (const auto& model : all) {
        if (model->plant_id == args.target_id) continue;  // the target never forecasts itself
        pool.push_back(model);
        member_ids.push_back(model->plant_id);
    }

    const EvalSplit split = config_split(cfg, fleet);
    TaggedRecord test = slice_period(*it, split, DataPeriod::Test);
    if (args.truncate_after_day > 0) {
        const Timestamp cut = std::min<Timestamp>(
            split.test_start + static_cast<Timestamp>(args.truncate_after_day) * kDay, split.test_end);
        test = TaggedRecord{test.rec.slice_time(split.test_start, cut), DataPeriod::Test};
    }

    const SimulationResult res = simulate_target(pool, test, eval_options(cfg));

    std::filesystem::create_directories(cfg.report_dir);
    write_power_csv(cfg.report_dir / ("simulate_" + args.target_id + ".forecast.csv"), res.forecast_kw);
    write_weight_log_csv(cfg.report_dir / ("simulate_" + args.target_id + ".weights.csv"), member_ids,
                         res.weight_log);

    out << "replayed " << args.target_id << ": " << res.forecast_kw.size() << " forecast samples, "
        << res.weight_log.size() << " adaptation cycles, pool of " << pool.size() << "\n";
    out << "forecast nMAE " << format_double(nmae(res.forecast_kw, test.rec.power_kw), "%.4f") << "\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const std::vector<PlantRecord> fleet = load_fleet(cfg.data_dir);
    const EvalSplit split = config_split(cfg, fleet);
    const EvaluationReport report = run_leave_one_out(fleet, split, cfg.seed, eval_options(cfg));

    std::filesystem::create_directories(cfg.report_dir);
    write_json_file(cfg.report_dir / "report.json", report.to_json());
    write_text_file(cfg.report_dir / "report.txt", report.to_text());
    for (std::size_t i = 0; i < report.plants.size(); ++i) {
        const PlantEvaluation& p = report.plants[i];
        std::vector<std::string> member_ids;
        for (std::size_t j = 0; j < fleet.size(); ++j) {
            if (j != i) member_ids.push_back(fleet[j].id);
        }
        write_weight_log_csv(cfg.report_dir / ("weights_" + p.plant_id + ".csv"), member_ids,
                             p.weight_log);
        const TimeSeries* cols[] = {&p.curves.actual_kw, &p.curves.im_hda_kw, &p.curves.im_it_kw,
                                    &p.curves.averaging_kw, &p.curves.autopv_kw};
        write_columns_csv(cfg.report_dir / ("curves_" + p.plant_id + ".csv"),
                          "timestamp,actual_kw,im_hda_kw,im_it_kw,averaging_kw,autopv_kw",
                          p.curves.actual_kw, cols);
    }
    out << report.to_text();
}

void cmd_report(const RunConfig& cfg, const std::filesystem::path& report_file, std::ostream& out) {
    const std::filesystem::path path =
        report_file.empty() ? cfg.report_dir / "report.json" : report_file;
    const EvaluationReport report = EvaluationReport::from_json(read_json_file(path));
    out << report.to_text();
}

}  // namespace autopv
