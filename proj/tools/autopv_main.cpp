#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "autopv/cli_commands.hpp"
#include "autopv/errors.hpp"

namespace {

// every option is also a config-file field; flags win when given
struct Overrides {
    std::string config_path;
    autopv::RunConfig flags;  // parsed into; applied only where counted
};

void add_common_options(CLI::App& app, Overrides& ov) {
    app.add_option("--config", ov.config_path, "JSON config file; flags override its fields")
        ->check(CLI::ExistingFile);
    app.add_option("--data-dir", ov.flags.data_dir, "fleet CSV directory");
    app.add_option("--model-dir", ov.flags.model_dir, "pretrained model directory");
    app.add_option("--report-dir", ov.flags.report_dir, "evaluation output directory");
    app.add_option("--seed", ov.flags.seed, "master seed for generation and training");
    app.add_option("--start", ov.flags.start, "first generated day, ISO-8601 UTC");
    app.add_option("--days", ov.flags.days, "generated span in days");
    app.add_option("--test-start", ov.flags.test_start, "pretrain/test boundary, ISO-8601 UTC");
    app.add_option("--cycle-days", ov.flags.cycle_days, "weight adaptation cadence in days");
    app.add_option("--window-samples", ov.flags.window_samples, "weight optimization window size");
    app.add_option("--max-trials", ov.flags.max_trials, "configuration search trial cap");
    app.add_flag("--no-adaptation{false},--adaptation{true}", ov.flags.adaptation_enabled,
                 "toggle cyclic weight adaptation");
    app.add_option("--threads", ov.flags.threads, "worker threads, 0 = hardware concurrency");
}

autopv::RunConfig resolve_config(const CLI::App& app, const Overrides& ov) {
    autopv::RunConfig cfg;
    if (!ov.config_path.empty()) cfg = autopv::RunConfig::from_file(ov.config_path);
    const auto apply = [&](const std::string& flag, auto member) {
        if (app.count(flag) > 0) cfg.*member = ov.flags.*member;
    };
    apply("--data-dir", &autopv::RunConfig::data_dir);
    apply("--model-dir", &autopv::RunConfig::model_dir);
    apply("--report-dir", &autopv::RunConfig::report_dir);
    apply("--seed", &autopv::RunConfig::seed);
    apply("--start", &autopv::RunConfig::start);
    apply("--days", &autopv::RunConfig::days);
    apply("--test-start", &autopv::RunConfig::test_start);
    apply("--cycle-days", &autopv::RunConfig::cycle_days);
    apply("--window-samples", &autopv::RunConfig::window_samples);
    apply("--max-trials", &autopv::RunConfig::max_trials);
    apply("--threads", &autopv::RunConfig::threads);
    if (app.count("--no-adaptation") > 0 || app.count("--adaptation") > 0) {
        cfg.adaptation_enabled = ov.flags.adaptation_enabled;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pool-based PV power forecasting: synthetic fleet, training, replay, evaluation"};
    app.require_subcommand(1);

    Overrides ov;
    ov.flags = autopv::RunConfig{};
    add_common_options(app, ov);

    // verbs share the parent's option set; unmatched flags fall through
    CLI::App* generate = app.add_subcommand("generate", "build the synthetic fleet CSVs");
    generate->fallthrough();
    CLI::App* pretrain = app.add_subcommand("pretrain", "train one pool model per plant");
    pretrain->fallthrough();
    CLI::App* simulate = app.add_subcommand("simulate", "day-ahead replay for one target plant");
    simulate->fallthrough();
    autopv::SimulateArgs sim_args;
    simulate->add_option("--target", sim_args.target_id, "plant id to forecast")->required();
    simulate->add_option("--truncate-after-day", sim_args.truncate_after_day,
                         "drop test data after this many days (causality checks)");
    CLI::App* evaluate = app.add_subcommand("evaluate", "leave-one-out comparison of all methods");
    evaluate->fallthrough();
    std::string report_file;
    CLI::App* report = app.add_subcommand("report", "render a JSON report as text");
    report->fallthrough();
    report->add_option("--in", report_file, "report JSON path (default: <report-dir>/report.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        const autopv::RunConfig cfg = resolve_config(app, ov);
        if (generate->parsed()) autopv::cmd_generate(cfg, std::cout);
        if (pretrain->parsed()) autopv::cmd_pretrain(cfg, std::cout);
        if (simulate->parsed()) autopv::cmd_simulate(cfg, sim_args, std::cout);
        if (evaluate->parsed()) autopv::cmd_evaluate(cfg, std::cout);
        if (report->parsed()) autopv::cmd_report(cfg, report_file, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "autopv: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
