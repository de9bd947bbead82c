#pragma once

#include <iosfwd>

#include "autopv/evaluation.hpp"
#include "autopv/run_config.hpp"

namespace autopv {

/// Builds the configured synthetic fleet and writes it as CSVs + manifest.
void cmd_generate(const RunConfig& cfg, std::ostream& out);

/// Trains one model per plant on the pretraining period and writes the
/// serialized pool, per-plant model bundles, and search trial logs.
void cmd_pretrain(const RunConfig& cfg, std::ostream& out);

struct SimulateArgs {
    std::string target_id;
    int truncate_after_day = 0;  // 0: replay the whole test stretch
};

/// Replays the test period day-ahead for one target plant using the
/// pretrained pool (the target's own model, if present, is left out) and
/// writes the forecast plus the weight evolution log.
void cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out);

/// Leave-one-out comparison of all four methods over the fleet; writes the
/// report (JSON and text) and plot-ready weight/curve CSVs.
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);

/// Renders a previously written JSON report as the text table.
void cmd_report(const RunConfig& cfg, const std::filesystem::path& report_file, std::ostream& out);

/// Split implied by the config and the fleet on disk: pretraining from the
/// earliest sample to test_start, testing from test_start to the last.
EvalSplit config_split(const RunConfig& cfg, std::span<const PlantRecord> fleet);

}  // namespace autopv
