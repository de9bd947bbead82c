#pragma once

#include "autopv/ensemble.hpp"
#include "autopv/metrics.hpp"
#include "autopv/synth.hpp"

namespace autopv {

/// Time boundaries of an experiment: history the pool may learn from and the
/// held-out stretch every method is scored on.
struct EvalSplit {
    Timestamp pretrain_start = 0;
    Timestamp test_start = 0;  // also pretrain end
    Timestamp test_end = 0;

    void validate() const;
};

enum class DataPeriod { Pretrain, Test };

/// A record sliced to one period, carrying where it came from so training
/// code can assert it never touches the wrong side of the split.
struct TaggedRecord {
    PlantRecord rec;
    DataPeriod period = DataPeriod::Pretrain;
};

TaggedRecord slice_period(const PlantRecord& rec, const EvalSplit& split, DataPeriod period);
void require_period(const TaggedRecord& tagged, DataPeriod expected, const char* context);

/// nMAE per compared method, one row of the report.
struct MethodScores {
    double im_hda = 0.0;    // plant's own model, trained on its history
    double im_it = 0.0;     // individual model retrained during the test period
    double averaging = 0.0; // pool mean, never adapted
    double autopv = 0.0;    // pool with cyclically optimized weights
};

/// Forecast curves over the test stretch, for plot-ready output. Kept in
/// memory only; the JSON report carries scores and weight logs, not curves.
struct MethodCurves {
    TimeSeries actual_kw;
    TimeSeries im_hda_kw;
    TimeSeries im_it_kw;
    TimeSeries averaging_kw;
    TimeSeries autopv_kw;
};

struct PlantEvaluation {
    std::string plant_id;
    MethodScores scores;
    std::vector<WeightLogEntry> weight_log;  // one entry per adaptation cycle
    MethodCurves curves;
};

struct EvaluationReport {
    std::vector<PlantEvaluation> plants;
    MethodScores mean;
    std::uint64_t seed = 0;
    int cycle_days = 28;
    std::size_t window_samples = 28 * static_cast<std::size_t>(kSamplesPerDay);
    EvalSplit split;

    nlohmann::json to_json() const;
    static EvaluationReport from_json(const nlohmann::json& j);
    /// Fixed-width table, one plant per row plus the mean.
    std::string to_text() const;
};

struct EvalOptions {
    int cycle_days = 28;
    std::size_t window_samples = 28 * static_cast<std::size_t>(kSamplesPerDay);
    // with adaptation off the pool keeps equal weights, which must reproduce
    // the averaging method exactly
    bool adaptation_enabled = true;
    CashOptions cash;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Per plant: train the pool on everyone else's history, then forecast the
/// plant's test stretch with all four methods.
EvaluationReport run_leave_one_out(std::span<const PlantRecord> fleet, const EvalSplit& split,
                                   std::uint64_t seed, const EvalOptions& options = {});

struct SimulationResult {
    TimeSeries forecast_kw;
    std::vector<WeightLogEntry> weight_log;
};

/// Day-ahead replay of one target plant against a fixed pool: cold-start
/// with equal weights, re-optimize at every completed cycle boundary, and
/// forecast each cycle with the weights fixed before it began. Forecasts
/// never read measurements from their own or a later cycle, so truncating
/// the input after a boundary leaves everything before it untouched.
SimulationResult simulate_target(const ModelPool& pool, const TaggedRecord& test,
                                 const EvalOptions& options = {});

/// Same protocol with the plant's own model kept in the pool; reports how
/// much weight the adaptation gives it.
struct ConsistencyResult {
    std::string plant_id;
    std::size_t own_index = 0;  // position of the plant's own model in the pool
    double own_mean_weight = 0.0;  // across adapted cycles
    double autopv_nmae = 0.0;
    std::vector<WeightLogEntry> weight_log;
};

std::vector<ConsistencyResult> run_consistency(std::span<const PlantRecord> fleet, const EvalSplit& split,
                                               std::uint64_t seed, const EvalOptions& options = {});

}  // namespace autopv
