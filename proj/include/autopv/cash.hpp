#pragma once

#include <memory>

#include "autopv/estimator.hpp"
#include "autopv/rng.hpp"

namespace autopv {

struct TrialRecord {
    int index = 0;  // 1-based attempt number
    EstimatorSpec spec;
    double validation_mse = 0.0;
    // measured for operator feedback; persisted trial logs omit it so the
    // same search always serializes to the same bytes
    double wall_time_s = 0.0;
};

struct SearchState {
    std::vector<TrialRecord> trials;
    int best = -1;  // position in trials of the minimal validation_mse, ties by lower index
    std::uint64_t rng_seed = 0;
    int patience_counter = 0;  // trailing run of completions that kept the plateau condition
};

// Stopping rule constants: the search stops once the population standard
// deviation of the 10 best validation MSEs has stayed below the threshold
// for a patience of 15 completions beyond the one that established it.
inline constexpr int kPlateauTopK = 10;
inline constexpr double kPlateauStdThreshold = 1e-3;
inline constexpr int kPlateauPatience = 15;

/// Pure function of the completed-trial list, so a stop decision can be
/// replayed from a trial log. False whenever fewer than 10 trials exist.
bool plateau_stop(std::span<const TrialRecord> trials);

/// Configuration source for the search; index is the 1-based attempt number
/// so stateful samplers can adapt.
class TrialSampler {
public:
    virtual ~TrialSampler() = default;
    virtual EstimatorSpec sample(Rng& rng, int trial_index) = 0;
};

/// Uniform draws over the configuration space: alpha and learning_rate on a
/// log scale, integers on their inclusive ranges, estimator family uniform
/// over the allowed kinds.
class RandomSearchSampler : public TrialSampler {
public:
    RandomSearchSampler();
    explicit RandomSearchSampler(std::vector<EstimatorKind> kinds);
    EstimatorSpec sample(Rng& rng, int trial_index) override;

private:
    std::vector<EstimatorKind> kinds_;
};

struct CashOptions {
    int max_trials = 200;
    std::shared_ptr<TrialSampler> sampler;  // null: RandomSearchSampler over every kind
};

struct CashResult {
    std::unique_ptr<Estimator> estimator;
    SearchState state;
};

/// Samples configurations, fits each on the training rows, and scores
/// clipped predictions against the validation rows until the plateau rule
/// fires or max_trials is reached. The returned estimator is the best
/// trial's fit (trained on the training rows only).
CashResult run_cash(const Matrix& x_train, std::span<const double> y_train, const Matrix& x_val,
                    std::span<const double> y_val, std::uint64_t seed, const CashOptions& options = {});

/// Index lists (train, validation): the last fifth of the rows, at least
/// one, is held out.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> chronological_split(std::size_t n_rows);

/// One structured record per completed trial, newline-delimited.
std::string trial_log_jsonl(const SearchState& state);
SearchState trial_log_from_jsonl(const std::string& text);

}  // namespace autopv
