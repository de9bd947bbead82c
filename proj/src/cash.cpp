#include "autopv/cash.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "autopv/errors.hpp"

namespace autopv {

namespace {

// population std of the kPlateauTopK smallest validation MSEs among the
// first n trials; requires n >= kPlateauTopK
double top_k_std(std::span<const TrialRecord> trials, std::size_t n) {
    std::vector<double> mses(n);
    for (std::size_t i = 0; i < n; ++i) mses[i] = trials[i].validation_mse;
    std::partial_sort(mses.begin(), mses.begin() + kPlateauTopK, mses.end());
    double mean = 0.0;
    for (int i = 0; i < kPlateauTopK; ++i) mean += mses[static_cast<std::size_t>(i)];
    mean /= kPlateauTopK;
    double var = 0.0;
    for (int i = 0; i < kPlateauTopK; ++i) {
        const double d = mses[static_cast<std::size_t>(i)] - mean;
        var += d * d;
    }
    return std::sqrt(var / kPlateauTopK);
}

bool qualifying(std::span<const TrialRecord> trials, std::size_t n) {
    if (n < static_cast<std::size_t>(kPlateauTopK)) return false;
    return top_k_std(trials, n) < kPlateauStdThreshold;
}

// length of the trailing run of completions whose top-10 std stayed below
// the threshold
int trailing_qualifying_run(std::span<const TrialRecord> trials) {
    int run = 0;
    for (std::size_t n = trials.size(); n > 0; --n) {
        if (!qualifying(trials, n)) break;
        ++run;
    }
    return run;
}

}  // namespace

bool plateau_stop(std::span<const TrialRecord> trials) {
    // the establishing completion plus kPlateauPatience that hold it
    return trailing_qualifying_run(trials) >= kPlateauPatience + 1;
}

RandomSearchSampler::RandomSearchSampler()
    : kinds_{EstimatorKind::Ridge, EstimatorKind::Mlp, EstimatorKind::GradientBoosting,
             EstimatorKind::RandomForest} {}

RandomSearchSampler::RandomSearchSampler(std::vector<EstimatorKind> kinds) : kinds_(std::move(kinds)) {
    if (kinds_.empty()) throw ConfigError("sampler needs at least one estimator kind");
}

EstimatorSpec RandomSearchSampler::sample(Rng& rng, int trial_index) {
    (void)trial_index;
    EstimatorSpec spec;
    spec.kind = kinds_[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(kinds_.size()) - 1))];
    switch (spec.kind) {
        case EstimatorKind::Ridge:
            spec.alpha = rng.log_uniform(0.05, 1.0);
            break;
        case EstimatorKind::Mlp: {
            const auto layers = rng.uniform_int(1, 3);
            spec.hidden_layer_sizes.clear();
            for (std::int64_t l = 0; l < layers; ++l) {
                spec.hidden_layer_sizes.push_back(static_cast<int>(rng.uniform_int(10, 100)));
            }
            const std::int64_t act = rng.uniform_int(0, 2);
            spec.activation = act == 0   ? MlpActivation::Logistic
                              : act == 1 ? MlpActivation::Tanh
                                         : MlpActivation::Relu;
            break;
        }
        case EstimatorKind::GradientBoosting:
            spec.learning_rate = rng.log_uniform(0.01, 1.0);
            spec.n_estimators = static_cast<int>(rng.uniform_int(10, 300));
            spec.max_depth = static_cast<int>(rng.uniform_int(1, 10));
            break;
        case EstimatorKind::RandomForest:
            spec.n_estimators = static_cast<int>(rng.uniform_int(10, 300));
            spec.max_depth = static_cast<int>(rng.uniform_int(1, 10));
            break;
    }
    spec.validate();
    return spec;
}

CashResult run_cash(const Matrix& x_train, std::span<const double> y_train, const Matrix& x_val,
                    std::span<const double> y_val, std::uint64_t seed, const CashOptions& options) {
    if (x_val.rows == 0) throw InsufficientDataError("validation split is empty");
    if (x_val.rows != y_val.size()) throw ShapeError("validation target length does not match rows");
    if (options.max_trials < 1) throw ConfigError("max_trials must be at least 1");

    std::shared_ptr<TrialSampler> sampler = options.sampler;
    if (!sampler) sampler = std::make_shared<RandomSearchSampler>();

    Rng rng(derive_seed(seed, "cash"));
    CashResult result;
    result.state.rng_seed = seed;
    double best_mse = std::numeric_limits<double>::infinity();
    std::vector<std::string> causes;

    for (int attempt = 1; attempt <= options.max_trials; ++attempt) {
        EstimatorSpec spec = sampler->sample(rng, attempt);
        spec.seed = derive_seed(seed, "trial", static_cast<std::uint64_t>(attempt));

        const auto started = std::chrono::steady_clock::now();
        std::unique_ptr<Estimator> fitted;
        try {
            fitted = fit_estimator(spec, x_train, y_train);
        } catch (const std::exception& e) {
            causes.push_back("trial " + std::to_string(attempt) + " " + spec.describe() + ": " + e.what());
            continue;
        }

        // score as the pipeline will be used: negatives clipped first
        const std::vector<double> raw = fitted->predict(x_val);
        double sse = 0.0;
        for (std::size_t r = 0; r < raw.size(); ++r) {
            const double e = std::max(0.0, raw[r]) - y_val[r];
            sse += e * e;
        }
        const double mse = sse / static_cast<double>(raw.size());
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

        result.state.trials.push_back(TrialRecord{attempt, spec, mse, elapsed.count()});
        if (mse < best_mse) {
            best_mse = mse;
            result.state.best = static_cast<int>(result.state.trials.size()) - 1;
            result.estimator = std::move(fitted);
        }
        if (plateau_stop(result.state.trials)) break;
    }

    if (result.state.trials.empty()) {
        throw SearchFailedError(std::move(causes));
    }
    result.state.patience_counter = trailing_qualifying_run(result.state.trials);
    return result;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> chronological_split(std::size_t n_rows) {
    if (n_rows < 2) throw InsufficientDataError("need at least 2 rows to split");
    const std::size_t val_n = std::max<std::size_t>(1, n_rows / 5);
    const std::size_t train_n = n_rows - val_n;
    std::vector<std::size_t> train(train_n);
    std::vector<std::size_t> val(val_n);
    for (std::size_t i = 0; i < train_n; ++i) train[i] = i;
    for (std::size_t i = 0; i < val_n; ++i) val[i] = train_n + i;
    return {std::move(train), std::move(val)};
}

std::string trial_log_jsonl(const SearchState& state) {
    std::ostringstream out;
    for (const TrialRecord& t : state.trials) {
        const nlohmann::json j{
            {"index", t.index},
            {"spec", t.spec.to_json()},
            {"validation_mse", t.validation_mse},
        };
        out << j.dump() << '\n';
    }
    return out.str();
}

SearchState trial_log_from_jsonl(const std::string& text) {
    SearchState state;
    std::istringstream in(text);
    std::string line;
    double best = std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        TrialRecord t;
        t.index = j.at("index").get<int>();
        t.spec = EstimatorSpec::from_json(j.at("spec"));
        t.validation_mse = j.at("validation_mse").get<double>();
        state.trials.push_back(std::move(t));
        if (state.trials.back().validation_mse < best) {
            best = state.trials.back().validation_mse;
            state.best = static_cast<int>(state.trials.size()) - 1;
        }
    }
    state.patience_counter = trailing_qualifying_run(state.trials);
    return state;
}

}  // namespace autopv
