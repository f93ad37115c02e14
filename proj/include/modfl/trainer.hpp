#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "modfl/losses.hpp"
#include "modfl/molp.hpp"
#include "modfl/predictor.hpp"

namespace mdfl {

// Per-instance pool S of feasible solutions feeding the landscape loss.
// Inserts deduplicate at L-inf 1e-7, assert feasibility (tol 1e-6) and evict
// FIFO once capacity is reached.
class SolutionCache {
  public:
    SolutionCache(std::size_t n_instances, int capacity = 50);

    // Returns false when the solution deduplicates away. Throws
    // contract_error on an infeasible insert.
    bool insert(std::size_t instance_index, const MOLPInstance& instance, const Vec& solution);

    const std::vector<Vec>& solutions(std::size_t instance_index) const;
    std::vector<int> sizes() const;
    int capacity() const { return capacity_; }

  private:
    std::vector<std::vector<Vec>> pools_;
    int capacity_;
};

struct TrainConfig {
    double lr = 0.1;
    int batch_size = 8;
    int max_epochs = 50;
    int patience = 5;
    double gamma = 0.35;
    std::array<double, 3> lambdas{1.0, 2.0, 5.0};  // lambda_l, lambda_d, lambda_ps
    double p_solve = 1.0;
    std::uint64_t seed = 0;

    int cache_capacity = 50;
    int refresh_weights = 3;  // random grid weights solved per p_solve trigger
    int denom = 5;
    double clip_norm = 10.0;

    // Ablation switches: zero one loss component (identical to removing it).
    bool ablate_landscape = false;
    bool ablate_decision = false;
    bool ablate_pareto_set = false;
    bool decision_loss_raw = false;

    // Diagnostic: bypass the network and predict the true coefficients.
    bool oracle_predictor = false;

    // Landscape-loss OT budgets (recorded with every run).
    double ot_epsilon = 1e-5;
    double ot_tau = 0.5;
    double ot_anneal_start = 1e-1;
    int ot_anneal_iters = 100;
    int ot_final_iters = 200;

    int trunk_width = 64;
    int head_width = 64;
};

struct EpochRecord {
    int epoch = 0;
    double train_landscape = 0.0;
    double train_decision = 0.0;
    double train_pareto_set = 0.0;
    double train_total = 0.0;
    double val_total = 0.0;
    std::vector<int> cache_sizes;
    double wall_time_s = 0.0;
};

struct TrainResult {
    PredictorParams params;  // best-validation snapshot
    std::vector<EpochRecord> log;
    int best_epoch = 0;
    int solver_failures = 0;
    int landscape_skips = 0;  // instances whose cache was too small
};

// Cache initialized from each instance's precomputed Pareto solutions;
// instances left with fewer than two entries are flagged on stderr (the
// landscape loss skips them).
SolutionCache seed_cache(const Dataset& dataset, int capacity = 50);

// Algorithm: per instance predict, normalize + uniform-weight scalarize,
// differentiable-solve at gamma, refresh the cache from the predicted problem
// with probability p_solve, combine the three losses, backpropagate;
// gradients average over batches of `batch_size` instances before each SGD
// step. Early stopping on validation total loss with the given patience.
TrainResult train_modfl(const Dataset& dataset, const TrainConfig& config);

// Identical predictor and optimizer; the loss is prediction accuracy, summed
// uniformly over objectives: mean squared error, or binary cross-entropy when
// the benchmark marks costs as probabilities.
TrainResult train_twostage(const Dataset& dataset, const TrainConfig& config);

// JSON-lines: one record per epoch.
void write_train_log(const std::vector<EpochRecord>& log, const std::filesystem::path& path);

}  // namespace mdfl
