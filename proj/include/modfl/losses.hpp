#pragma once

#include <array>
#include <vector>

#include "modfl/molp.hpp"
#include "modfl/ot_rank.hpp"

namespace mdfl {

// L_l = srmmd({f(BN(y), pi_i)}, {f(BN(y_hat), pi_i)}) over cached solutions.
// Both branches evaluate instance-normalized costs so objectives of different
// magnitude compare on one scale. Cache solutions are constants; the gradient
// flows only through the predicted branch and is returned with respect to the
// raw predicted cost vectors (chained through the normalization).
struct LandscapeLossResult {
    double value = 0.0;
    std::vector<Vec> grad_predicted;  // one vector per objective, length n
    bool skipped = false;             // cache too small, contributes 0
    int sinkhorn_iterations = 0;
};

LandscapeLossResult landscape_loss(const MOLPInstance& instance,
                                   const std::vector<Vec>& predicted_costs,
                                   const std::vector<Vec>& cache_solutions,
                                   const SRMMDConfig& ot_config, bool with_gradient = true);

// Euclidean distance from pi_hat to the nearest representative true-Pareto
// solution (first-listed point wins ties). The value is the exact distance;
// only the gradient uses the sqrt(d^2 + 1e-12) smoothing so it is defined at
// an exact hit.
struct ParetoSetLossResult {
    double value = 0.0;
    Vec grad_pi;
    int nearest_index = 0;
};

ParetoSetLossResult pareto_set_loss(const Vec& pi_hat, const std::vector<Vec>& pareto_set);

// L_d = (1/T) sum_j BN(y^j) . pi_hat on instance-normalized true costs
// (minimization orientation); `use_raw_costs` switches to the raw vectors.
struct DecisionLossResult {
    double value = 0.0;
    Vec grad_pi;
};

DecisionLossResult decision_loss(const MOLPInstance& instance, const Vec& pi_hat,
                                 bool use_raw_costs = false);

struct LossComponents {
    double landscape = 0.0;
    double decision = 0.0;
    double pareto_set = 0.0;
};

struct LossReport {
    LossComponents mean;  // batch means per component
    double total = 0.0;   // lambda_l * L_l + lambda_d * L_d + lambda_ps * L_ps
    std::array<double, 3> lambdas{1.0, 2.0, 5.0};
    std::vector<LossComponents> per_instance;
};

// Weighted combination; an ablated component is zeroed via its lambda.
LossReport total_loss(const std::vector<LossComponents>& per_instance,
                      const std::array<double, 3>& lambdas = {1.0, 2.0, 5.0});

}  // namespace mdfl
