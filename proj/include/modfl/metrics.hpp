#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "modfl/molp.hpp"

namespace mdfl {

// Average percentage regret (sign arranged so better = smaller in either
// orientation): r_j averages (f_j(pi) - f_j(pi*_j)) / |f_j(pi*_j)| over every
// (instance, solution) pair on the stored minimization-ready costs, with
// pi*_j the single-objective optimum of raw objective j. Instances whose
// optimal value is zero are skipped and counted.
struct RegretResult {
    Vec per_objective;  // r_1 .. r_T
    double mean = 0.0;  // r
    int skipped_terms = 0;
};

RegretResult regret(const std::vector<const MOLPInstance*>& instances,
                    const std::vector<std::vector<Vec>>& solutions_per_instance);

// Generational distance: mean over predicted points of the minimum Euclidean
// distance to the true front.
double gd(const FrontApproximation& pred_front, const FrontApproximation& true_front);

// Maximum Pareto front error: max over true-front points of the minimum
// p-norm distance to the predicted front.
double mpfe(const FrontApproximation& pred_front, const FrontApproximation& true_front,
            double p = 2.0);

// Exact hypervolume dominated between `front` and `reference` (sweep for
// T = 2, slicing for T = 3). Points not weakly better than the reference are
// clipped out; `clipped` reports how many, when requested.
double hypervolume(const std::vector<ObjectiveVector>& front, const Vec& reference,
                   Orientation orientation, int* clipped = nullptr);

// Hyper-area ratio HV(pred) / HV(true); throws on zero true hypervolume.
double har(const FrontApproximation& pred_front, const FrontApproximation& true_front,
           const Vec& reference);

// Reference point for HV/HAR: coordinate j is the worst value of f_j over
// the single-objective optima {pi*_1, ..., pi*_T} (nadir of optima, the
// recorded default) or the best (ideal point).
enum class ReferenceRule { NadirOfOptima, Ideal };

Vec reference_point(const std::vector<ObjectiveVector>& single_objective_values,
                    Orientation orientation, ReferenceRule rule = ReferenceRule::NadirOfOptima);

struct MetricsRow {
    std::string method;
    double gd = 0.0;
    double mpfe = 0.0;
    double har = 0.0;
    Vec regret_per_objective;
    double regret_mean = 0.0;
};

// CSV with header "method,GD,MPFE,HAR,r1,...,rT,r".
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

}  // namespace mdfl
