#pragma once

#include <vector>

#include "modfl/molp.hpp"

namespace mdfl {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

std::string to_string(SolveStatus s);

struct LPSolution {
    Vec primal;
    Vec row_duals;    // lambda >= 0 for A pi <= b
    Vec lower_duals;  // mu >= 0 for pi >= lo
    Vec upper_duals;  // mu >= 0 for pi <= hi
    double objective = 0.0;
    SolveStatus status = SolveStatus::Optimal;
    int iterations = 0;
};

// Exact vertex solution of min c.pi s.t. A pi <= b, lo <= pi <= hi, by a
// dense bounded-variable revised simplex. Deterministic: Dantzig pricing with
// smallest-index tie-breaks, switching to Bland's rule on stalling. Every
// variable needs at least one finite bound. Infeasible/unbounded problems are
// reported in the returned status, never silently.
LPSolution solve_lp(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo, const Vec& hi);

// Unique optimum of the strictly convex QP min c.pi + gamma*|pi|^2 subject to
// the same constraints, by a primal-dual interior-point method with Mehrotra
// predictor-corrector steps. Throws solver_error with a residual report if
// KKT residuals have not reached 1e-8 within max_iter iterations.
LPSolution solve_qp_regularized(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo,
                                const Vec& hi, double gamma, double tol = 1e-10,
                                int max_iter = 100);

struct MultiObjectiveSolution {
    std::vector<Vec> pareto_set;              // deduplicated, non-dominated solutions
    std::vector<ObjectiveVector> pareto_front; // objective vectors, same order
};

// Weighted-sum enumeration: solves the LP for every weight_grid(T, denom)
// scalarization of the instance-normalized true costs, deduplicates solutions
// (L-inf 1e-7) and Pareto-filters the resulting objective vectors.
MultiObjectiveSolution solve_multiobjective(const MOLPInstance& instance, int denom = 5);

}  // namespace mdfl
