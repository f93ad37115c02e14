#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modfl/molp.hpp"

namespace mdfl {

// Oracle primitives, deliberately independent of the solver/metric code they
// cross-check: enumeration and sampling only.

// All vertices of {A x <= b, lo <= x <= hi} by enumerating active sets
// (n rows chosen among constraint rows and bound rows). Intended for n <= 8.
std::vector<Vec> enumerate_vertices(const Mat& a_dense, const Vec& b, const Vec& lo,
                                    const Vec& hi, double feas_tol = 1e-9);

// Indices of the non-dominated points by pairwise checks with tolerance:
// q dominates p iff q <= p + tol everywhere and q < p - tol somewhere.
std::vector<int> brute_force_pareto(const std::vector<ObjectiveVector>& points,
                                    Orientation orientation, double tol = 0.0);

// Monte-Carlo hypervolume estimate from uniform samples in the
// reference-bounded box spanned by the front's ideal point.
double mc_hypervolume(const std::vector<ObjectiveVector>& front, const Vec& reference,
                      Orientation orientation, int samples, std::uint64_t seed);

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// One suite per acceptance criterion. `corrupt_dslp_sign` is a negative
// control that flips the analytic Jacobian's sign before comparison; the
// gradient suite must then fail.
SuiteResult verify_dslp_gradients(bool corrupt_sign = false);
SuiteResult verify_srmmd_suite();
SuiteResult verify_weighted_sum_pareto();
SuiteResult verify_metric_oracles();
SuiteResult verify_quadratic_example();
SuiteResult verify_perfect_prediction();
SuiteResult verify_integrality();
SuiteResult verify_directional();  // trains MoDFL vs TwoStage over 5 seeds; minutes
SuiteResult verify_determinism();

// The fast suites (everything except the directional run and the training
// determinism check) or, with `full`, all of them.
std::vector<SuiteResult> run_verification(bool full, bool corrupt_dslp_sign = false);

}  // namespace mdfl
