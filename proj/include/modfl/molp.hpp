#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <filesystem>
#include <string>
#include <vector>

#include "modfl/errors.hpp"

namespace mdfl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

enum class Orientation { Min, Max };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// An objective vector is one point in R^T; kept as a plain Eigen vector.
using ObjectiveVector = Vec;

// One parametric multi-objective LP instance.
//
// Costs are stored minimization-ready: generators negate the coefficients of
// maximization problems at ingest, and `orientation` records the native sense
// so metrics can report in it. All dominance, solving and filtering inside
// the library therefore runs in a single (min) convention.
struct MOLPInstance {
    int id = 0;
    Mat features;                  // one row of context features per decision variable
    std::vector<Vec> costs;        // T cost vectors, each of length n
    SpMat A;                       // m x n constraint matrix, rows A_i pi <= b_i
    Vec b;                         // length m
    Vec lower, upper;              // per-variable bounds, default [0, 1]
    Orientation orientation = Orientation::Min;
    std::vector<Vec> pareto_set;   // representative optimal solutions pi*
    std::vector<Vec> pareto_front; // objective vectors of pareto_set, same order

    int n_vars() const { return costs.empty() ? 0 : static_cast<int>(costs[0].size()); }
    int n_objectives() const { return static_cast<int>(costs.size()); }
    int n_rows() const { return static_cast<int>(b.size()); }
};

struct DatasetMeta {
    std::string benchmark;              // "ad_alloc" | "bipartite" | "cora" | ...
    bool costs_are_probabilities = false;
    std::uint64_t seed = 0;
};

struct Dataset {
    std::vector<MOLPInstance> instances;
    std::vector<int> train_idx, val_idx, test_idx;
    DatasetMeta meta;
};

// A finite, Pareto-filtered set of objective vectors.
struct FrontApproximation {
    std::vector<ObjectiveVector> points;
    Orientation orientation = Orientation::Min;
    enum class Source { Predicted, True, Unspecified } source = Source::Unspecified;
};

// True iff phi dominates psi: componentwise no worse with at least one
// strict improvement, after canonicalizing to minimization.
bool dominates(const ObjectiveVector& phi, const ObjectiveVector& psi, Orientation o);

// Non-dominated subset; duplicate vectors collapse to their first occurrence.
FrontApproximation pareto_filter(const std::vector<ObjectiveVector>& points, Orientation o);

// [y^1 . pi, ..., y^T . pi] on the stored (minimization-ready) costs.
ObjectiveVector evaluate_objectives(const MOLPInstance& instance, const Vec& pi);

// A pi <= b + tol and bounds within tol.
bool check_feasible(const MOLPInstance& instance, const Vec& pi, double tol = 1e-8);

// Throws if any MOLPInstance invariant is violated (lengths, front/set
// consistency within 1e-9, pareto_set feasibility within 1e-8).
void validate_instance(const MOLPInstance& instance);

// Throws if splits are not disjoint or do not cover all instance indices.
void validate_dataset(const Dataset& dataset);

// Self-describing JSON document; see README for the schema.
MOLPInstance read_instance(const std::filesystem::path& path);
void write_instance(const MOLPInstance& instance, const std::filesystem::path& path);

}  // namespace mdfl
