#pragma once

#include <stdexcept>
#include <string>

namespace mdfl {

// Shape/length mismatches between vectors, matrices, weights, ...
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed instance files, checkpoints, Cora rows.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// LP/QP/KKT failures: infeasible, unbounded, non-convergence, singular systems.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration values (negative lambdas, infeasible delta/thr, ...).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Violated API contracts (reused tape, empty Pareto set, empty front).
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace mdfl
