#pragma once

#include <vector>

#include "modfl/molp.hpp"

namespace mdfl {

// Nonnegative weights over T objectives summing to 1.
struct WeightVector {
    Vec w;

    explicit WeightVector(Vec weights);
    int size() const { return static_cast<int>(w.size()); }
};

// Result of instance-normalizing one coefficient vector: (y - mean) / std
// with the population standard deviation. A zero-variance input maps to the
// zero vector with `degenerate` set instead of dividing by a clamped epsilon.
struct NormalizedVector {
    Vec values;
    double mean = 0.0;
    double stddev = 0.0;   // population std actually used (0 when degenerate)
    bool degenerate = false;
};

struct NormalizedCosts {
    std::vector<NormalizedVector> per_objective;

    int n_objectives() const { return static_cast<int>(per_objective.size()); }
};

NormalizedVector instance_normalize(const Vec& y);
NormalizedCosts normalize_costs(const std::vector<Vec>& costs);

// Pullback of a gradient through instance_normalize: given dL/dBN(y),
// returns dL/dy. Degenerate inputs have zero gradient.
Vec instance_normalize_backward(const NormalizedVector& fwd, const Vec& grad_out);

// c = sum_j w_j * BN(y^j). The uniform weight reproduces f_w.
Vec weighted_cost(const NormalizedCosts& normalized, const WeightVector& w);

// All w/denom with nonnegative integer w summing to denom, in lexicographic
// order of the integer tuples; C(denom+T-1, T-1) vectors.
std::vector<WeightVector> weight_grid(int t_objectives, int denom = 5);

WeightVector uniform_weights(int t_objectives);

}  // namespace mdfl
