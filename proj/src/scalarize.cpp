#include "modfl/scalarize.hpp"

#include <cmath>

namespace mdfl {

WeightVector::WeightVector(Vec weights) : w(std::move(weights)) {
    if (w.size() < 1) throw dimension_error("WeightVector: empty");
    if (w.minCoeff() < 0.0) throw config_error("WeightVector: negative weight");
    if (std::abs(w.sum() - 1.0) > 1e-12) throw config_error("WeightVector: weights must sum to 1");
}

NormalizedVector instance_normalize(const Vec& y) {
    if (y.size() < 2) throw dimension_error("instance_normalize: need at least 2 entries");
    NormalizedVector out;
    out.mean = y.mean();
    const Vec centered = y.array() - out.mean;
    out.stddev = std::sqrt(centered.squaredNorm() / static_cast<double>(y.size()));
    if (out.stddev < 1e-12) {
        out.values = Vec::Zero(y.size());
        out.stddev = 0.0;
        out.degenerate = true;
    } else {
        out.values = centered / out.stddev;
    }
    return out;
}

NormalizedCosts normalize_costs(const std::vector<Vec>& costs) {
    NormalizedCosts out;
    out.per_objective.reserve(costs.size());
    for (const auto& y : costs) out.per_objective.push_back(instance_normalize(y));
    return out;
}

Vec instance_normalize_backward(const NormalizedVector& fwd, const Vec& grad_out) {
    if (grad_out.size() != fwd.values.size())
        throw dimension_error("instance_normalize_backward: gradient length mismatch");
    if (fwd.degenerate) return Vec::Zero(grad_out.size());
    // BN(y) = (y - mu) / sigma with population sigma. Standard normalization
    // backward: dy = (g - mean(g) - BN * mean(g .* BN)) / sigma.
    const double gm = grad_out.mean();
    const double gb = (grad_out.array() * fwd.values.array()).mean();
    return (grad_out.array() - gm - fwd.values.array() * gb).matrix() / fwd.stddev;
}

Vec weighted_cost(const NormalizedCosts& normalized, const WeightVector& w) {
    if (w.size() != normalized.n_objectives())
        throw dimension_error("weighted_cost: " + std::to_string(w.size()) + " weights for " +
                              std::to_string(normalized.n_objectives()) + " objectives");
    if (normalized.n_objectives() == 0) throw dimension_error("weighted_cost: no objectives");
    Vec c = Vec::Zero(normalized.per_objective[0].values.size());
    for (int j = 0; j < w.size(); ++j) c += w.w[j] * normalized.per_objective[j].values;
    return c;
}

std::vector<WeightVector> weight_grid(int t_objectives, int denom) {
    if (t_objectives < 2) throw config_error("weight_grid: need at least 2 objectives");
    if (denom < 1) throw config_error("weight_grid: denom must be >= 1");
    std::vector<WeightVector> grid;
    std::vector<int> w(t_objectives, 0);
    // Lexicographic enumeration of integer tuples summing to denom.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == t_objectives - 1) {
            w[pos] = remaining;
            Vec v(t_objectives);
            for (int i = 0; i < t_objectives; ++i) v[i] = static_cast<double>(w[i]) / denom;
            grid.emplace_back(std::move(v));
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            w[pos] = k;
            self(self, pos + 1, remaining - k);
        }
    };
    rec(rec, 0, denom);
    return grid;
}

WeightVector uniform_weights(int t_objectives) {
    if (t_objectives < 1) throw config_error("uniform_weights: need at least 1 objective");
    return WeightVector(Vec::Constant(t_objectives, 1.0 / t_objectives));
}

}  // namespace mdfl
