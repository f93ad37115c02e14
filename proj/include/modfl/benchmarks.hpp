#pragma once

#include <cstdint>
#include <filesystem>

#include "modfl/molp.hpp"

namespace mdfl {

// Costs as the benchmark defines them (maximization problems store negated
// coefficients; this undoes the negation for reporting and for training the
// predictor, which works in native cost space).
std::vector<Vec> native_costs(const MOLPInstance& instance);
double native_sign(const MOLPInstance& instance);

// Web advertisement allocation: ND queries, NC candidate ads with categories,
// one ad per query, per-category exposure targets delta_k +/- thr. True
// click-through and re-login probabilities come from two fixed random teacher
// networks through a sigmoid so the prediction task is learnable.
struct AdAllocConfig {
    int nd = 100;             // queries per instance
    int nc = 53;              // candidate advertisements
    int k_categories = 5;
    Vec delta;                // exposure targets, length k_categories
    double thr = 0.2;
    int feature_dim = 8;
    std::uint64_t seed = 0;
    int denom = 5;            // weight grid used to attach Pareto data
};

Dataset gen_ad_alloc(const AdAllocConfig& config, int count);

// Synthetic bipartite matching: NU = NV nodes per side, y^1 a Bernoulli
// adjacency from a teacher on concatenated node features, y^2 a perturbation
// of y^1. `Intent` flips entries with probability rho ("similar to y^1");
// `Literal` implements the printed formula, which flips with probability
// 1 - rho. An optional third objective mixes the first two with seeded
// U[0,1] weights.
struct BipartiteConfig {
    int nodes_per_side = 50;
    double rho = 0.05;
    int node_feature_dim = 10;
    int instances = 27;
    enum class PerturbMode { Intent, Literal } perturb_mode = PerturbMode::Intent;
    bool third_objective = false;
    std::uint64_t seed = 0;
    int denom = 5;
    // Target edge density of y^1. Citation graphs are sparse; dense random
    // adjacencies make one matching optimal for every weight and collapse the
    // Pareto front to a point. The teacher's logits are shifted to their
    // (1 - density) quantile before the Bernoulli draw.
    double density = 0.08;
};

Dataset gen_bipartite(const BipartiteConfig& config);

// Cora citation files (tab-separated): content rows "id w_1 ... w_W label",
// cites rows "cited citing". Partitions the graph greedily into
// `instances` sub-graphs of `nodes_per` nodes (trailing nodes dropped with a
// warning), splits each into two equal sides maximizing cross edges by
// randomized local search, and builds bipartite instances with y^1 the
// citation indicator. Edge features concatenate the endpoint word vectors.
Dataset load_cora(const std::filesystem::path& content_path,
                  const std::filesystem::path& cites_path, int instances = 27,
                  int nodes_per = 100, const BipartiteConfig& perturb = {});

// Analytic bi-objective quadratic f^1 = a1 pi^2 - a2 pi, f^2 = a1 pi^2 - a3 pi.
struct QuadraticExample {
    double a1 = 1.0;  // must be positive
    double a2 = 0.0;
    double a3 = 0.0;
    int n = 1;
    double eps_prec = 0.0;
};

struct QuadraticPareto {
    double lo = 0.0, hi = 0.0;       // analytic Pareto interval per coordinate
    double overlap_ratio = 0.0;      // (1 - eps_prec/|a2-a3|)^n
    bool degenerate = false;         // a2 == a3: single-point interval
};

QuadraticPareto quadratic_pareto_set(const QuadraticExample& example);

// Empirical confirmation on a 1-d grid: every grid point inside the interval
// is non-dominated among grid points and every point outside is dominated.
bool quadratic_grid_dominance_check(const QuadraticExample& example, double step = 1e-3,
                                    double margin = 0.5);

}  // namespace mdfl
