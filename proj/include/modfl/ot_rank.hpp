#pragma once

#include <cstdint>
#include <vector>

#include "modfl/molp.hpp"

namespace mdfl {

// Gaussian mixture kernel k(a,b) = mean_sigma exp(-|a-b|^2 / (2 sigma^2)).
struct KernelSpec {
    std::vector<double> bandwidths{1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
};

double kernel_eval(const KernelSpec& kernel, const Vec& a, const Vec& b);

struct EntropicPotentials {
    Vec u;  // source potentials
    Vec v;  // target potentials
    double epsilon = 0.0;
    int iterations = 0;
    double marginal_violation = 0.0;
};

// Log-domain Sinkhorn between two uniform-weighted point clouds with cost
// 0.5 |phi - psi|^2. Runs until the max marginal deviation drops below tol or
// max_iter is reached; both are reported in the result.
EntropicPotentials sinkhorn(const Mat& source, const Mat& target, double epsilon, int max_iter,
                            double tol);

// Sample-based soft rank map: softmax-weighted average of target samples with
// logits (v_i - 0.5 |phi - psi_i|^2) / epsilon.
struct SoftRankMap {
    Mat target_samples;  // N x d
    Vec v;
    double epsilon = 0.0;
};

Vec soft_rank(const SoftRankMap& map, const Vec& phi);

// Configuration for the sRMMD statistic. Raw Sinkhorn at epsilon = 1e-5
// underflows immediately, so the solve anneals epsilon from anneal_start down
// by decades to the target with warm-started potentials, then runs final_iters
// more. Gradients are defined through this fixed unrolled graph, so the
// budgets are part of the statistic's definition and are recorded in results.
struct SRMMDConfig {
    double tau = 0.5;
    double epsilon = 1e-5;
    double anneal_start = 1e-1;
    int anneal_iters = 100;  // per annealing stage
    int final_iters = 200;   // at the target epsilon
    KernelSpec kernel;
    std::uint64_t seed = 0;  // uniform target sampling
};

struct SRMMDResult {
    double value = 0.0;
    bool degenerate = false;  // all pooled samples identical
    int iterations = 0;
    double marginal_violation = 0.0;
};

struct SRMMDGradient {
    SRMMDResult result;
    Mat grad_x;  // d srmmd / d X, same shape as X
    Mat grad_y;
};

// Kernel MMD^2 between the soft-rank images of X and Y (rows are samples).
// One rank map is fitted on the pooled tau-mixture of the m+n points against
// N = m+n seeded uniform targets; the result is clamped at zero.
SRMMDResult srmmd(const Mat& x, const Mat& y, const SRMMDConfig& config);

// Exact gradient of the truncated computational graph (unrolled
// fixed-iteration Sinkhorn + rank map + kernel sums).
SRMMDGradient srmmd_grad(const Mat& x, const Mat& y, const SRMMDConfig& config);

}  // namespace mdfl
