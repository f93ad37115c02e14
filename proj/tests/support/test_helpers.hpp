#pragma once

#include <functional>

#include "modfl/molp.hpp"
#include "modfl/rng.hpp"

namespace mdfl::testing {

// Central finite difference of a scalar function at x along coordinate k.
inline double central_diff(const std::function<double(const Vec&)>& f, const Vec& x, int k,
                           double h = 1e-5) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    return (f(xp) - f(xm)) / (2.0 * h);
}

inline bool close_rel(double got, double want, double rel, double floor = 1.0) {
    return std::abs(got - want) <= rel * std::max({floor, std::abs(got), std::abs(want)});
}

// Random feasible box LP: b = A x0 + margin for an interior x0, bounds [0,1].
struct TestLP {
    Mat a_dense;
    SpMat a;
    Vec b, lo, hi, c;
};

inline TestLP random_test_lp(Rng& rng, int n, int m) {
    TestLP lp;
    lp.a_dense.resize(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) lp.a_dense(i, j) = rng.uniform(-1.0, 1.0);
    Vec x0(n);
    for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.2, 0.8);
    lp.b = lp.a_dense * x0;
    for (int i = 0; i < m; ++i) lp.b[i] += rng.uniform(0.05, 0.5);
    lp.lo = Vec::Zero(n);
    lp.hi = Vec::Ones(n);
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = rng.normal();
    lp.a = lp.a_dense.sparseView();
    return lp;
}

// A small instance with explicit fields; pareto data left empty.
inline MOLPInstance make_instance(const TestLP& lp, std::vector<Vec> costs,
                                  Orientation o = Orientation::Min) {
    MOLPInstance inst;
    inst.costs = std::move(costs);
    inst.A = lp.a;
    inst.b = lp.b;
    inst.lower = lp.lo;
    inst.upper = lp.hi;
    inst.orientation = o;
    inst.features = Mat::Zero(inst.n_vars(), 2);
    return inst;
}

// 2x2 assignment polytope: variables (00,01,10,11), row and column sums <= 1.
inline TestLP assignment_2x2() {
    TestLP lp;
    lp.a_dense = Mat::Zero(4, 4);
    lp.a_dense << 1, 1, 0, 0,
                  0, 0, 1, 1,
                  1, 0, 1, 0,
                  0, 1, 0, 1;
    lp.b = Vec::Ones(4);
    lp.lo = Vec::Zero(4);
    lp.hi = Vec::Ones(4);
    lp.c = Vec::Zero(4);
    lp.a = lp.a_dense.sparseView();
    return lp;
}

}  // namespace mdfl::testing
