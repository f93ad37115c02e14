#include "doctest.h"
#include "modfl/dslp.hpp"
#include "modfl/solver.hpp"
#include "support/test_helpers.hpp"

using namespace mdfl;
using mdfl::testing::random_test_lp;

TEST_SUITE_BEGIN("dslp");

namespace {

SpMat no_rows(int n) { return SpMat(0, n); }

}  // namespace

TEST_CASE("one-variable closed forms") {
    Vec b0(0), lo(1), hi(1), c(1);
    lo << 0.0;
    hi << 1.0;

    // Interior: pi = y/(2 gamma), dpi/dc = -1/(2 gamma).
    c << -0.5;
    DiffSolution interior = dslp_forward(c, no_rows(1), b0, lo, hi, 0.35);
    CHECK(interior.primal()[0] == doctest::Approx(0.714285714285714).epsilon(1e-7));
    CHECK(interior.jacobian()(0, 0) == doctest::Approx(-1.0 / 0.7).epsilon(1e-6));

    // Active upper bound: derivative vanishes.
    c << -1.0;
    DiffSolution bound = dslp_forward(c, no_rows(1), b0, lo, hi, 0.35);
    CHECK(bound.primal()[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(bound.jacobian()(0, 0)) < 1e-6);
}

TEST_CASE("box problem with no active constraints has Jacobian -I/(2 gamma)") {
    const int n = 5;
    Vec c(n);
    c << 0.1, -0.2, 0.05, 0.15, -0.1;  // optima strictly inside [-1, 1]^n
    Vec lo = Vec::Constant(n, -1.0), hi = Vec::Ones(n);
    Vec b0(0);
    const double gamma = 0.5;
    DiffSolution diff = dslp_forward(c, no_rows(n), b0, lo, hi, gamma);
    Mat expect = -Mat::Identity(n, n) / (2.0 * gamma);
    CHECK((diff.jacobian() - expect).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("backward basics") {
    const int n = 4;
    Vec c(n);
    c << 0.1, -0.2, 0.05, 0.15;
    Vec lo = Vec::Constant(n, -1.0), hi = Vec::Ones(n);
    Vec b0(0);
    const double gamma = 0.35;
    DiffSolution diff = dslp_forward(c, no_rows(n), b0, lo, hi, gamma);

    Vec ek = Vec::Zero(n);
    ek[2] = 1.0;
    Vec vjp = diff.vjp(ek);
    Vec expect = Vec::Zero(n);
    expect[2] = -1.0 / (2.0 * gamma);
    CHECK((vjp - expect).lpNorm<Eigen::Infinity>() < 1e-7);

    CHECK(diff.vjp(Vec::Zero(n)) == Vec::Zero(n));
}

TEST_CASE("backward matches finite differences of a scalar objective") {
    Rng rng(404);
    auto lp = random_test_lp(rng, 8, 6);
    const double gamma = 0.35;
    Vec g(8);
    for (int i = 0; i < 8; ++i) g[i] = rng.normal();

    DiffSolution diff = dslp_forward(lp.c, lp.a, lp.b, lp.lo, lp.hi, gamma);
    Vec grad = diff.vjp(g);

    const double h = 1e-5;
    for (int j = 0; j < 8; ++j) {
        Vec cp = lp.c, cm = lp.c;
        cp[j] += h;
        cm[j] -= h;
        const double fp = g.dot(solve_qp_regularized(cp, lp.a, lp.b, lp.lo, lp.hi, gamma).primal);
        const double fm = g.dot(solve_qp_regularized(cm, lp.a, lp.b, lp.lo, lp.hi, gamma).primal);
        const double fd = (fp - fm) / (2.0 * h);
        CHECK(mdfl::testing::close_rel(grad[j], fd, 1e-4));
    }
}

TEST_CASE("Jacobian columns match finite differences on random LPs") {
    Rng rng(777);
    for (int trial = 0; trial < 4; ++trial) {
        auto lp = random_test_lp(rng, 6, 8);
        const double gamma = 0.35;
        DiffSolution diff = dslp_forward(lp.c, lp.a, lp.b, lp.lo, lp.hi, gamma);
        const Mat& jac = diff.jacobian();
        const double h = 1e-5;
        for (int j = 0; j < 6; ++j) {
            Vec cp = lp.c, cm = lp.c;
            cp[j] += h;
            cm[j] -= h;
            Vec fd = (solve_qp_regularized(cp, lp.a, lp.b, lp.lo, lp.hi, gamma).primal -
                      solve_qp_regularized(cm, lp.a, lp.b, lp.lo, lp.hi, gamma).primal) /
                     (2.0 * h);
            for (int i = 0; i < 6; ++i) CHECK(mdfl::testing::close_rel(jac(i, j), fd[i], 2e-4));
        }
    }
}

TEST_CASE("response is linear along directions preserving the active set") {
    Rng rng(550);
    auto lp = random_test_lp(rng, 6, 6);
    const double gamma = 0.35;
    DiffSolution diff = dslp_forward(lp.c, lp.a, lp.b, lp.lo, lp.hi, gamma);
    Vec direction(6);
    for (int i = 0; i < 6; ++i) direction[i] = rng.normal();
    direction.normalize();

    // pi(c + t d) - pi(c) - t J d should shrink like t^2.
    auto residual = [&](double t) {
        Vec ct = lp.c + t * direction;
        Vec moved = solve_qp_regularized(ct, lp.a, lp.b, lp.lo, lp.hi, gamma).primal;
        return (moved - diff.primal() - t * (diff.jacobian() * direction))
            .lpNorm<Eigen::Infinity>();
    };
    const double r1 = residual(1e-3);
    const double r2 = residual(1e-4);
    CHECK(r1 < 1e-5);
    CHECK(r2 < 1e-6);
}

TEST_CASE("gamma must be positive") {
    Vec c(1), lo(1), hi(1), b0(0);
    c << 1.0;
    lo << 0.0;
    hi << 1.0;
    CHECK_THROWS_AS(dslp_forward(c, no_rows(1), b0, lo, hi, 0.0), config_error);
    CHECK_THROWS_AS(dslp_forward(c, no_rows(1), b0, lo, hi, -1.0), config_error);
}

TEST_SUITE_END();
