#include "doctest.h"
#include "modfl/scalarize.hpp"
#include "modfl/solver.hpp"
#include "modfl/verify.hpp"
#include "support/test_helpers.hpp"

using namespace mdfl;
using mdfl::testing::assignment_2x2;
using mdfl::testing::make_instance;
using mdfl::testing::random_test_lp;

TEST_SUITE_BEGIN("solver");

TEST_CASE("2x2 assignment with negated identity costs") {
    auto lp = assignment_2x2();
    Vec c(4);
    c << -1, 0, 0, -1;  // min of negated max
    LPSolution sol = solve_lp(c, lp.a, lp.b, lp.lo, lp.hi);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-2.0).epsilon(1e-9));
    Vec expect(4);
    expect << 1, 0, 0, 1;
    CHECK((sol.primal - expect).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("zero cost returns a deterministic feasible vertex") {
    auto lp = assignment_2x2();
    LPSolution a = solve_lp(Vec::Zero(4), lp.a, lp.b, lp.lo, lp.hi);
    LPSolution b = solve_lp(Vec::Zero(4), lp.a, lp.b, lp.lo, lp.hi);
    REQUIRE(a.status == SolveStatus::Optimal);
    CHECK(a.objective == 0.0);
    CHECK(a.primal == b.primal);  // bitwise determinism
    // vertex: every coordinate at a bound or basic; feasibility holds
    MOLPInstance inst = make_instance(lp, {Vec::Zero(4)});
    CHECK(check_feasible(inst, a.primal, 1e-9));
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        auto lp = random_test_lp(rng, 6, 8);
        LPSolution sol = solve_lp(lp.c, lp.a, lp.b, lp.lo, lp.hi);
        REQUIRE(sol.status == SolveStatus::Optimal);
        auto vertices = enumerate_vertices(lp.a_dense, lp.b, lp.lo, lp.hi);
        REQUIRE_FALSE(vertices.empty());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : vertices) best = std::min(best, lp.c.dot(v));
        CHECK(sol.objective == doctest::Approx(best).epsilon(1e-7));
        // Solution is itself (numerically) a vertex.
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& v : vertices)
            nearest = std::min(nearest, (v - sol.primal).lpNorm<Eigen::Infinity>());
        CHECK(nearest < 1e-6);
    }
}

TEST_CASE("LP duals satisfy KKT at the optimum") {
    Rng rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        auto lp = random_test_lp(rng, 7, 9);
        LPSolution sol = solve_lp(lp.c, lp.a, lp.b, lp.lo, lp.hi);
        REQUIRE(sol.status == SolveStatus::Optimal);
        // primal feasibility
        CHECK((lp.a_dense * sol.primal - lp.b).maxCoeff() < 1e-8);
        // dual feasibility
        CHECK(sol.row_duals.minCoeff() > -1e-10);
        CHECK(sol.lower_duals.minCoeff() > -1e-10);
        CHECK(sol.upper_duals.minCoeff() > -1e-10);
        // stationarity c + A^T lambda - mu_lo + mu_hi = 0
        Vec grad = lp.c + lp.a_dense.transpose() * sol.row_duals - sol.lower_duals +
                   sol.upper_duals;
        CHECK(grad.lpNorm<Eigen::Infinity>() < 1e-8);
        // complementary slackness
        Vec slack = lp.b - lp.a_dense * sol.primal;
        for (int i = 0; i < slack.size(); ++i)
            CHECK(std::abs(sol.row_duals[i] * slack[i]) < 1e-8);
    }
}

TEST_CASE("infeasible and unbounded statuses") {
    // x <= -1 with x in [0,1] is infeasible.
    SpMat a(1, 1);
    a.insert(0, 0) = 1.0;
    Vec b(1);
    b << -1.0;
    Vec c(1), lo(1), hi(1);
    c << 1.0;
    lo << 0.0;
    hi << 1.0;
    CHECK(solve_lp(c, a, b, lo, hi).status == SolveStatus::Infeasible);

    // min -x with x >= 0 unbounded above.
    SpMat none(0, 1);
    Vec b0(0);
    Vec hi_inf(1);
    hi_inf << std::numeric_limits<double>::infinity();
    Vec cneg(1);
    cneg << -1.0;
    CHECK(solve_lp(cneg, none, b0, lo, hi_inf).status == SolveStatus::Unbounded);
}

TEST_CASE("regularized QP closed forms") {
    SpMat none(0, 1);
    Vec b0(0);
    Vec lo(1), hi(1);
    lo << 0.0;
    hi << 1.0;

    // min -y pi + gamma pi^2 on [0,1], y = 0.5, gamma = 0.35: pi = y/(2 gamma).
    Vec c(1);
    c << -0.5;
    LPSolution interior = solve_qp_regularized(c, none, b0, lo, hi, 0.35);
    CHECK(interior.primal[0] == doctest::Approx(0.5 / 0.7).epsilon(1e-8));

    // y = 1.0: bound active, multiplier y - 2 gamma = 0.3.
    c << -1.0;
    LPSolution bound = solve_qp_regularized(c, none, b0, lo, hi, 0.35);
    CHECK(bound.primal[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(bound.upper_duals[0] == doctest::Approx(0.3).epsilon(1e-6));

    // c = 0, gamma = 1, bounds [-1,1], no rows: pi = 0.
    c << 0.0;
    Vec lo2(1), hi2(1);
    lo2 << -1.0;
    hi2 << 1.0;
    LPSolution zero = solve_qp_regularized(c, none, b0, lo2, hi2, 1.0);
    CHECK(std::abs(zero.primal[0]) < 1e-9);
}

TEST_CASE("QP satisfies KKT on random instances") {
    Rng rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        auto lp = random_test_lp(rng, 6, 9);
        const double gamma = 0.35;
        LPSolution sol = solve_qp_regularized(lp.c, lp.a, lp.b, lp.lo, lp.hi, gamma);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK((lp.a_dense * sol.primal - lp.b).maxCoeff() < 1e-8);
        CHECK(sol.row_duals.minCoeff() > -1e-10);
        Vec grad = lp.c + 2.0 * gamma * sol.primal + lp.a_dense.transpose() * sol.row_duals -
                   sol.lower_duals + sol.upper_duals;
        CHECK(grad.lpNorm<Eigen::Infinity>() < 1e-7);
        Vec slack = lp.b - lp.a_dense * sol.primal;
        for (int i = 0; i < slack.size(); ++i)
            CHECK(std::abs(sol.row_duals[i] * slack[i]) < 1e-8);
    }
}

TEST_CASE("QP objective approaches the LP value as gamma shrinks") {
    Rng rng(123);
    for (int trial = 0; trial < 4; ++trial) {
        auto lp = random_test_lp(rng, 6, 8);
        LPSolution exact = solve_lp(lp.c, lp.a, lp.b, lp.lo, lp.hi);
        REQUIRE(exact.status == SolveStatus::Optimal);
        for (double gamma : {0.35, 0.035, 0.0035}) {
            LPSolution qp = solve_qp_regularized(lp.c, lp.a, lp.b, lp.lo, lp.hi, gamma);
            CHECK(std::abs(qp.objective - exact.objective) <= 10.0 * gamma * 6);
            CHECK(qp.objective >= exact.objective - 1e-8);
        }
    }
}

TEST_CASE("solve_multiobjective on identical objectives collapses to one solution") {
    Rng rng(9);
    auto lp = random_test_lp(rng, 6, 5);
    MOLPInstance inst = make_instance(lp, {lp.c, lp.c});
    auto mo = solve_multiobjective(inst);
    CHECK(mo.pareto_set.size() == 1);
    CHECK(mo.pareto_front.size() == 1);
}

TEST_CASE("solve_multiobjective on a conflicting 2x2 matching") {
    auto lp = assignment_2x2();
    Vec y1(4), y2(4);
    y1 << -1.0, -0.1, -0.1, -1.0;  // favors the diagonal matching
    y2 << -0.1, -1.0, -1.0, -0.1;  // favors the anti-diagonal
    MOLPInstance inst = make_instance(lp, {y1, y2});
    auto mo = solve_multiobjective(inst);
    CHECK(mo.pareto_front.size() >= 2);
    for (std::size_t i = 0; i < mo.pareto_front.size(); ++i)
        for (std::size_t j = 0; j < mo.pareto_front.size(); ++j)
            CHECK_FALSE(dominates(mo.pareto_front[i], mo.pareto_front[j], Orientation::Min));
    // Brute-force dominance over the returned front passes.
    auto kept = brute_force_pareto(mo.pareto_front, Orientation::Min);
    CHECK(kept.size() == mo.pareto_front.size());
    // Exhaustive enumeration: both perfect matchings appear among vertices.
    auto vertices = enumerate_vertices(lp.a_dense, lp.b, lp.lo, lp.hi);
    bool diag = false, anti = false;
    for (const auto& v : vertices) {
        Vec d(4), a(4);
        d << 1, 0, 0, 1;
        a << 0, 1, 1, 0;
        if ((v - d).lpNorm<Eigen::Infinity>() < 1e-7) diag = true;
        if ((v - a).lpNorm<Eigen::Infinity>() < 1e-7) anti = true;
    }
    CHECK(diag);
    CHECK(anti);
}

TEST_CASE("solve_multiobjective output is bitwise deterministic") {
    Rng rng(55);
    auto lp = random_test_lp(rng, 5, 6);
    Vec y2(5);
    for (int i = 0; i < 5; ++i) y2[i] = rng.normal();
    MOLPInstance inst = make_instance(lp, {lp.c, y2});
    auto a = solve_multiobjective(inst);
    auto b = solve_multiobjective(inst);
    REQUIRE(a.pareto_set.size() == b.pareto_set.size());
    for (std::size_t i = 0; i < a.pareto_set.size(); ++i)
        CHECK(a.pareto_set[i] == b.pareto_set[i]);
}

TEST_SUITE_END();
