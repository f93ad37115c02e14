#include <cmath>

#include "doctest.h"
#include "modfl/ot_rank.hpp"
#include "modfl/rng.hpp"
#include "support/test_helpers.hpp"

using namespace mdfl;

namespace {

Mat random_cloud(Rng& rng, int rows, int cols, double lo = 0.0, double hi = 1.0) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

SRMMDConfig test_config(std::uint64_t seed = 42) {
    SRMMDConfig cfg;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("ot_rank");

TEST_CASE("sinkhorn on identical single points") {
    Mat p(1, 1), q(1, 1);
    p << 0.0;
    q << 0.0;
    auto pot = sinkhorn(p, q, 1e-2, 50, 1e-9);
    CHECK(pot.marginal_violation < 1e-12);
    CHECK(std::abs(pot.u[0]) < 1e-12);
    CHECK(std::abs(pot.v[0]) < 1e-12);
}

TEST_CASE("sinkhorn aligns identical clouds with themselves as epsilon shrinks") {
    Rng rng(8);
    Mat cloud = random_cloud(rng, 6, 2);
    auto pot = sinkhorn(cloud, cloud, 1e-3, 5000, 1e-8);
    CHECK(pot.marginal_violation <= 1e-8);
    // The coupling's row argmax is the identity: self-assignment is the
    // optimal (zero-cost) transport, matching the enumeration over all
    // one-to-one assignments.
    const int n = 6;
    for (int i = 0; i < n; ++i) {
        int best = -1;
        double best_mass = -1.0;
        for (int j = 0; j < n; ++j) {
            const double cost = 0.5 * (cloud.row(i) - cloud.row(j)).squaredNorm();
            const double mass = std::exp((pot.u[i] + pot.v[j] - cost) / pot.epsilon);
            if (mass > best_mass) {
                best_mass = mass;
                best = j;
            }
        }
        CHECK(best == i);
    }
}

TEST_CASE("sinkhorn marginals reach uniform on random clouds") {
    Rng rng(15);
    Mat a = random_cloud(rng, 20, 2);
    Mat b = random_cloud(rng, 20, 2);
    auto pot = sinkhorn(a, b, 1e-2, 2000, 1e-7);
    CHECK(pot.marginal_violation <= 1e-6);
    // Recompute the violated-side marginal directly from the exp form.
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double row = 0.0;
        for (int j = 0; j < 20; ++j) {
            const double cost = 0.5 * (a.row(i) - b.row(j)).squaredNorm();
            row += std::exp((pot.u[i] + pot.v[j] - cost) / pot.epsilon) / (20.0 * 20.0);
        }
        worst = std::max(worst, std::abs(row - 1.0 / 20.0));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("sinkhorn input validation") {
    Mat p(1, 1), q(1, 1);
    p << std::nan("");
    q << 0.0;
    CHECK_THROWS_AS(sinkhorn(p, q, 1e-2, 10, 1e-6), dimension_error);
}

TEST_CASE("soft rank of the middle sample is near one half") {
    Mat source(3, 1), target(3, 1);
    source << 1.0, 2.0, 3.0;
    target << 1.0 / 6.0, 0.5, 5.0 / 6.0;
    auto pot = sinkhorn(source, target, 1e-3, 5000, 1e-10);
    SoftRankMap map{target, pot.v, 1e-3};
    Vec phi(1);
    phi << 2.0;
    CHECK(std::abs(soft_rank(map, phi)[0] - 0.5) < 0.05);
    // Output stays in the convex hull of the targets.
    phi << -100.0;
    const double r = soft_rank(map, phi)[0];
    CHECK(r >= 1.0 / 6.0 - 1e-12);
    CHECK(r <= 5.0 / 6.0 + 1e-12);
}

TEST_CASE("rank maps are translation invariant once converged") {
    Rng rng(77);
    Mat x = random_cloud(rng, 8, 2);
    Mat shifted = x;
    shifted.col(0).array() += 0.3;
    shifted.col(1).array() -= 0.2;
    Mat targets = random_cloud(rng, 8, 2);

    auto pot_a = sinkhorn(x, targets, 1e-2, 20000, 1e-12);
    auto pot_b = sinkhorn(shifted, targets, 1e-2, 20000, 1e-12);
    SoftRankMap map_a{targets, pot_a.v, 1e-2};
    SoftRankMap map_b{targets, pot_b.v, 1e-2};
    for (int i = 0; i < 8; ++i) {
        Vec ra = soft_rank(map_a, x.row(i));
        Vec rb = soft_rank(map_b, shifted.row(i));
        CHECK((ra - rb).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("soft rank with a single target sample is constant") {
    Mat target(1, 2);
    target << 0.25, 0.75;
    SoftRankMap map{target, Vec::Zero(1), 1e-3};
    Vec phi(2);
    phi << 10.0, -3.0;
    CHECK((soft_rank(map, phi).transpose() - target.row(0)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("srmmd of a set with itself vanishes") {
    Rng rng(5);
    Mat x = random_cloud(rng, 8, 2, 0.0, 2.0);
    CHECK(srmmd(x, x, test_config()).value <= 1e-8);
}

TEST_CASE("srmmd is symmetric") {
    Rng rng(6);
    Mat x = random_cloud(rng, 8, 2, 0.0, 2.0);
    Mat y = random_cloud(rng, 8, 2, 0.5, 2.5);
    const double xy = srmmd(x, y, test_config()).value;
    const double yx = srmmd(y, x, test_config()).value;
    CHECK(std::abs(xy - yx) <= 1e-10);
}

TEST_CASE("srmmd increases with displacement") {
    Rng rng(7);
    Mat x = random_cloud(rng, 8, 2, -0.5, 0.5);
    Mat near = x;
    near.array() += 0.1;
    Mat far = x;
    far.array() += 10.0;
    auto cfg = test_config();
    const double d_near = srmmd(x, near, cfg).value;
    const double d_far = srmmd(x, far, cfg).value;
    CHECK(d_far > d_near);
    CHECK(d_near >= 0.0);
}

TEST_CASE("srmmd reaches tight marginals at the paper epsilon via annealing") {
    Rng rng(16);
    Mat x = random_cloud(rng, 8, 2);
    Mat y = random_cloud(rng, 8, 2);
    auto res = srmmd(x, y, test_config());
    CHECK(res.marginal_violation <= 1e-6);
    CHECK(res.iterations > 0);
}

TEST_CASE("degenerate pooled samples return zero with a flag") {
    Mat x = Mat::Zero(4, 2);
    Mat y = Mat::Zero(4, 2);
    auto res = srmmd(x, y, test_config());
    CHECK(res.degenerate);
    CHECK(res.value == 0.0);
    auto grad = srmmd_grad(x, y, test_config());
    CHECK(grad.result.degenerate);
    CHECK(grad.grad_x == Mat::Zero(4, 2));
}

TEST_CASE("srmmd gradient vanishes when the sets coincide") {
    Rng rng(9);
    Mat x = random_cloud(rng, 6, 2);
    auto grad = srmmd_grad(x, x, test_config());
    CHECK(grad.grad_x.lpNorm<Eigen::Infinity>() + grad.grad_y.lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("srmmd gradient matches finite differences of the truncated graph") {
    Rng rng(10);
    Mat x = random_cloud(rng, 6, 2, 0.0, 1.5);
    Mat y = random_cloud(rng, 6, 2, 0.5, 2.0);
    auto cfg = test_config();
    auto grad = srmmd_grad(x, y, cfg);
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 2; ++j) {
            Mat xp = x, xm = x;
            xp(i, j) += h;
            xm(i, j) -= h;
            const double fd = (srmmd(xp, y, cfg).value - srmmd(xm, y, cfg).value) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - grad.grad_x(i, j)) /
                                        std::max({1.0, std::abs(fd), std::abs(grad.grad_x(i, j))}));
            Mat yp = y, ym = y;
            yp(i, j) += h;
            ym(i, j) -= h;
            const double fdy = (srmmd(x, yp, cfg).value - srmmd(x, ym, cfg).value) / (2.0 * h);
            worst = std::max(worst, std::abs(fdy - grad.grad_y(i, j)) /
                                        std::max({1.0, std::abs(fdy), std::abs(grad.grad_y(i, j))}));
        }
    CHECK(worst <= 1e-3);
}

TEST_CASE("log-domain stability on widely spread inputs") {
    Rng rng(11);
    Mat x = random_cloud(rng, 6, 2, -1e3, 1e3);
    Mat y = random_cloud(rng, 6, 2, -1e3, 1e3);
    SRMMDConfig cfg = test_config();
    cfg.epsilon = 1e-6;
    auto res = srmmd(x, y, cfg);
    CHECK(std::isfinite(res.value));
    auto grad = srmmd_grad(x, y, cfg);
    CHECK(grad.grad_x.allFinite());
    CHECK(grad.grad_y.allFinite());
}

TEST_CASE("srmmd invariant under permutation of X rows") {
    Rng rng(12);
    Mat x = random_cloud(rng, 6, 2);
    Mat y = random_cloud(rng, 6, 2);
    Mat xp(6, 2);
    const int perm[6] = {3, 1, 5, 0, 2, 4};
    for (int i = 0; i < 6; ++i) xp.row(i) = x.row(perm[i]);
    auto cfg = test_config();
    CHECK(std::abs(srmmd(x, y, cfg).value - srmmd(xp, y, cfg).value) <= 1e-10);
}

TEST_CASE("kernel spec evaluates the bandwidth mixture") {
    KernelSpec k;
    Vec a(2), b(2);
    a << 0, 0;
    b << 0, 0;
    CHECK(kernel_eval(k, a, b) == doctest::Approx(1.0));
    b << 3, 4;  // distance 5
    double manual = 0.0;
    for (double s : k.bandwidths) manual += std::exp(-25.0 / (2.0 * s * s));
    manual /= 6.0;
    CHECK(kernel_eval(k, a, b) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_SUITE_END();
