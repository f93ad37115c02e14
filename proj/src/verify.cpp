#include "modfl/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "modfl/benchmarks.hpp"
#include "modfl/dslp.hpp"
#include "modfl/evaluate.hpp"
#include "modfl/metrics.hpp"
#include "modfl/ot_rank.hpp"
#include "modfl/rng.hpp"
#include "modfl/scalarize.hpp"
#include "modfl/solver.hpp"
#include "modfl/trainer.hpp"

namespace mdfl {

namespace {

constexpr std::uint64_t kSuiteSeed = 0x5eedULL;

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void choose_recurse(int offset, int need, int total, std::vector<int>& picked,
                    const std::function<void(const std::vector<int>&)>& fn) {
    if (need == 0) {
        fn(picked);
        return;
    }
    for (int i = offset; i <= total - need; ++i) {
        picked.push_back(i);
        choose_recurse(i + 1, need - 1, total, picked, fn);
        picked.pop_back();
    }
}

}  // namespace

std::vector<Vec> enumerate_vertices(const Mat& a_dense, const Vec& b, const Vec& lo,
                                    const Vec& hi, double feas_tol) {
    const int n = static_cast<int>(a_dense.cols());
    const int m = static_cast<int>(a_dense.rows());
    // Row list: A rows, then upper-bound rows e_j, then lower-bound rows -e_j.
    const int total = m + 2 * n;
    auto row = [&](int r) {
        Vec out = Vec::Zero(n);
        double rhs;
        if (r < m) {
            out = a_dense.row(r);
            rhs = b[r];
        } else if (r < m + n) {
            out[r - m] = 1.0;
            rhs = hi[r - m];
        } else {
            out[r - m - n] = -1.0;
            rhs = -lo[r - m - n];
        }
        return std::pair<Vec, double>(out, rhs);
    };

    std::vector<Vec> vertices;
    std::vector<int> picked;
    std::function<void(const std::vector<int>&)> consider = [&](const std::vector<int>& rows) {
        Mat basis(n, n);
        Vec rhs(n);
        for (int k = 0; k < n; ++k) {
            auto [a, r] = row(rows[static_cast<std::size_t>(k)]);
            if (!std::isfinite(r)) return;
            basis.row(k) = a;
            rhs[k] = r;
        }
        Eigen::FullPivLU<Mat> lu(basis);
        if (!lu.isInvertible()) return;
        Vec x = lu.solve(rhs);
        // Feasibility against every row.
        for (int r = 0; r < total; ++r) {
            auto [a, bound] = row(r);
            if (!std::isfinite(bound)) continue;
            if (a.dot(x) > bound + feas_tol) return;
        }
        for (const auto& seen : vertices)
            if ((seen - x).lpNorm<Eigen::Infinity>() <= 1e-7) return;
        vertices.push_back(std::move(x));
    };
    choose_recurse(0, n, total, picked, consider);
    return vertices;
}

std::vector<int> brute_force_pareto(const std::vector<ObjectiveVector>& points,
                                    Orientation orientation, double tol) {
    const double sign = orientation == Orientation::Min ? 1.0 : -1.0;
    std::vector<int> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j) continue;
            bool no_worse = true, strict = false;
            for (Eigen::Index k = 0; k < points[i].size(); ++k) {
                const double a = sign * points[j][k], c = sign * points[i][k];
                if (a > c + tol) no_worse = false;
                if (a < c - tol) strict = true;
            }
            dominated = no_worse && strict;
        }
        if (!dominated) kept.push_back(static_cast<int>(i));
    }
    return kept;
}

double mc_hypervolume(const std::vector<ObjectiveVector>& front, const Vec& reference,
                      Orientation orientation, int samples, std::uint64_t seed) {
    if (front.empty()) return 0.0;
    const double sign = orientation == Orientation::Min ? 1.0 : -1.0;
    const int t = static_cast<int>(front[0].size());
    std::vector<Vec> pts;
    for (const auto& p : front) pts.push_back(sign * p);
    Vec ref = sign * reference;
    Vec ideal = pts[0];
    for (const auto& p : pts) ideal = ideal.cwiseMin(p);

    double box = 1.0;
    for (int k = 0; k < t; ++k) box *= std::max(0.0, ref[k] - ideal[k]);
    if (box <= 0.0) return 0.0;

    Rng rng(seed);
    long long hits = 0;
    Vec sample(t);
    for (int s = 0; s < samples; ++s) {
        for (int k = 0; k < t; ++k) sample[k] = rng.uniform(ideal[k], ref[k]);
        for (const auto& p : pts) {
            if ((p.array() <= sample.array()).all()) {
                ++hits;
                break;
            }
        }
    }
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Random problem helpers
// ---------------------------------------------------------------------------
namespace {

struct RandomLP {
    Mat a_dense;
    SpMat a;
    Vec b, lo, hi, c;
};

RandomLP random_lp(Rng& rng, int n, int m) {
    RandomLP lp;
    lp.a_dense.resize(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) lp.a_dense(i, j) = rng.uniform(-1.0, 1.0);
    Vec interior(n);
    for (int j = 0; j < n; ++j) interior[j] = rng.uniform(0.2, 0.8);
    lp.b = lp.a_dense * interior;
    for (int i = 0; i < m; ++i) lp.b[i] += rng.uniform(0.05, 0.5);
    lp.lo = Vec::Zero(n);
    lp.hi = Vec::Ones(n);
    lp.c = Vec(n);
    for (int j = 0; j < n; ++j) lp.c[j] = rng.normal();
    lp.a = lp.a_dense.sparseView();
    return lp;
}

// (slack, dual) per folded constraint row in the dslp ordering: A rows,
// finite upper bounds, finite lower bounds.
std::vector<std::pair<double, double>> folded_rows(const RandomLP& lp, const LPSolution& sol) {
    std::vector<std::pair<double, double>> rows;
    Vec ax = lp.a_dense * sol.primal;
    for (int i = 0; i < lp.b.size(); ++i) rows.push_back({lp.b[i] - ax[i], sol.row_duals[i]});
    for (int j = 0; j < lp.c.size(); ++j)
        rows.push_back({lp.hi[j] - sol.primal[j], sol.upper_duals[j]});
    for (int j = 0; j < lp.c.size(); ++j)
        rows.push_back({sol.primal[j] - lp.lo[j], sol.lower_duals[j]});
    return rows;
}

}  // namespace

SuiteResult verify_dslp_gradients(bool corrupt_sign) {
    Stopwatch clock;
    SuiteResult out;
    out.name = "dslp_gradients";
    Rng rng(substream(kSuiteSeed, "dslp_suite"));
    const double gamma = 0.35;
    const double h = 1e-5;

    int checked = 0, flagged = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(9));   // 2..10
        const int m = 1 + static_cast<int>(rng.uniform_index(15));  // 1..15
        RandomLP lp = random_lp(rng, n, m);
        DiffSolution diff = dslp_forward(lp.c, lp.a, lp.b, lp.lo, lp.hi, gamma);
        Mat jac = diff.jacobian();
        if (corrupt_sign) jac = -jac;

        for (int j = 0; j < n; ++j) {
            Vec cp = lp.c, cm = lp.c;
            cp[j] += h;
            cm[j] -= h;
            LPSolution plus = solve_qp_regularized(cp, lp.a, lp.b, lp.lo, lp.hi, gamma);
            LPSolution minus = solve_qp_regularized(cm, lp.a, lp.b, lp.lo, lp.hi, gamma);

            // Columns near an active-set change are flagged and skipped.
            bool degenerate = false;
            auto rows_p = folded_rows(lp, plus);
            auto rows_m = folded_rows(lp, minus);
            for (std::size_t r = 0; r < rows_p.size(); ++r) {
                const bool act_p = rows_p[r].first <= 1e-7 || rows_p[r].second >= 1e-7;
                const bool act_m = rows_m[r].first <= 1e-7 || rows_m[r].second >= 1e-7;
                if (act_p != act_m) degenerate = true;
                if (rows_p[r].first < 1e-6 && rows_p[r].second < 1e-6) degenerate = true;
                if (rows_m[r].first < 1e-6 && rows_m[r].second < 1e-6) degenerate = true;
            }
            if (degenerate) {
                ++flagged;
                continue;
            }

            Vec fd = (plus.primal - minus.primal) / (2.0 * h);
            for (int i = 0; i < n; ++i) {
                ++checked;
                const double err = std::abs(jac(i, j) - fd[i]) /
                                   std::max({1.0, std::abs(jac(i, j)), std::abs(fd[i])});
                worst = std::max(worst, err);
            }
        }
    }
    const double secs = clock.seconds();
    out.seconds = secs;
    out.passed = worst <= 1e-4 && secs < 30.0;
    std::ostringstream d;
    d << checked << " entries checked, " << flagged << " degenerate columns flagged, worst rel err "
      << worst;
    out.detail = d.str();
    return out;
}

SuiteResult verify_srmmd_suite() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "srmmd";
    Rng rng(substream(kSuiteSeed, "srmmd_suite"));

    SRMMDConfig cfg;
    cfg.seed = substream(kSuiteSeed, "srmmd_targets");

    auto random_cloud = [&](int rows, int cols, double lo, double hi) {
        Mat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
        return m;
    };

    Mat x = random_cloud(8, 2, 0.0, 2.0);
    Mat y = random_cloud(8, 2, 0.5, 2.5);

    std::ostringstream d;
    bool ok = true;

    const double self = srmmd(x, x, cfg).value;
    if (self > 1e-8) ok = false;
    d << "srmmd(X,X)=" << self;

    const double xy = srmmd(x, y, cfg).value;
    const double yx = srmmd(y, x, cfg).value;
    if (std::abs(xy - yx) > 1e-10) ok = false;
    d << ", |sym gap|=" << std::abs(xy - yx);

    SRMMDResult big = srmmd(random_cloud(20, 2, 0.0, 1.0), random_cloud(20, 2, 0.0, 1.0), cfg);
    const double viol = std::max(big.marginal_violation, srmmd(x, y, cfg).marginal_violation);
    if (viol > 1e-6) ok = false;
    d << ", marginal violation=" << viol;

    // Gradient of the truncated graph vs central differences.
    SRMMDGradient grad = srmmd_grad(x, y, cfg);
    double worst = 0.0;
    const double h = 1e-5;
    auto fd_check = [&](Mat& pts, const Mat& analytic, bool is_x) {
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            for (Eigen::Index j = 0; j < pts.cols(); ++j) {
                const double keep = pts(i, j);
                pts(i, j) = keep + h;
                const double fp = is_x ? srmmd(pts, y, cfg).value : srmmd(x, pts, cfg).value;
                pts(i, j) = keep - h;
                const double fm = is_x ? srmmd(pts, y, cfg).value : srmmd(x, pts, cfg).value;
                pts(i, j) = keep;
                const double fd = (fp - fm) / (2.0 * h);
                const double err = std::abs(fd - analytic(i, j)) /
                                   std::max({1.0, std::abs(fd), std::abs(analytic(i, j))});
                worst = std::max(worst, err);
            }
    };
    fd_check(x, grad.grad_x, true);
    fd_check(y, grad.grad_y, false);
    if (worst > 1e-3) ok = false;
    d << ", worst grad rel err=" << worst;

    out.seconds = clock.seconds();
    out.passed = ok && out.seconds < 60.0;
    out.detail = d.str();
    return out;
}

SuiteResult verify_weighted_sum_pareto() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "weighted_sum_pareto";
    Rng rng(substream(kSuiteSeed, "wsum_suite"));

    int violations = 0, solves = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int t = (trial % 3 == 2) ? 3 : 2;
        const int n = 2 + trial % 7;  // 2..8
        const int m = n <= 5 ? 2 + static_cast<int>(rng.uniform_index(6))
                             : 2 + static_cast<int>(rng.uniform_index(4));
        RandomLP lp = random_lp(rng, n, m);
        std::vector<Vec> costs;
        for (int j = 0; j < t; ++j) {
            Vec y(n);
            for (int i = 0; i < n; ++i) y[i] = rng.normal();
            costs.push_back(std::move(y));
        }

        const auto vertices = enumerate_vertices(lp.a_dense, lp.b, lp.lo, lp.hi);
        std::vector<ObjectiveVector> vertex_objs;
        for (const auto& v : vertices) {
            ObjectiveVector f(t);
            for (int j = 0; j < t; ++j) f[j] = costs[static_cast<std::size_t>(j)].dot(v);
            vertex_objs.push_back(std::move(f));
        }

        const auto norm = normalize_costs(costs);
        for (const auto& w : weight_grid(t, 5)) {
            if (w.w.minCoeff() <= 0.0) continue;  // strictly positive weights only
            LPSolution sol = solve_lp(weighted_cost(norm, w), lp.a, lp.b, lp.lo, lp.hi);
            if (sol.status != SolveStatus::Optimal) continue;
            ++solves;
            ObjectiveVector f(t);
            for (int j = 0; j < t; ++j) f[j] = costs[static_cast<std::size_t>(j)].dot(sol.primal);
            for (const auto& v : vertex_objs) {
                bool no_worse = true, strict = false;
                for (int j = 0; j < t; ++j) {
                    if (v[j] > f[j] + 1e-9) no_worse = false;
                    if (v[j] < f[j] - 1e-9) strict = true;
                }
                if (no_worse && strict) {
                    ++violations;
                    break;
                }
            }
        }
    }
    out.seconds = clock.seconds();
    out.passed = violations == 0;
    std::ostringstream d;
    d << solves << " strictly-positive-weight solves over 100 instances, " << violations
      << " dominated";
    out.detail = d.str();
    return out;
}

SuiteResult verify_metric_oracles() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "metric_oracles";
    Rng rng(substream(kSuiteSeed, "metric_suite"));

    bool ok = true;
    double worst_exact = 0.0, worst_mc = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int t = (trial % 2 == 0) ? 2 : 3;
        auto random_front = [&](int count) {
            std::vector<ObjectiveVector> pts;
            for (int i = 0; i < count; ++i) {
                ObjectiveVector p(t);
                for (int j = 0; j < t; ++j) p[j] = rng.uniform(0.0, 1.0);
                pts.push_back(std::move(p));
            }
            return pareto_filter(pts, Orientation::Min);
        };
        FrontApproximation pred = random_front(10);
        FrontApproximation truth = random_front(10);

        // Independent recomputation of GD and MPFE.
        double gd_oracle = 0.0;
        for (const auto& p : pred.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : truth.points) best = std::min(best, (p - q).norm());
            gd_oracle += best;
        }
        gd_oracle /= static_cast<double>(pred.points.size());
        double mpfe_oracle = 0.0;
        for (const auto& q : truth.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : pred.points) best = std::min(best, (q - p).norm());
            mpfe_oracle = std::max(mpfe_oracle, best);
        }
        worst_exact = std::max(worst_exact, std::abs(gd(pred, truth) - gd_oracle));
        worst_exact = std::max(worst_exact, std::abs(mpfe(pred, truth) - mpfe_oracle));

        const Vec ref = Vec::Constant(t, 1.5);
        const double exact = hypervolume(truth.points, ref, Orientation::Min);
        const double mc = mc_hypervolume(truth.points, ref, Orientation::Min, 1000000,
                                         substream(kSuiteSeed, "mc", trial));
        if (exact > 0.0) worst_mc = std::max(worst_mc, std::abs(mc - exact) / exact);
    }
    if (worst_exact > 1e-9 || worst_mc > 0.005) ok = false;
    out.seconds = clock.seconds();
    out.passed = ok;
    std::ostringstream d;
    d << "worst exact-metric gap " << worst_exact << ", worst MC relative gap " << worst_mc;
    out.detail = d.str();
    return out;
}

SuiteResult verify_quadratic_example() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "quadratic_example";
    Rng rng(substream(kSuiteSeed, "quad_suite"));

    bool ok = true;
    std::ostringstream d;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        QuadraticExample ex;
        ex.a1 = rng.uniform(0.5, 2.0);
        do {
            ex.a2 = rng.uniform(-2.0, 2.0);
            ex.a3 = rng.uniform(-2.0, 2.0);
        } while (std::abs(ex.a2 - ex.a3) < 0.5);
        ex.n = 1;
        ex.eps_prec = std::abs(ex.a2 - ex.a3) / 2.0;

        QuadraticPareto qp = quadratic_pareto_set(ex);
        const double lo = std::min(ex.a2, ex.a3) / (2.0 * ex.a1);
        const double hi = std::max(ex.a2, ex.a3) / (2.0 * ex.a1);
        if (std::abs(qp.lo - lo) > 1e-9 || std::abs(qp.hi - hi) > 1e-9) {
            ok = false;
            d << "interval mismatch on trial " << trial;
        }
        if (qp.overlap_ratio != 0.5) {
            ok = false;
            d << "overlap ratio " << qp.overlap_ratio << " != 0.5 on trial " << trial;
        }
        if (!quadratic_grid_dominance_check(ex, 1e-3, 0.25)) {
            ok = false;
            d << "grid dominance failed on trial " << trial;
        }
    }
    if (ok) d << "20 random triples: intervals exact, grid dominance confirmed, ratio 0.5";
    out.seconds = clock.seconds();
    out.passed = ok;
    out.detail = d.str();
    return out;
}

SuiteResult verify_perfect_prediction() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "perfect_prediction";

    BipartiteConfig bc;
    bc.nodes_per_side = 8;
    bc.instances = 6;
    bc.seed = 11;
    Dataset bip = gen_bipartite(bc);

    AdAllocConfig ac;
    ac.nd = 8;
    ac.nc = 6;
    ac.k_categories = 3;
    ac.feature_dim = 6;
    ac.seed = 12;
    Dataset ad = gen_ad_alloc(ac, 4);

    bool ok = true;
    std::ostringstream d;
    for (const Dataset* ds : {&bip, &ad}) {
        std::vector<int> all;
        for (std::size_t i = 0; i < ds->instances.size(); ++i) all.push_back(static_cast<int>(i));
        EvaluateConfig cfg;
        cfg.with_loss_diagnostics = true;
        cfg.ot.seed = substream(kSuiteSeed, "perfect");
        EvaluationResult r = evaluate_method(*ds, all, oracle_predict_fn(), "oracle", cfg);
        double worst_har = 0.0, worst_l = 0.0, worst_ps = 0.0;
        int har_valid = 0;
        for (const auto& ev : r.per_instance) {
            if (ev.har_valid) {
                worst_har = std::max(worst_har, std::abs(ev.har - 1.0));
                ++har_valid;
            }
            worst_l = std::max(worst_l, ev.landscape);
            worst_ps = std::max(worst_ps, ev.pareto_set_dist);
        }
        if (r.row.gd > 1e-6 || r.row.regret_mean > 1e-6 || worst_har > 1e-6 || har_valid == 0 ||
            worst_l > 1e-6 || worst_ps > 1e-9)
            ok = false;
        d << ds->meta.benchmark << ": GD=" << r.row.gd << " r=" << r.row.regret_mean
          << " |HAR-1|=" << worst_har << " (" << har_valid << " valid) L_l=" << worst_l
          << " L_ps=" << worst_ps << "; ";
    }
    out.seconds = clock.seconds();
    out.passed = ok;
    out.detail = d.str();
    return out;
}

SuiteResult verify_integrality() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "integrality";

    BipartiteConfig bc;
    bc.nodes_per_side = 10;
    bc.instances = 4;
    bc.seed = 21;
    Dataset bip = gen_bipartite(bc);

    // nd chosen so nd * (delta_k +/- thr) is integral and the scaled
    // constraint matrix stays totally unimodular.
    AdAllocConfig ac;
    ac.nd = 25;
    ac.nc = 10;
    ac.k_categories = 5;
    ac.feature_dim = 6;
    ac.seed = 22;
    Dataset ad = gen_ad_alloc(ac, 3);

    double worst = 0.0;
    for (const Dataset* ds : {&bip, &ad}) {
        for (const auto& inst : ds->instances) {
            const auto norm = normalize_costs(inst.costs);
            std::vector<Vec> cost_list;
            for (const auto& w : weight_grid(inst.n_objectives(), 5))
                cost_list.push_back(weighted_cost(norm, w));
            for (const auto& y : inst.costs) cost_list.push_back(y);
            for (const auto& c : cost_list) {
                LPSolution sol = solve_lp(c, inst.A, inst.b, inst.lower, inst.upper);
                if (sol.status != SolveStatus::Optimal) continue;
                for (int i = 0; i < sol.primal.size(); ++i)
                    worst = std::max(worst,
                                     std::abs(sol.primal[i] - std::round(sol.primal[i])));
            }
        }
    }
    out.seconds = clock.seconds();
    out.passed = worst <= 1e-7;
    std::ostringstream d;
    d << "max |pi - round(pi)| = " << worst;
    out.detail = d.str();
    return out;
}

SuiteResult verify_directional() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "directional_modfl_vs_twostage";

    int wins = 0;
    std::ostringstream d;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        BipartiteConfig bc;
        bc.nodes_per_side = 20;
        bc.instances = 10;
        bc.seed = seed;
        Dataset ds = gen_bipartite(bc);

        TrainConfig tc;
        tc.seed = seed;
        TrainResult modfl_run = train_modfl(ds, tc);
        TrainResult two_run = train_twostage(ds, tc);

        auto modfl_params = std::make_shared<const PredictorParams>(modfl_run.params);
        auto two_params = std::make_shared<const PredictorParams>(two_run.params);
        EvaluationResult em =
            evaluate_method(ds, ds.test_idx, model_predict_fn(modfl_params), "modfl");
        EvaluationResult et =
            evaluate_method(ds, ds.test_idx, model_predict_fn(two_params), "twostage");
        const bool win = em.row.regret_mean <= et.row.regret_mean + 1e-12;
        wins += win ? 1 : 0;
        d << "seed " << seed << ": modfl r=" << em.row.regret_mean
          << " twostage r=" << et.row.regret_mean << (win ? " WIN" : " LOSS") << "; ";
    }
    out.seconds = clock.seconds();
    out.passed = wins >= 3 && out.seconds < 600.0;
    d << wins << "/5 seeds, " << out.seconds << " s";
    out.detail = d.str();
    return out;
}

SuiteResult verify_determinism() {
    Stopwatch clock;
    SuiteResult out;
    out.name = "determinism";

    BipartiteConfig bc;
    bc.nodes_per_side = 6;
    bc.instances = 4;
    bc.seed = 31;
    Dataset ds = gen_bipartite(bc);

    TrainConfig tc;
    tc.seed = 7;
    tc.max_epochs = 4;
    TrainResult a = train_modfl(ds, tc);
    TrainResult b = train_modfl(ds, tc);

    bool ok = a.log.size() == b.log.size();
    if (ok) {
        for (std::size_t e = 0; e < a.log.size(); ++e) {
            if (a.log[e].train_total != b.log[e].train_total ||
                a.log[e].val_total != b.log[e].val_total ||
                a.log[e].train_landscape != b.log[e].train_landscape ||
                a.log[e].train_decision != b.log[e].train_decision ||
                a.log[e].train_pareto_set != b.log[e].train_pareto_set)
                ok = false;
        }
    }
    if (ok && (a.params.w1 - b.params.w1).lpNorm<Eigen::Infinity>() != 0.0) ok = false;

    out.seconds = clock.seconds();
    out.passed = ok;
    out.detail = ok ? "two runs produced identical epoch-loss logs and parameters"
                    : "epoch logs diverged between identical runs";
    return out;
}

std::vector<SuiteResult> run_verification(bool full, bool corrupt_dslp_sign) {
    std::vector<SuiteResult> results;
    results.push_back(verify_dslp_gradients(corrupt_dslp_sign));
    results.push_back(verify_srmmd_suite());
    results.push_back(verify_weighted_sum_pareto());
    results.push_back(verify_metric_oracles());
    results.push_back(verify_quadratic_example());
    results.push_back(verify_perfect_prediction());
    results.push_back(verify_integrality());
    if (full) {
        results.push_back(verify_directional());
        results.push_back(verify_determinism());
    }
    return results;
}

}  // namespace mdfl
