#include "modfl/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "modfl/scalarize.hpp"

namespace mdfl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Bounded-variable revised simplex.
//
// Columns 0..n-1 are structural, n..n+m-1 are slacks (A pi + s = b, s >= 0),
// and rows whose initial slack is negative get an artificial column -e_i with
// phase-1 cost 1. B^{-1} is kept densely with product-form updates and
// periodic refactorization.
// ---------------------------------------------------------------------------
namespace {

enum class VarStatus : unsigned char { Basic, AtLower, AtUpper };

class Simplex {
  public:
    Simplex(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo, const Vec& hi)
        : n_(static_cast<int>(c.size())), m_(static_cast<int>(b.size())), A_(A), b_(b) {
        if (A.rows() != m_ || A.cols() != n_)
            throw dimension_error("solve_lp: A is " + std::to_string(A.rows()) + "x" +
                                  std::to_string(A.cols()) + " for n=" + std::to_string(n_) +
                                  ", m=" + std::to_string(m_));
        if (lo.size() != n_ || hi.size() != n_)
            throw dimension_error("solve_lp: bounds length mismatch");

        lower_.resize(n_ + m_);
        upper_.resize(n_ + m_);
        cost_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (lo[j] > hi[j]) throw config_error("solve_lp: lower bound above upper bound");
            lower_[j] = lo[j];
            upper_[j] = hi[j];
            cost_[j] = c[j];
        }
        for (int i = 0; i < m_; ++i) {
            lower_[n_ + i] = 0.0;
            upper_[n_ + i] = kInf;
        }

        status_.assign(n_ + m_, VarStatus::AtLower);
        x_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (std::isfinite(lower_[j])) {
                status_[j] = VarStatus::AtLower;
                x_[j] = lower_[j];
            } else if (std::isfinite(upper_[j])) {
                status_[j] = VarStatus::AtUpper;
                x_[j] = upper_[j];
            } else {
                throw solver_error("solve_lp: variable " + std::to_string(j) +
                                   " has no finite bound (free variables unsupported)");
            }
        }

        // Initial basis: one slack per row; artificials where the slack
        // starts negative.
        Vec ax = Vec::Zero(m_);
        for (int j = 0; j < n_; ++j) {
            if (x_[j] == 0.0) continue;
            for (SpMat::InnerIterator it(A_, j); it; ++it) ax[it.row()] += it.value() * x_[j];
        }
        basic_.resize(m_);
        art_row_.clear();
        binv_ = Mat::Identity(m_, m_);
        for (int i = 0; i < m_; ++i) {
            const double s0 = b_[i] - ax[i];
            if (s0 >= 0.0) {
                basic_[i] = n_ + i;
                status_[n_ + i] = VarStatus::Basic;
                x_[n_ + i] = s0;
            } else {
                // artificial with column -e_i, value -s0 > 0
                const int aj = n_ + m_ + static_cast<int>(art_row_.size());
                art_row_.push_back(i);
                lower_.push_back(0.0);
                upper_.push_back(kInf);
                cost_.push_back(0.0);
                status_.push_back(VarStatus::Basic);
                x_.push_back(-s0);
                basic_[i] = aj;
                x_[n_ + i] = 0.0;  // slack nonbasic at lower
                binv_(i, i) = -1.0;
            }
        }
    }

    SolveStatus run(LPSolution& out) {
        if (!art_row_.empty()) {
            std::vector<double> phase1(cost_.size(), 0.0);
            for (std::size_t k = 0; k < art_row_.size(); ++k) phase1[n_ + m_ + k] = 1.0;
            SolveStatus s1 = iterate(phase1, /*phase1=*/true);
            if (s1 == SolveStatus::Unbounded)
                throw solver_error("solve_lp: phase-1 subproblem unbounded (numerical anomaly)");
            if (s1 != SolveStatus::Optimal) return s1;
            double infeas = 0.0;
            for (std::size_t k = 0; k < art_row_.size(); ++k) infeas += x_[n_ + m_ + k];
            if (infeas > 1e-7) return SolveStatus::Infeasible;
            // Artificials are fixed at zero for phase 2.
            for (std::size_t k = 0; k < art_row_.size(); ++k) upper_[n_ + m_ + k] = 0.0;
        }
        SolveStatus s2 = iterate(cost_, /*phase1=*/false);
        if (s2 != SolveStatus::Optimal) return s2;
        extract(out);
        return SolveStatus::Optimal;
    }

  private:
    // Column j of the working matrix [A I -E_art].
    void add_column(int j, double scale, Vec& acc) const {
        if (j < n_) {
            for (SpMat::InnerIterator it(A_, j); it; ++it) acc[it.row()] += scale * it.value();
        } else if (j < n_ + m_) {
            acc[j - n_] += scale;
        } else {
            acc[art_row_[j - n_ - m_]] -= scale;
        }
    }

    double col_dot(int j, const Vec& y) const {
        if (j < n_) {
            double d = 0.0;
            for (SpMat::InnerIterator it(A_, j); it; ++it) d += y[it.row()] * it.value();
            return d;
        }
        if (j < n_ + m_) return y[j - n_];
        return -y[art_row_[j - n_ - m_]];
    }

    void refactorize() {
        if (m_ == 0) return;
        Mat B = Mat::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            Vec col = Vec::Zero(m_);
            add_column(basic_[i], 1.0, col);
            B.col(i) = col;
        }
        Eigen::PartialPivLU<Mat> lu(B);
        binv_ = lu.inverse();
        recompute_basics();
    }

    void recompute_basics() {
        Vec rhs = b_;
        for (int j = 0; j < static_cast<int>(x_.size()); ++j) {
            if (status_[j] == VarStatus::Basic || x_[j] == 0.0) continue;
            add_column(j, -x_[j], rhs);
        }
        Vec xb = binv_ * rhs;
        for (int i = 0; i < m_; ++i) x_[basic_[i]] = xb[i];
    }

    SolveStatus iterate(const std::vector<double>& cost, bool phase1) {
        const double dj_tol = 1e-9;
        const int total = static_cast<int>(x_.size());
        const int max_iter = 2000 + 40 * total;
        int stall = 0;
        bool bland = false;
        double last_obj = kInf;

        for (int iter = 0; iter < max_iter; ++iter) {
            ++iterations_;
            // Duals for current basis: y = B^{-T} c_B.
            Vec cb(m_);
            for (int i = 0; i < m_; ++i) cb[i] = cost[basic_[i]];
            Vec y = binv_.transpose() * cb;

            // Pricing.
            int q = -1;
            double best = dj_tol;
            for (int j = 0; j < total; ++j) {
                if (status_[j] == VarStatus::Basic) continue;
                if (lower_[j] == upper_[j]) continue;  // fixed
                if (!phase1 && j >= n_ + m_) continue; // artificials out of phase 2
                const double d = cost[j] - col_dot(j, y);
                double viol = 0.0;
                if (status_[j] == VarStatus::AtLower && d < -dj_tol) viol = -d;
                if (status_[j] == VarStatus::AtUpper && d > dj_tol) viol = d;
                if (viol <= 0.0) continue;
                if (bland) { q = j; break; }
                if (viol > best) { best = viol; q = j; }
            }
            if (q < 0) return SolveStatus::Optimal;

            const bool increasing = (status_[q] == VarStatus::AtLower);
            Vec w = Vec::Zero(m_);
            add_column(q, 1.0, w);
            w = binv_ * w;

            // Ratio test: step t >= 0 for the entering variable; basics move
            // by -w t (increasing) or +w t (decreasing).
            double t_max = upper_[q] - lower_[q];  // bound flip distance
            int leave = -1;                        // basis position, -1 = bound flip
            double sign = increasing ? 1.0 : -1.0;
            for (int i = 0; i < m_; ++i) {
                const double wi = sign * w[i];
                const int bj = basic_[i];
                double limit = kInf;
                if (wi > 1e-10) {
                    if (std::isfinite(lower_[bj])) limit = (x_[bj] - lower_[bj]) / wi;
                } else if (wi < -1e-10) {
                    if (std::isfinite(upper_[bj])) limit = (upper_[bj] - x_[bj]) / (-wi);
                }
                if (limit < t_max - 1e-12 ||
                    (limit < t_max + 1e-12 && leave >= 0 && bj < basic_[leave]) ||
                    (limit < t_max + 1e-12 && leave < 0 && limit < t_max)) {
                    t_max = std::max(limit, 0.0);
                    leave = i;
                }
            }
            if (!std::isfinite(t_max)) return SolveStatus::Unbounded;

            // Apply the step.
            const double step = t_max;
            if (step != 0.0) {
                for (int i = 0; i < m_; ++i) x_[basic_[i]] -= sign * w[i] * step;
                x_[q] += sign * step;
            }
            if (leave < 0) {
                // Entering variable flipped to its other bound.
                status_[q] = increasing ? VarStatus::AtUpper : VarStatus::AtLower;
                x_[q] = increasing ? upper_[q] : lower_[q];
            } else {
                const int out_var = basic_[leave];
                const double wl = sign * w[leave];
                status_[out_var] = (wl > 0.0) ? VarStatus::AtLower : VarStatus::AtUpper;
                x_[out_var] = (wl > 0.0) ? lower_[out_var] : upper_[out_var];
                if (out_var >= n_ + m_) upper_[out_var] = 0.0;  // lock departed artificials
                status_[q] = VarStatus::Basic;
                basic_[leave] = q;
                // Product-form update of B^{-1}.
                const double piv = w[leave];
                if (std::abs(piv) < 1e-11) {
                    refactorize();
                } else {
                    Eigen::RowVectorXd row = binv_.row(leave) / piv;
                    for (int i = 0; i < m_; ++i) {
                        if (i == leave) continue;
                        if (w[i] != 0.0) binv_.row(i) -= w[i] * row;
                    }
                    binv_.row(leave) = row;
                }
                if (++pivots_since_refactor_ >= 128) {
                    pivots_since_refactor_ = 0;
                    refactorize();
                }
            }

            // Stall detection: switch to Bland's rule to break cycles.
            double obj = 0.0;
            for (int j = 0; j < total; ++j) obj += cost[j] * x_[j];
            if (obj < last_obj - 1e-12) {
                last_obj = obj;
                stall = 0;
            } else if (++stall > 100) {
                bland = true;
            }
        }
        throw solver_error("solve_lp: iteration limit reached (" + std::to_string(max_iter) + ")");
    }

    void extract(LPSolution& out) const {
        out.primal.resize(n_);
        for (int j = 0; j < n_; ++j) out.primal[j] = x_[j];
        out.objective = 0.0;
        for (int j = 0; j < n_; ++j) out.objective += cost_[j] * x_[j];

        Vec cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = cost_[basic_[i]];
        Vec y = m_ > 0 ? Vec(binv_.transpose() * cb) : Vec(0);
        out.row_duals = -y;  // reduced cost of slack i is -y_i >= 0 at optimum
        out.lower_duals = Vec::Zero(n_);
        out.upper_duals = Vec::Zero(n_);
        for (int j = 0; j < n_; ++j) {
            if (status_[j] == VarStatus::Basic) continue;
            const double d = cost_[j] - col_dot(j, y);
            if (status_[j] == VarStatus::AtLower)
                out.lower_duals[j] = d;
            else
                out.upper_duals[j] = -d;
        }
        out.iterations = iterations_;
    }

    int n_, m_;
    const SpMat& A_;
    Vec b_;
    std::vector<double> lower_, upper_, cost_;
    std::vector<VarStatus> status_;
    std::vector<double> x_;
    std::vector<int> basic_;
    std::vector<int> art_row_;
    Mat binv_;
    int pivots_since_refactor_ = 0;
    int iterations_ = 0;
};

}  // namespace

LPSolution solve_lp(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo, const Vec& hi) {
    Simplex simplex(c, A, b, lo, hi);
    LPSolution out;
    out.status = simplex.run(out);
    if (out.status != SolveStatus::Optimal) {
        out.primal = Vec::Zero(c.size());
        out.row_duals = Vec::Zero(b.size());
        out.lower_duals = Vec::Zero(c.size());
        out.upper_duals = Vec::Zero(c.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mehrotra predictor-corrector interior point for the gamma-regularized QP.
// All inequalities (A rows plus finite variable bounds) are stacked as
// G x <= h with slacks s and duals z; each Newton step solves the normal
// system (2 gamma I + G^T diag(z/s) G) dx = rhs via dense Cholesky.
// ---------------------------------------------------------------------------
LPSolution solve_qp_regularized(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo,
                                const Vec& hi, double gamma, double tol, int max_iter) {
    if (gamma <= 0.0) throw config_error("solve_qp_regularized: gamma must be positive");
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(b.size());
    if (A.rows() != m || A.cols() != n) throw dimension_error("solve_qp_regularized: A shape mismatch");
    if (lo.size() != n || hi.size() != n) throw dimension_error("solve_qp_regularized: bounds mismatch");

    // Row-major copy for fast row access during normal-matrix assembly.
    Eigen::SparseMatrix<double, Eigen::RowMajor> Ar(A);

    std::vector<int> hi_rows, lo_rows;
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(hi[j])) hi_rows.push_back(j);
        if (std::isfinite(lo[j])) lo_rows.push_back(j);
    }
    const int K = m + static_cast<int>(hi_rows.size()) + static_cast<int>(lo_rows.size());

    LPSolution out;
    out.row_duals = Vec::Zero(m);
    out.lower_duals = Vec::Zero(n);
    out.upper_duals = Vec::Zero(n);

    if (K == 0) {
        out.primal = -c / (2.0 * gamma);
        out.objective = c.dot(out.primal) + gamma * out.primal.squaredNorm();
        out.status = SolveStatus::Optimal;
        return out;
    }

    auto g_mul = [&](const Vec& x) {
        Vec r(K);
        r.head(m) = A * x;
        int o = m;
        for (int j : hi_rows) r[o++] = x[j];
        for (int j : lo_rows) r[o++] = -x[j];
        return r;
    };
    auto gt_mul = [&](const Vec& z) {
        Vec r = Vec::Zero(n);
        if (m > 0) r = A.transpose() * z.head(m);
        int o = m;
        for (int j : hi_rows) r[j] += z[o++];
        for (int j : lo_rows) r[j] -= z[o++];
        return r;
    };
    Vec h(K);
    h.head(m) = b;
    {
        int o = m;
        for (int j : hi_rows) h[o++] = hi[j];
        for (int j : lo_rows) h[o++] = -lo[j];
    }

    // Start: x inside (or on) the box, slacks pushed away from zero.
    Vec x(n);
    for (int j = 0; j < n; ++j) {
        double v = 0.0;
        if (std::isfinite(lo[j]) && std::isfinite(hi[j])) v = 0.5 * (lo[j] + hi[j]);
        else if (std::isfinite(lo[j])) v = lo[j] + 1.0;
        else if (std::isfinite(hi[j])) v = hi[j] - 1.0;
        x[j] = v;
    }
    Vec s = (h - g_mul(x)).cwiseMax(1.0);
    Vec z = Vec::Ones(K);

    Mat M(n, n);
    Eigen::LLT<Mat> llt;
    double mu = 1.0, rd_norm = 0.0, rp_norm = 0.0;
    int iter = 0;
    auto residuals = [&]() {
        Vec r_d = 2.0 * gamma * x + c + gt_mul(z);
        Vec r_p = g_mul(x) + s - h;
        mu = z.dot(s) / K;
        rd_norm = r_d.lpNorm<Eigen::Infinity>();
        rp_norm = r_p.lpNorm<Eigen::Infinity>();
        return std::pair<Vec, Vec>(std::move(r_d), std::move(r_p));
    };

    for (; iter < max_iter; ++iter) {
        auto [r_d, r_p] = residuals();
        if (rd_norm <= tol && rp_norm <= tol && mu <= tol) break;

        Vec d = (z.array() / s.array()).matrix();
        M.setZero();
        M.diagonal().setConstant(2.0 * gamma);
        for (int i = 0; i < m; ++i) {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Ar, i); it; ++it) {
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator jt(Ar, i); jt; ++jt)
                    M(it.col(), jt.col()) += d[i] * it.value() * jt.value();
            }
        }
        {
            int o = m;
            for (int j : hi_rows) M(j, j) += d[o++];
            for (int j : lo_rows) M(j, j) += d[o++];
        }
        llt.compute(M);
        if (llt.info() != Eigen::Success) {
            M.diagonal().array() += 1e-11;
            llt.compute(M);
            if (llt.info() != Eigen::Success)
                throw solver_error("solve_qp_regularized: normal matrix not positive definite");
        }

        auto newton = [&](const Vec& rc) {
            // s dz/z-elimination: dz = v + D (G dx), ds = -r_p - G dx, with
            // v = (z .* r_p - rc) / s and (2gI + G^T D G) dx = -r_d - G^T v.
            Vec v = ((z.array() * r_p.array() - rc.array()) / s.array()).matrix();
            Vec dx = llt.solve(-r_d - gt_mul(v));
            Vec gdx = g_mul(dx);
            Vec dz = v + (d.array() * gdx.array()).matrix();
            Vec ds = -r_p - gdx;
            return std::tuple<Vec, Vec, Vec>(dx, ds, dz);
        };

        auto max_step = [](const Vec& w, const Vec& dw) {
            double a = 1.0;
            for (Eigen::Index i = 0; i < w.size(); ++i)
                if (dw[i] < 0.0) a = std::min(a, -w[i] / dw[i]);
            return a;
        };

        // Affine (predictor) direction.
        Vec rc_aff = (z.array() * s.array()).matrix();
        auto [dx_a, ds_a, dz_a] = newton(rc_aff);
        double ap = max_step(s, ds_a), ad = max_step(z, dz_a);
        double mu_aff = (z + ad * dz_a).dot(s + ap * ds_a) / K;
        double sigma = std::pow(mu_aff / mu, 3);

        // Corrector.
        Vec rc = (z.array() * s.array() + dz_a.array() * ds_a.array() - sigma * mu).matrix();
        auto [dx, ds, dz] = newton(rc);
        ap = std::min(1.0, 0.9995 * max_step(s, ds));
        ad = std::min(1.0, 0.9995 * max_step(z, dz));
        x += ap * dx;
        s += ap * ds;
        z += ad * dz;
    }

    residuals();
    if (rd_norm > 1e-8 || rp_norm > 1e-8 || mu > 1e-8) {
        std::ostringstream msg;
        msg << "solve_qp_regularized: no convergence after " << iter
            << " iterations (dual " << rd_norm << ", primal " << rp_norm << ", mu " << mu << ")";
        throw solver_error(msg.str());
    }

    out.primal = x;
    out.objective = c.dot(x) + gamma * x.squaredNorm();
    out.status = SolveStatus::Optimal;
    out.iterations = iter;
    out.row_duals = z.head(m);
    {
        int o = m;
        for (int j : hi_rows) out.upper_duals[j] = z[o++];
        for (int j : lo_rows) out.lower_duals[j] = z[o++];
    }
    return out;
}

MultiObjectiveSolution solve_multiobjective(const MOLPInstance& instance, int denom) {
    const auto grid = weight_grid(instance.n_objectives(), denom);
    const auto normalized = normalize_costs(instance.costs);

    std::vector<Vec> candidates;
    for (const auto& w : grid) {
        Vec c = weighted_cost(normalized, w);
        LPSolution sol = solve_lp(c, instance.A, instance.b, instance.lower, instance.upper);
        if (sol.status != SolveStatus::Optimal)
            throw solver_error("solve_multiobjective: weighted subproblem " + to_string(sol.status));
        bool dup = false;
        for (const auto& seen : candidates)
            if ((seen - sol.primal).lpNorm<Eigen::Infinity>() <= 1e-7) { dup = true; break; }
        if (!dup) candidates.push_back(std::move(sol.primal));
    }

    std::vector<ObjectiveVector> fronts;
    fronts.reserve(candidates.size());
    for (const auto& pi : candidates) fronts.push_back(evaluate_objectives(instance, pi));

    MultiObjectiveSolution out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < candidates.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(fronts[j], fronts[i], Orientation::Min)) keep = false;
            if (j < i && fronts[j] == fronts[i]) keep = false;
        }
        if (keep) {
            out.pareto_set.push_back(candidates[i]);
            out.pareto_front.push_back(fronts[i]);
        }
    }
    return out;
}

}  // namespace mdfl
