#include "modfl/dslp.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "modfl/solver.hpp"

namespace mdfl {

namespace {
constexpr double kSlackTol = 1e-7;
constexpr double kDualTol = 1e-7;
constexpr double kDamping = 1e-8;
}  // namespace

DiffSolution dslp_forward(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo,
                          const Vec& hi, double gamma) {
    if (gamma <= 0.0)
        throw config_error("dslp_forward: gamma must be positive (gamma=0 is inference, use solve_lp)");
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(b.size());

    LPSolution qp = solve_qp_regularized(c, A, b, lo, hi, gamma);

    // Folded constraint rows: A rows, then finite upper bounds, then negated
    // finite lower bounds (same order as the QP solver's duals).
    struct Row {
        int var = -1;      // -1 for A rows
        double sign = 1.0; // +1 upper bound, -1 lower bound
        int a_row = -1;
        double rhs = 0.0;
        double dual = 0.0;
        double slack = 0.0;
    };
    std::vector<Row> rows;
    Vec ax = A * qp.primal;
    for (int i = 0; i < m; ++i)
        rows.push_back({-1, 1.0, i, b[i], qp.row_duals[i], b[i] - ax[i]});
    for (int j = 0; j < n; ++j)
        if (std::isfinite(hi[j]))
            rows.push_back({j, 1.0, -1, hi[j], qp.upper_duals[j], hi[j] - qp.primal[j]});
    for (int j = 0; j < n; ++j)
        if (std::isfinite(lo[j]))
            rows.push_back({j, -1.0, -1, -lo[j], qp.lower_duals[j], qp.primal[j] - lo[j]});

    DiffSolution out;
    out.primal_ = qp.primal;
    out.gamma_ = gamma;
    out.n_ = n;
    out.duals_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out.duals_[static_cast<Eigen::Index>(i)] = rows[i].dual;

    // Active-set reduction: rows that are clearly inactive (slack > tol and
    // dual < tol) drop out of the KKT system entirely; rows where both are
    // near zero are degenerate and trigger diagonal damping.
    std::vector<int> kept;
    bool ambiguous = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool inactive = rows[i].slack > kSlackTol && rows[i].dual < kDualTol;
        if (inactive) continue;
        if (rows[i].slack <= kSlackTol && rows[i].dual <= kDualTol) ambiguous = true;
        kept.push_back(static_cast<int>(i));
    }
    const int k = static_cast<int>(kept.size());

    // [ 2*gamma*I   G_k^T ] [dpi/dc]   [-I]
    // [ Z_k G_k     D_k   ] [dl/dc ] = [ 0],  D_k = diag(G_k pi - h_k)
    Mat kkt = Mat::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n).diagonal().setConstant(2.0 * gamma);
    Eigen::SparseMatrix<double, Eigen::RowMajor> Ar(A);
    for (int r = 0; r < k; ++r) {
        const Row& row = rows[static_cast<std::size_t>(kept[r])];
        if (row.var >= 0) {
            kkt(row.var, n + r) = row.sign;
            kkt(n + r, row.var) = row.dual * row.sign;
        } else {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Ar, row.a_row); it;
                 ++it) {
                kkt(it.col(), n + r) = it.value();
                kkt(n + r, it.col()) = row.dual * it.value();
            }
        }
        kkt(n + r, n + r) = -row.slack;
    }

    auto factor = [&](Mat& sys) {
        auto lu = std::make_shared<Eigen::PartialPivLU<Mat>>(sys);
        return lu;
    };

    if (ambiguous) {
        kkt.diagonal().array() += kDamping;
        out.damped_ = true;
    }
    out.lu_ = factor(kkt);
    double rcond = out.lu_->rcond();
    if (!(rcond > 1e-14)) {
        if (!out.damped_) {
            kkt.diagonal().array() += kDamping;
            out.damped_ = true;
            out.lu_ = factor(kkt);
            rcond = out.lu_->rcond();
        }
        if (!(rcond > 1e-14)) {
            std::ostringstream msg;
            msg << "dslp_forward: singular KKT system after damping (rcond=" << rcond
                << ", active rows=" << k << ")";
            throw solver_error(msg.str());
        }
    }
    out.kkt_ = std::move(kkt);
    return out;
}

const Mat& DiffSolution::jacobian() const {
    if (!jacobian_cache_) {
        const int n = n_;
        const int size = static_cast<int>(kkt_.rows());
        Mat rhs = Mat::Zero(size, n);
        rhs.topLeftCorner(n, n) = -Mat::Identity(n, n);
        Mat full = lu_->solve(rhs);
        if (!full.allFinite()) throw solver_error("dslp: non-finite Jacobian");
        jacobian_cache_ = std::make_shared<Mat>(full.topRows(n));
    }
    return *jacobian_cache_;
}

Vec DiffSolution::vjp(const Vec& grad_out) const {
    if (grad_out.size() != n_) throw dimension_error("dslp backward: grad_out length mismatch");
    const int size = static_cast<int>(kkt_.rows());
    Vec rhs = Vec::Zero(size);
    rhs.head(n_) = grad_out;
    Vec w = lu_->transpose().solve(rhs);
    if (!w.allFinite()) throw solver_error("dslp backward: non-finite solve");
    return -w.head(n_);
}

}  // namespace mdfl
