#pragma once

#include <Eigen/LU>
#include <memory>

#include "modfl/molp.hpp"

namespace mdfl {

// Differentiable solution of the gamma-regularized scalarized problem
//   min c.pi + gamma |pi|^2   s.t.  A pi <= b, lo <= pi <= hi.
//
// The forward pass solves the QP; sensitivities come from differentiating the
// KKT conditions (stationarity c + 2 gamma pi + G^T lambda = 0 plus
// complementary slackness) on the active set, with variable bounds folded
// into G as explicit rows. Finite differences are the sign arbiter for the
// system's right-hand side; the tests pin that down.
class DiffSolution {
  public:
    const Vec& primal() const { return primal_; }
    const Vec& duals() const { return duals_; }  // one multiplier per folded row
    double gamma() const { return gamma_; }
    bool damped() const { return damped_; }

    // d pi_hat / d c, materialized on first use (n x n).
    const Mat& jacobian() const;

    // grad_out^T * (d pi_hat / d c) via one transposed KKT solve.
    Vec vjp(const Vec& grad_out) const;

  private:
    friend DiffSolution dslp_forward(const Vec&, const SpMat&, const Vec&, const Vec&, const Vec&,
                                     double);
    Vec primal_;
    Vec duals_;
    double gamma_ = 0.0;
    bool damped_ = false;
    int n_ = 0;
    Mat kkt_;                                       // reduced (n+k) x (n+k) system
    std::shared_ptr<Eigen::PartialPivLU<Mat>> lu_;  // factorization of kkt_
    mutable std::shared_ptr<Mat> jacobian_cache_;
};

// Throws config_error for gamma <= 0 (inference uses solve_lp directly) and
// solver_error carrying a condition estimate if the KKT system stays singular
// after damping.
DiffSolution dslp_forward(const Vec& c, const SpMat& A, const Vec& b, const Vec& lo,
                          const Vec& hi, double gamma);

}  // namespace mdfl
