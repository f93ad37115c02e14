#include "modfl/ot_rank.hpp"

#include <cmath>

#include "modfl/rng.hpp"

namespace mdfl {

double kernel_eval(const KernelSpec& kernel, const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw dimension_error("kernel_eval: dimension mismatch");
    const double d2 = (a - b).squaredNorm();
    double k = 0.0;
    for (double s : kernel.bandwidths) k += std::exp(-d2 / (2.0 * s * s));
    return k / static_cast<double>(kernel.bandwidths.size());
}

namespace {

// C_ij = 0.5 |p_i - q_j|^2
Mat half_sqdist(const Mat& p, const Mat& q) {
    const Eigen::Index mm = p.rows(), nn = q.rows();
    Mat c(mm, nn);
    for (Eigen::Index i = 0; i < mm; ++i)
        for (Eigen::Index j = 0; j < nn; ++j) c(i, j) = 0.5 * (p.row(i) - q.row(j)).squaredNorm();
    return c;
}

double lse(const Eigen::ArrayXd& x) {
    const double mx = x.maxCoeff();
    if (!std::isfinite(mx)) return mx;
    return mx + std::log((x - mx).exp().sum());
}

struct SinkhornState {
    Mat c;         // M x N
    Vec log_a;     // source log-weights
    Vec log_b;     // target log-weights
    Vec u, v;      // current potentials
    // Recorded trajectory for gradient unrolling (per full iteration).
    std::vector<double> eps_hist;
    std::vector<Vec> u_hist, v_hist;
    int iterations = 0;
};

void sinkhorn_iterations(SinkhornState& st, double eps, int iters, bool trace) {
    const Eigen::Index mm = st.c.rows(), nn = st.c.cols();
    for (int t = 0; t < iters; ++t) {
        for (Eigen::Index i = 0; i < mm; ++i) {
            Eigen::ArrayXd row = st.log_b.array() + (st.v.array() - st.c.row(i).transpose().array()) / eps;
            st.u[i] = -eps * lse(row);
        }
        for (Eigen::Index j = 0; j < nn; ++j) {
            Eigen::ArrayXd col = st.log_a.array() + (st.u.array() - st.c.col(j).array()) / eps;
            st.v[j] = -eps * lse(col);
        }
        ++st.iterations;
        if (trace) {
            st.eps_hist.push_back(eps);
            st.u_hist.push_back(st.u);
            st.v_hist.push_back(st.v);
        }
    }
}

// Max deviation of the coupling marginals from the prescribed weights.
double marginal_violation(const SinkhornState& st, double eps) {
    const Eigen::Index mm = st.c.rows(), nn = st.c.cols();
    Vec row_sum = Vec::Zero(mm), col_sum = Vec::Zero(nn);
    for (Eigen::Index i = 0; i < mm; ++i) {
        for (Eigen::Index j = 0; j < nn; ++j) {
            const double p = std::exp(st.log_a[i] + st.log_b[j] + (st.u[i] + st.v[j] - st.c(i, j)) / eps);
            row_sum[i] += p;
            col_sum[j] += p;
        }
    }
    double viol = 0.0;
    for (Eigen::Index i = 0; i < mm; ++i)
        viol = std::max(viol, std::abs(row_sum[i] - std::exp(st.log_a[i])));
    for (Eigen::Index j = 0; j < nn; ++j)
        viol = std::max(viol, std::abs(col_sum[j] - std::exp(st.log_b[j])));
    return viol;
}

std::vector<double> annealing_stages(double start, double target) {
    std::vector<double> stages;
    for (double e = start; e > target * (1.0 + 1e-9); e /= 10.0) stages.push_back(e);
    return stages;
}

}  // namespace

EntropicPotentials sinkhorn(const Mat& source, const Mat& target, double epsilon, int max_iter,
                            double tol) {
    if (source.rows() == 0 || target.rows() == 0) throw dimension_error("sinkhorn: empty point set");
    if (source.cols() != target.cols()) throw dimension_error("sinkhorn: dimension mismatch");
    if (!source.allFinite() || !target.allFinite())
        throw dimension_error("sinkhorn: non-finite input points");
    if (epsilon <= 0.0) throw config_error("sinkhorn: epsilon must be positive");

    SinkhornState st;
    st.c = half_sqdist(source, target);
    st.log_a = Vec::Constant(source.rows(), -std::log(static_cast<double>(source.rows())));
    st.log_b = Vec::Constant(target.rows(), -std::log(static_cast<double>(target.rows())));
    st.u = Vec::Zero(source.rows());
    st.v = Vec::Zero(target.rows());

    EntropicPotentials out;
    out.epsilon = epsilon;
    for (int t = 0; t < max_iter; ++t) {
        sinkhorn_iterations(st, epsilon, 1, /*trace=*/false);
        out.marginal_violation = marginal_violation(st, epsilon);
        if (out.marginal_violation <= tol) break;
    }
    out.u = st.u;
    out.v = st.v;
    out.iterations = st.iterations;
    return out;
}

Vec soft_rank(const SoftRankMap& map, const Vec& phi) {
    if (phi.size() != map.target_samples.cols())
        throw dimension_error("soft_rank: point dimension mismatch");
    if (map.v.size() != map.target_samples.rows())
        throw dimension_error("soft_rank: potential length mismatch");
    const Eigen::Index nn = map.target_samples.rows();
    Eigen::ArrayXd logits(nn);
    for (Eigen::Index j = 0; j < nn; ++j)
        logits[j] = (map.v[j] - 0.5 * (phi.transpose() - map.target_samples.row(j)).squaredNorm()) /
                    map.epsilon;
    const double mx = logits.maxCoeff();
    Eigen::ArrayXd w = (logits - mx).exp();
    w /= w.sum();
    return map.target_samples.transpose() * w.matrix();
}

namespace {

struct PooledProblem {
    Mat pooled;    // (m+n) x d mixture samples
    Mat targets;   // (m+n) x d uniform samples
    SinkhornState st;
    bool degenerate = false;
};

PooledProblem setup_pooled(const Mat& x, const Mat& y, const SRMMDConfig& cfg) {
    if (x.rows() < 2 || y.rows() < 2) throw dimension_error("srmmd: need at least 2 samples per set");
    if (x.cols() != y.cols()) throw dimension_error("srmmd: sample dimension mismatch");
    if (cfg.tau <= 0.0 || cfg.tau >= 1.0) throw config_error("srmmd: tau must be in (0,1)");
    if (!x.allFinite() || !y.allFinite()) throw dimension_error("srmmd: non-finite samples");

    PooledProblem p;
    const Eigen::Index m = x.rows(), n = y.rows(), d = x.cols();
    p.pooled.resize(m + n, d);
    p.pooled.topRows(m) = x;
    p.pooled.bottomRows(n) = y;

    p.degenerate = true;
    for (Eigen::Index i = 1; i < p.pooled.rows() && p.degenerate; ++i)
        if ((p.pooled.row(i) - p.pooled.row(0)).lpNorm<Eigen::Infinity>() > 1e-12)
            p.degenerate = false;
    if (p.degenerate) return p;

    Rng rng(substream(cfg.seed, "ot_targets"));
    p.targets.resize(m + n, d);
    for (Eigen::Index i = 0; i < p.targets.rows(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) p.targets(i, j) = rng.uniform01();

    p.st.c = half_sqdist(p.pooled, p.targets);
    p.st.log_a.resize(m + n);
    p.st.log_a.head(m).setConstant(std::log(cfg.tau / static_cast<double>(m)));
    p.st.log_a.tail(n).setConstant(std::log((1.0 - cfg.tau) / static_cast<double>(n)));
    p.st.log_b = Vec::Constant(m + n, -std::log(static_cast<double>(m + n)));
    p.st.u = Vec::Zero(m + n);
    p.st.v = Vec::Zero(m + n);
    return p;
}

void run_annealed(SinkhornState& st, const SRMMDConfig& cfg, bool trace) {
    for (double e : annealing_stages(cfg.anneal_start, cfg.epsilon))
        sinkhorn_iterations(st, e, cfg.anneal_iters, trace);
    sinkhorn_iterations(st, cfg.epsilon, cfg.final_iters, trace);
}

// Soft-rank images of all pooled points: row-softmax of (v_j - C_ij)/eps
// times the target matrix. Returns the softmax weights when requested.
Mat map_pooled(const SinkhornState& st, const Mat& targets, double eps, Mat* weights_out) {
    const Eigen::Index mm = st.c.rows(), nn = st.c.cols();
    Mat w(mm, nn);
    for (Eigen::Index i = 0; i < mm; ++i) {
        Eigen::ArrayXd logits = (st.v.array() - st.c.row(i).transpose().array()) / eps;
        const double mx = logits.maxCoeff();
        Eigen::ArrayXd e = (logits - mx).exp();
        w.row(i) = (e / e.sum()).matrix();
    }
    Mat mapped = w * targets;
    if (weights_out) *weights_out = std::move(w);
    return mapped;
}

// Biased (V-statistic) MMD^2 between mapped[0..m) and mapped[m..m+n), plus
// the gradient with respect to the mapped points when grad != nullptr.
double mmd2(const Mat& mapped, Eigen::Index m, const KernelSpec& kernel, Mat* grad) {
    const Eigen::Index total = mapped.rows();
    const Eigen::Index n = total - m;
    if (grad) grad->setZero(total, mapped.cols());
    const double nb = static_cast<double>(kernel.bandwidths.size());

    auto accumulate = [&](Eigen::Index i, Eigen::Index j, double coeff) -> double {
        const Vec diff = mapped.row(i) - mapped.row(j);
        const double d2 = diff.squaredNorm();
        double k = 0.0;
        if (grad) {
            Vec g = Vec::Zero(diff.size());
            for (double s : kernel.bandwidths) {
                const double e = std::exp(-d2 / (2.0 * s * s));
                k += e;
                g -= (e / (s * s)) * diff;
            }
            g /= nb;
            grad->row(i) += coeff * g.transpose();
            grad->row(j) -= coeff * g.transpose();
        } else {
            for (double s : kernel.bandwidths) k += std::exp(-d2 / (2.0 * s * s));
        }
        return coeff * k / nb;
    };

    double value = 0.0;
    const double cxx = 1.0 / static_cast<double>(m * m);
    const double cyy = 1.0 / static_cast<double>(n * n);
    const double cxy = -2.0 / static_cast<double>(m * n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) value += accumulate(i, j, cxx);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) value += accumulate(m + i, m + j, cyy);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) value += accumulate(i, m + j, cxy);
    return value;
}

}  // namespace

SRMMDResult srmmd(const Mat& x, const Mat& y, const SRMMDConfig& config) {
    PooledProblem p = setup_pooled(x, y, config);
    SRMMDResult out;
    if (p.degenerate) {
        out.degenerate = true;
        return out;
    }
    run_annealed(p.st, config, /*trace=*/false);
    out.iterations = p.st.iterations;
    out.marginal_violation = marginal_violation(p.st, config.epsilon);
    Mat mapped = map_pooled(p.st, p.targets, config.epsilon, nullptr);
    out.value = std::max(0.0, mmd2(mapped, x.rows(), config.kernel, nullptr));
    return out;
}

SRMMDGradient srmmd_grad(const Mat& x, const Mat& y, const SRMMDConfig& config) {
    PooledProblem p = setup_pooled(x, y, config);
    SRMMDGradient out;
    if (p.degenerate) {
        out.result.degenerate = true;
        out.grad_x = Mat::Zero(x.rows(), x.cols());
        out.grad_y = Mat::Zero(y.rows(), y.cols());
        return out;
    }
    run_annealed(p.st, config, /*trace=*/true);
    SinkhornState& st = p.st;
    out.result.iterations = st.iterations;
    out.result.marginal_violation = marginal_violation(st, config.epsilon);

    Mat softmax_w;
    Mat mapped = map_pooled(st, p.targets, config.epsilon, &softmax_w);
    Mat g_mapped;
    const double raw = mmd2(mapped, x.rows(), config.kernel, &g_mapped);
    out.result.value = std::max(0.0, raw);
    const Eigen::Index mm = st.c.rows(), nn = st.c.cols();
    Mat g_c = Mat::Zero(mm, nn);
    Vec g_v = Vec::Zero(nn);

    if (raw >= 0.0) {
        // Rank-map backward: R_i = sum_j W_ij psi_j with W = row-softmax of
        // l_ij = (v_j - C_ij)/eps. dL/dl_ij = W_ij (psi_j - R_i) . gR_i.
        for (Eigen::Index i = 0; i < mm; ++i) {
            for (Eigen::Index j = 0; j < nn; ++j) {
                const double gl =
                    softmax_w(i, j) * (p.targets.row(j) - mapped.row(i)).dot(g_mapped.row(i));
                g_v[j] += gl / config.epsilon;
                g_c(i, j) -= gl / config.epsilon;
            }
        }
    }

    // Reverse sweep over the recorded Sinkhorn iterations. Iteration t did
    //   u_i = -eps lse_j(log_b_j + (v^{t-1}_j - C_ij)/eps)
    //   v_j = -eps lse_i(log_a_i + (u^t_i   - C_ij)/eps)
    Vec g_u = Vec::Zero(mm);
    for (int t = static_cast<int>(st.u_hist.size()) - 1; t >= 0; --t) {
        const double eps = st.eps_hist[static_cast<std::size_t>(t)];
        const Vec& ut = st.u_hist[static_cast<std::size_t>(t)];
        const Vec& vprev = (t > 0) ? st.v_hist[static_cast<std::size_t>(t - 1)]
                                   : Vec(Vec::Zero(nn));

        // v-update backward (column softmax over i).
        for (Eigen::Index j = 0; j < nn; ++j) {
            if (g_v[j] == 0.0) continue;
            Eigen::ArrayXd col = st.log_a.array() + (ut.array() - st.c.col(j).array()) / eps;
            const double mx = col.maxCoeff();
            Eigen::ArrayXd w = (col - mx).exp();
            w /= w.sum();
            for (Eigen::Index i = 0; i < mm; ++i) {
                g_u[i] -= g_v[j] * w[i];
                g_c(i, j) += g_v[j] * w[i];
            }
        }
        g_v.setZero();

        // u-update backward (row softmax over j).
        for (Eigen::Index i = 0; i < mm; ++i) {
            if (g_u[i] == 0.0) continue;
            Eigen::ArrayXd row = st.log_b.array() + (vprev.array() - st.c.row(i).transpose().array()) / eps;
            const double mx = row.maxCoeff();
            Eigen::ArrayXd w = (row - mx).exp();
            w /= w.sum();
            for (Eigen::Index j = 0; j < nn; ++j) {
                g_v[j] -= g_u[i] * w[j];
                g_c(i, j) += g_u[i] * w[j];
            }
        }
        g_u.setZero();
    }
    // Gradient on v^{(0)} = 0 (constant) is discarded.

    // C_ij = 0.5 |z_i - psi_j|^2  =>  dz_i += g_c(i,j) (z_i - psi_j).
    Mat g_pooled = Mat::Zero(mm, p.pooled.cols());
    for (Eigen::Index i = 0; i < mm; ++i)
        for (Eigen::Index j = 0; j < nn; ++j)
            if (g_c(i, j) != 0.0)
                g_pooled.row(i) += g_c(i, j) * (p.pooled.row(i) - p.targets.row(j));

    out.grad_x = g_pooled.topRows(x.rows());
    out.grad_y = g_pooled.bottomRows(y.rows());
    return out;
}

}  // namespace mdfl
