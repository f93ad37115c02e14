#include "modfl/losses.hpp"

#include <cmath>
#include <limits>

#include "modfl/scalarize.hpp"

namespace mdfl {

LandscapeLossResult landscape_loss(const MOLPInstance& instance,
                                   const std::vector<Vec>& predicted_costs,
                                   const std::vector<Vec>& cache_solutions,
                                   const SRMMDConfig& ot_config, bool with_gradient) {
    const int t = instance.n_objectives();
    const int n = instance.n_vars();
    if (static_cast<int>(predicted_costs.size()) != t)
        throw dimension_error("landscape_loss: predicted cost count != T");

    LandscapeLossResult out;
    out.grad_predicted.assign(t, Vec::Zero(n));
    if (cache_solutions.size() < 2) {
        out.skipped = true;
        return out;
    }

    const auto norm_true = normalize_costs(instance.costs);
    const auto norm_pred = normalize_costs(predicted_costs);

    const Eigen::Index s = static_cast<Eigen::Index>(cache_solutions.size());
    Mat true_branch(s, t), pred_branch(s, t);
    for (Eigen::Index i = 0; i < s; ++i) {
        const Vec& pi = cache_solutions[static_cast<std::size_t>(i)];
        if (pi.size() != n) throw dimension_error("landscape_loss: cached solution length != n");
        for (int j = 0; j < t; ++j) {
            true_branch(i, j) = norm_true.per_objective[j].values.dot(pi);
            pred_branch(i, j) = norm_pred.per_objective[j].values.dot(pi);
        }
    }

    if (!with_gradient) {
        SRMMDResult r = srmmd(true_branch, pred_branch, ot_config);
        out.value = r.value;
        out.sinkhorn_iterations = r.iterations;
        return out;
    }

    SRMMDGradient g = srmmd_grad(true_branch, pred_branch, ot_config);
    out.value = g.result.value;
    out.sinkhorn_iterations = g.result.iterations;

    // d pred_branch(i,j) / d BN(y_hat^j) = pi_i, then pull back through the
    // normalization to the raw predicted costs.
    for (int j = 0; j < t; ++j) {
        Vec g_bn = Vec::Zero(n);
        for (Eigen::Index i = 0; i < s; ++i)
            g_bn += g.grad_y(i, j) * cache_solutions[static_cast<std::size_t>(i)];
        out.grad_predicted[j] = instance_normalize_backward(norm_pred.per_objective[j], g_bn);
    }
    return out;
}

ParetoSetLossResult pareto_set_loss(const Vec& pi_hat, const std::vector<Vec>& pareto_set) {
    if (pareto_set.empty()) throw config_error("pareto_set_loss: empty Pareto set");
    ParetoSetLossResult out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pareto_set.size(); ++k) {
        if (pareto_set[k].size() != pi_hat.size())
            throw dimension_error("pareto_set_loss: solution length mismatch");
        const double d = (pi_hat - pareto_set[k]).norm();
        if (d < best) {
            best = d;
            out.nearest_index = static_cast<int>(k);
        }
    }
    out.value = best;
    const Vec diff = pi_hat - pareto_set[static_cast<std::size_t>(out.nearest_index)];
    out.grad_pi = diff / std::sqrt(best * best + 1e-12);
    return out;
}

DecisionLossResult decision_loss(const MOLPInstance& instance, const Vec& pi_hat,
                                 bool use_raw_costs) {
    const int t = instance.n_objectives();
    if (pi_hat.size() != instance.n_vars())
        throw dimension_error("decision_loss: solution length != n_vars");
    DecisionLossResult out;
    out.grad_pi = Vec::Zero(pi_hat.size());
    if (use_raw_costs) {
        for (const auto& y : instance.costs) out.grad_pi += y;
    } else {
        const auto norm = normalize_costs(instance.costs);
        for (const auto& bn : norm.per_objective) out.grad_pi += bn.values;
    }
    out.grad_pi /= static_cast<double>(t);
    out.value = out.grad_pi.dot(pi_hat);
    return out;
}

LossReport total_loss(const std::vector<LossComponents>& per_instance,
                      const std::array<double, 3>& lambdas) {
    for (double l : lambdas)
        if (l < 0.0) throw config_error("total_loss: negative lambda");
    LossReport report;
    report.lambdas = lambdas;
    report.per_instance = per_instance;
    if (!per_instance.empty()) {
        for (const auto& c : per_instance) {
            report.mean.landscape += c.landscape;
            report.mean.decision += c.decision;
            report.mean.pareto_set += c.pareto_set;
        }
        const double inv = 1.0 / static_cast<double>(per_instance.size());
        report.mean.landscape *= inv;
        report.mean.decision *= inv;
        report.mean.pareto_set *= inv;
    }
    report.total = lambdas[0] * report.mean.landscape + lambdas[1] * report.mean.decision +
                   lambdas[2] * report.mean.pareto_set;
    return report;
}

}  // namespace mdfl
