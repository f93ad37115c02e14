#include "modfl/evaluate.hpp"

#include <fstream>

#include "json.hpp"
#include "modfl/benchmarks.hpp"
#include "modfl/losses.hpp"
#include "modfl/rng.hpp"
#include "modfl/scalarize.hpp"
#include "modfl/solver.hpp"

namespace mdfl {

PredictFn oracle_predict_fn() {
    return [](const MOLPInstance& inst) { return native_costs(inst); };
}

PredictFn model_predict_fn(std::shared_ptr<const PredictorParams> params) {
    return [params](const MOLPInstance& inst) { return predict(*params, inst.features); };
}

EvaluationResult evaluate_method(const Dataset& dataset, const std::vector<int>& indices,
                                 const PredictFn& predict_fn, const std::string& method_name,
                                 const EvaluateConfig& config) {
    if (indices.empty()) throw config_error("evaluate_method: empty instance selection");

    EvaluationResult result;
    result.row.method = method_name;

    std::vector<const MOLPInstance*> regret_instances;
    std::vector<std::vector<Vec>> regret_solutions;
    double gd_sum = 0.0, mpfe_sum = 0.0, har_sum = 0.0;
    int har_count = 0;

    for (int idx : indices) {
        const MOLPInstance& inst = dataset.instances.at(static_cast<std::size_t>(idx));
        const int t = inst.n_objectives();
        std::vector<Vec> y_native = predict_fn(inst);
        if (static_cast<int>(y_native.size()) != t)
            throw dimension_error("evaluate_method: predictor returned " +
                                  std::to_string(y_native.size()) + " objectives, expected " +
                                  std::to_string(t));
        std::vector<Vec> y_canon = y_native;
        if (inst.orientation == Orientation::Max)
            for (auto& y : y_canon) y = -y;

        InstanceEvaluation ev;
        ev.instance_id = inst.id;

        // Inference: exact LP per grid weight on the predicted costs.
        const auto norm_pred = normalize_costs(y_canon);
        for (const auto& w : weight_grid(t, config.denom)) {
            LPSolution sol = solve_lp(weighted_cost(norm_pred, w), inst.A, inst.b, inst.lower,
                                      inst.upper);
            if (sol.status != SolveStatus::Optimal)
                throw solver_error("evaluate_method: inference LP " + to_string(sol.status));
            bool dup = false;
            for (const auto& seen : ev.solutions)
                if ((seen - sol.primal).lpNorm<Eigen::Infinity>() <= 1e-7) {
                    dup = true;
                    break;
                }
            if (!dup) ev.solutions.push_back(std::move(sol.primal));
        }

        // Decision quality of those solutions under the true costs.
        std::vector<ObjectiveVector> achieved;
        achieved.reserve(ev.solutions.size());
        for (const auto& pi : ev.solutions) achieved.push_back(evaluate_objectives(inst, pi));
        ev.predicted_front = pareto_filter(achieved, Orientation::Min);
        ev.predicted_front.source = FrontApproximation::Source::Predicted;
        ev.true_front = pareto_filter(inst.pareto_front, Orientation::Min);
        ev.true_front.source = FrontApproximation::Source::True;

        ev.gd = gd(ev.predicted_front, ev.true_front);
        ev.mpfe = mpfe(ev.predicted_front, ev.true_front);

        std::vector<ObjectiveVector> optima_values;
        for (int j = 0; j < t; ++j) {
            LPSolution opt = solve_lp(inst.costs[j], inst.A, inst.b, inst.lower, inst.upper);
            if (opt.status != SolveStatus::Optimal)
                throw solver_error("evaluate_method: single-objective LP " + to_string(opt.status));
            optima_values.push_back(evaluate_objectives(inst, opt.primal));
        }
        const Vec ref = reference_point(optima_values, Orientation::Min, config.reference_rule);
        try {
            ev.har = har(ev.predicted_front, ev.true_front, ref);
            ev.har_valid = true;
            har_sum += ev.har;
            ++har_count;
        } catch (const solver_error&) {
            ++result.har_skipped;
        }

        if (config.with_loss_diagnostics) {
            SRMMDConfig ot = config.ot;
            ot.seed = substream(config.ot.seed, "ot_eval", static_cast<std::uint64_t>(inst.id));
            LandscapeLossResult ll =
                landscape_loss(inst, y_canon, inst.pareto_set, ot, /*with_gradient=*/false);
            ev.landscape = ll.value;
            double ps = 0.0;
            for (const auto& pi : ev.solutions)
                ps += pareto_set_loss(pi, inst.pareto_set).value;
            ev.pareto_set_dist = ps / static_cast<double>(ev.solutions.size());
        }

        gd_sum += ev.gd;
        mpfe_sum += ev.mpfe;
        regret_instances.push_back(&inst);
        regret_solutions.push_back(ev.solutions);
        result.per_instance.push_back(std::move(ev));
    }

    RegretResult reg = regret(regret_instances, regret_solutions);
    result.regret_skipped_terms = reg.skipped_terms;
    result.row.gd = gd_sum / static_cast<double>(indices.size());
    result.row.mpfe = mpfe_sum / static_cast<double>(indices.size());
    result.row.har = har_count > 0 ? har_sum / har_count : 0.0;
    result.row.regret_per_objective = reg.per_objective;
    result.row.regret_mean = reg.mean;
    return result;
}

void write_per_instance_json(const EvaluationResult& result, const std::filesystem::path& path) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& ev : result.per_instance) {
        nlohmann::json fronts_pred = nlohmann::json::array();
        for (const auto& p : ev.predicted_front.points) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p[i]);
            fronts_pred.push_back(std::move(row));
        }
        out.push_back({{"instance_id", ev.instance_id},
                       {"n_solutions", ev.solutions.size()},
                       {"gd", ev.gd},
                       {"mpfe", ev.mpfe},
                       {"har", ev.har_valid ? nlohmann::json(ev.har) : nlohmann::json()},
                       {"predicted_front", std::move(fronts_pred)},
                       {"landscape", ev.landscape},
                       {"pareto_set_dist", ev.pareto_set_dist}});
    }
    std::ofstream f(path);
    if (!f) throw parse_error("cannot write per-instance JSON " + path.string());
    f << out.dump(1) << "\n";
}

}  // namespace mdfl
