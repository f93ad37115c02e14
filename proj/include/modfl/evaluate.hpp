#pragma once

#include <functional>
#include <memory>

#include "modfl/metrics.hpp"
#include "modfl/molp.hpp"
#include "modfl/ot_rank.hpp"
#include "modfl/predictor.hpp"

namespace mdfl {

// Returns predicted costs in the benchmark's native orientation, one vector
// per objective.
using PredictFn = std::function<std::vector<Vec>(const MOLPInstance&)>;

PredictFn oracle_predict_fn();                             // returns the true coefficients
PredictFn model_predict_fn(std::shared_ptr<const PredictorParams> params);

struct EvaluateConfig {
    int denom = 5;
    ReferenceRule reference_rule = ReferenceRule::NadirOfOptima;
    bool with_loss_diagnostics = false;  // landscape/Pareto-set values per instance
    SRMMDConfig ot;                      // used only for the diagnostics
};

struct InstanceEvaluation {
    int instance_id = 0;
    std::vector<Vec> solutions;          // deduplicated weight-grid optima of the predicted problem
    FrontApproximation predicted_front;  // true-cost objective vectors, Pareto-filtered
    FrontApproximation true_front;
    double gd = 0.0;
    double mpfe = 0.0;
    double har = 0.0;
    bool har_valid = false;  // false when the true front has zero hypervolume
    double landscape = 0.0;  // diagnostics (0 unless requested)
    double pareto_set_dist = 0.0;
};

struct EvaluationResult {
    MetricsRow row;  // means over evaluated instances (HAR over valid ones)
    std::vector<InstanceEvaluation> per_instance;
    int har_skipped = 0;
    int regret_skipped_terms = 0;
};

// Inference with gamma = 0: exact LP solves over the full weight grid on the
// predicted (instance-normalized) costs; every metric is computed against the
// true instance data.
EvaluationResult evaluate_method(const Dataset& dataset, const std::vector<int>& indices,
                                 const PredictFn& predict_fn, const std::string& method_name,
                                 const EvaluateConfig& config = {});

void write_per_instance_json(const EvaluationResult& result, const std::filesystem::path& path);

}  // namespace mdfl
