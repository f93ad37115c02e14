#include "modfl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "json.hpp"
#include "modfl/benchmarks.hpp"
#include "modfl/dslp.hpp"
#include "modfl/rng.hpp"
#include "modfl/scalarize.hpp"
#include "modfl/solver.hpp"

namespace mdfl {

SolutionCache::SolutionCache(std::size_t n_instances, int capacity)
    : pools_(n_instances), capacity_(capacity) {
    if (capacity < 1) throw config_error("SolutionCache: capacity must be positive");
}

bool SolutionCache::insert(std::size_t instance_index, const MOLPInstance& instance,
                           const Vec& solution) {
    if (instance_index >= pools_.size()) throw contract_error("SolutionCache: index out of range");
    if (!check_feasible(instance, solution, 1e-6))
        throw contract_error("SolutionCache: refusing to cache an infeasible solution");
    auto& pool = pools_[instance_index];
    for (const auto& seen : pool)
        if ((seen - solution).lpNorm<Eigen::Infinity>() <= 1e-7) return false;
    pool.push_back(solution);
    if (static_cast<int>(pool.size()) > capacity_) pool.erase(pool.begin());
    return true;
}

const std::vector<Vec>& SolutionCache::solutions(std::size_t instance_index) const {
    if (instance_index >= pools_.size()) throw contract_error("SolutionCache: index out of range");
    return pools_[instance_index];
}

std::vector<int> SolutionCache::sizes() const {
    std::vector<int> out;
    out.reserve(pools_.size());
    for (const auto& p : pools_) out.push_back(static_cast<int>(p.size()));
    return out;
}

SolutionCache seed_cache(const Dataset& dataset, int capacity) {
    SolutionCache cache(dataset.instances.size(), capacity);
    int flagged = 0;
    for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
        for (const auto& pi : dataset.instances[i].pareto_set)
            cache.insert(i, dataset.instances[i], pi);
        if (cache.solutions(i).size() < 2) ++flagged;
    }
    if (flagged > 0)
        std::cerr << "seed_cache: " << flagged
                  << " instance(s) have fewer than 2 cached solutions; landscape loss will skip them\n";
    return cache;
}

namespace {

struct EffectiveLambdas {
    std::array<double, 3> values;  // l, d, ps after ablation
};

EffectiveLambdas effective_lambdas(const TrainConfig& cfg) {
    for (double l : cfg.lambdas)
        if (l < 0.0) throw config_error("train: negative lambda");
    EffectiveLambdas e{cfg.lambdas};
    if (cfg.ablate_landscape) e.values[0] = 0.0;
    if (cfg.ablate_decision) e.values[1] = 0.0;
    if (cfg.ablate_pareto_set) e.values[2] = 0.0;
    return e;
}

SRMMDConfig ot_config(const TrainConfig& cfg, std::uint64_t seed) {
    SRMMDConfig ot;
    ot.epsilon = cfg.ot_epsilon;
    ot.tau = cfg.ot_tau;
    ot.anneal_start = cfg.ot_anneal_start;
    ot.anneal_iters = cfg.ot_anneal_iters;
    ot.final_iters = cfg.ot_final_iters;
    ot.seed = seed;
    return ot;
}

PredictorConfig predictor_config(const Dataset& ds, const TrainConfig& cfg) {
    PredictorConfig pc;
    pc.input_dim = static_cast<int>(ds.instances.at(0).features.cols());
    pc.trunk_width = cfg.trunk_width;
    pc.head_width = cfg.head_width;
    pc.n_heads = ds.instances.at(0).n_objectives();
    pc.sigmoid_output = ds.meta.costs_are_probabilities;
    pc.seed = substream(cfg.seed, "init");
    return pc;
}

std::vector<Vec> canonical_from_native(const MOLPInstance& inst, const std::vector<Vec>& native) {
    std::vector<Vec> canon = native;
    if (inst.orientation == Orientation::Max)
        for (auto& y : canon) y = -y;
    return canon;
}

// One MoDFL forward/backward on a single instance. Returns false on a solver
// failure (counted by the caller).
struct InstanceWork {
    LossComponents components;
    bool landscape_skipped = false;
};

bool modfl_instance(const MOLPInstance& inst, std::size_t idx, const TrainConfig& cfg,
                    const EffectiveLambdas& lam, const PredictorParams* params,
                    SolutionCache* cache, Rng* solve_gate, std::uint64_t ot_seed,
                    bool with_grad, PredictorGradients* grads, InstanceWork& work) {
    const double sign = native_sign(inst);
    const int t = inst.n_objectives();

    GradientTape tape;
    std::vector<Vec> y_native;
    if (cfg.oracle_predictor)
        y_native = native_costs(inst);
    else
        y_native = predict(*params, inst.features, with_grad ? &tape : nullptr);
    std::vector<Vec> y_canon = canonical_from_native(inst, y_native);

    try {
        const auto norm_pred = normalize_costs(y_canon);
        const Vec c = weighted_cost(norm_pred, uniform_weights(t));
        DiffSolution diff = dslp_forward(c, inst.A, inst.b, inst.lower, inst.upper, cfg.gamma);
        const Vec& pi_hat = diff.primal();

        // Cache refresh from the predicted problem (Algorithm 1's solver
        // gate). Only the training pass mutates the cache.
        if (cache && solve_gate && solve_gate->uniform01() < cfg.p_solve) {
            const auto grid = weight_grid(t, cfg.denom);
            for (int k = 0; k < cfg.refresh_weights; ++k) {
                const auto& w = grid[solve_gate->uniform_index(grid.size())];
                LPSolution sol =
                    solve_lp(weighted_cost(norm_pred, w), inst.A, inst.b, inst.lower, inst.upper);
                if (sol.status == SolveStatus::Optimal) cache->insert(idx, inst, sol.primal);
            }
        }

        std::vector<Vec> grad_y_canon(t, Vec::Zero(inst.n_vars()));
        if (lam.values[0] > 0.0) {
            const auto& pool = cache ? cache->solutions(idx) : inst.pareto_set;
            LandscapeLossResult ll =
                landscape_loss(inst, y_canon, pool, ot_config(cfg, ot_seed), with_grad);
            work.components.landscape = ll.value;
            work.landscape_skipped = ll.skipped;
            if (with_grad)
                for (int j = 0; j < t; ++j) grad_y_canon[j] += lam.values[0] * ll.grad_predicted[j];
        }

        Vec grad_pi = Vec::Zero(inst.n_vars());
        if (lam.values[1] > 0.0) {
            DecisionLossResult dl = decision_loss(inst, pi_hat, cfg.decision_loss_raw);
            work.components.decision = dl.value;
            grad_pi += lam.values[1] * dl.grad_pi;
        }
        if (lam.values[2] > 0.0) {
            ParetoSetLossResult pl = pareto_set_loss(pi_hat, inst.pareto_set);
            work.components.pareto_set = pl.value;
            grad_pi += lam.values[2] * pl.grad_pi;
        }

        if (with_grad && !cfg.oracle_predictor) {
            if (grad_pi.squaredNorm() > 0.0) {
                const Vec grad_c = diff.vjp(grad_pi);
                for (int j = 0; j < t; ++j)
                    grad_y_canon[j] += instance_normalize_backward(norm_pred.per_objective[j],
                                                                   grad_c / static_cast<double>(t));
            }
            std::vector<Vec> grad_y_native(t);
            for (int j = 0; j < t; ++j) grad_y_native[j] = sign * grad_y_canon[j];
            PredictorGradients g = backward(*params, tape, grad_y_native);
            accumulate(*grads, g);
        }
        return true;
    } catch (const solver_error& e) {
        std::cerr << "train_modfl: instance " << inst.id << ": " << e.what() << "\n";
        return false;
    }
}

double instance_total(const LossComponents& c, const EffectiveLambdas& lam) {
    return lam.values[0] * c.landscape + lam.values[1] * c.decision + lam.values[2] * c.pareto_set;
}

}  // namespace

TrainResult train_modfl(const Dataset& dataset, const TrainConfig& config) {
    validate_dataset(dataset);
    if (dataset.train_idx.empty()) throw config_error("train_modfl: empty training split");
    if (config.p_solve < 0.0 || config.p_solve > 1.0)
        throw config_error("train_modfl: p_solve must be in [0,1]");
    if (config.gamma <= 0.0) throw config_error("train_modfl: gamma must be positive");
    const EffectiveLambdas lam = effective_lambdas(config);

    TrainResult result;
    PredictorParams params;
    if (!config.oracle_predictor) params = init_predictor(predictor_config(dataset, config));
    SolutionCache cache = seed_cache(dataset, config.cache_capacity);

    Rng gate(substream(config.seed, "training"));
    Rng shuffler(substream(config.seed, "shuffle"));

    double best_val = std::numeric_limits<double>::infinity();
    PredictorParams best_params = params;
    int no_improve = 0;
    long long visits = 0, failures = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<int> order = dataset.train_idx;
        shuffler.shuffle(order);

        LossComponents epoch_sum;
        int epoch_count = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            PredictorGradients grads = config.oracle_predictor
                                           ? PredictorGradients{}
                                           : zero_gradients(params.config);
            int batch_count = 0;
            for (std::size_t k = start; k < stop; ++k) {
                const int idx = order[k];
                const MOLPInstance& inst = dataset.instances[static_cast<std::size_t>(idx)];
                InstanceWork work;
                ++visits;
                const std::uint64_t ot_seed = substream(config.seed, "ot_train",
                                                        static_cast<std::uint64_t>(inst.id),
                                                        static_cast<std::uint64_t>(epoch));
                if (modfl_instance(inst, static_cast<std::size_t>(idx), config, lam,
                                   config.oracle_predictor ? nullptr : &params, &cache, &gate,
                                   ot_seed, /*with_grad=*/true,
                                   config.oracle_predictor ? nullptr : &grads, work)) {
                    epoch_sum.landscape += work.components.landscape;
                    epoch_sum.decision += work.components.decision;
                    epoch_sum.pareto_set += work.components.pareto_set;
                    if (work.landscape_skipped) ++result.landscape_skips;
                    ++batch_count;
                    ++epoch_count;
                } else {
                    ++failures;
                }
                if (failures * 20 > visits && visits >= 20)
                    throw solver_error("train_modfl: solver failed on more than 5% of instances (" +
                                       std::to_string(failures) + "/" + std::to_string(visits) + ")");
            }
            if (!config.oracle_predictor && batch_count > 0) {
                PredictorGradients scaled = zero_gradients(params.config);
                accumulate(scaled, grads, 1.0 / static_cast<double>(batch_count));
                sgd_step(params, scaled, config.lr, config.clip_norm);
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        if (epoch_count > 0) {
            rec.train_landscape = epoch_sum.landscape / epoch_count;
            rec.train_decision = epoch_sum.decision / epoch_count;
            rec.train_pareto_set = epoch_sum.pareto_set / epoch_count;
        }
        rec.train_total = instance_total({rec.train_landscape, rec.train_decision,
                                          rec.train_pareto_set}, lam);

        // Validation total loss; the cache is read but never mutated, and OT
        // sampling uses a per-instance stream fixed across epochs so the
        // early-stopping signal is comparable.
        const std::vector<int>& val = dataset.val_idx.empty() ? dataset.train_idx : dataset.val_idx;
        double val_total = 0.0;
        int val_count = 0;
        for (int idx : val) {
            const MOLPInstance& inst = dataset.instances[static_cast<std::size_t>(idx)];
            InstanceWork work;
            ++visits;
            const std::uint64_t ot_seed =
                substream(config.seed, "ot_val", static_cast<std::uint64_t>(inst.id));
            if (modfl_instance(inst, static_cast<std::size_t>(idx), config, lam,
                               config.oracle_predictor ? nullptr : &params, nullptr, nullptr,
                               ot_seed, /*with_grad=*/false, nullptr, work)) {
                val_total += instance_total(work.components, lam);
                ++val_count;
            } else {
                ++failures;
            }
        }
        rec.val_total = val_count > 0 ? val_total / val_count : rec.train_total;
        rec.cache_sizes = cache.sizes();
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(rec);

        if (rec.val_total < best_val - 1e-12) {
            best_val = rec.val_total;
            best_params = params;
            result.best_epoch = epoch;
            no_improve = 0;
        } else if (++no_improve >= config.patience) {
            break;
        }
    }

    result.params = std::move(best_params);
    result.solver_failures = static_cast<int>(failures);
    return result;
}

TrainResult train_twostage(const Dataset& dataset, const TrainConfig& config) {
    validate_dataset(dataset);
    if (dataset.train_idx.empty()) throw config_error("train_twostage: empty training split");
    const bool bce = dataset.meta.costs_are_probabilities;

    TrainResult result;
    PredictorParams params = init_predictor(predictor_config(dataset, config));
    Rng shuffler(substream(config.seed, "shuffle"));

    // Accuracy loss summed uniformly over objectives: L = sum_j L_j / T.
    auto instance_loss = [&](const MOLPInstance& inst, const PredictorParams& p,
                             PredictorGradients* grads) {
        const int t = inst.n_objectives();
        const int n = inst.n_vars();
        GradientTape tape;
        std::vector<Vec> y_hat = predict(p, inst.features, grads ? &tape : nullptr);
        const std::vector<Vec> y_true = native_costs(inst);
        double loss = 0.0;
        std::vector<Vec> grad_y(t);
        for (int j = 0; j < t; ++j) {
            const Vec diff = y_hat[j] - y_true[j];
            if (bce) {
                for (int i = 0; i < n; ++i) {
                    const double p_hat = std::min(std::max(y_hat[j][i], 1e-12), 1.0 - 1e-12);
                    loss -= (y_true[j][i] * std::log(p_hat) +
                             (1.0 - y_true[j][i]) * std::log(1.0 - p_hat)) /
                            (static_cast<double>(n) * t);
                }
                grad_y[j] = Vec(n);
                for (int i = 0; i < n; ++i) {
                    const double p_hat = std::min(std::max(y_hat[j][i], 1e-12), 1.0 - 1e-12);
                    grad_y[j][i] =
                        (p_hat - y_true[j][i]) / (p_hat * (1.0 - p_hat)) /
                        (static_cast<double>(n) * t);
                }
            } else {
                loss += diff.squaredNorm() / (static_cast<double>(n) * t);
                grad_y[j] = 2.0 * diff / (static_cast<double>(n) * t);
            }
        }
        if (grads) accumulate(*grads, backward(p, tape, grad_y));
        return loss;
    };

    double best_val = std::numeric_limits<double>::infinity();
    PredictorParams best_params = params;
    int no_improve = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<int> order = dataset.train_idx;
        shuffler.shuffle(order);

        double epoch_loss = 0.0;
        int epoch_count = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            PredictorGradients grads = zero_gradients(params.config);
            int batch_count = 0;
            for (std::size_t k = start; k < stop; ++k) {
                const MOLPInstance& inst =
                    dataset.instances[static_cast<std::size_t>(order[k])];
                epoch_loss += instance_loss(inst, params, &grads);
                ++batch_count;
                ++epoch_count;
            }
            if (batch_count > 0) {
                PredictorGradients scaled = zero_gradients(params.config);
                accumulate(scaled, grads, 1.0 / static_cast<double>(batch_count));
                sgd_step(params, scaled, config.lr, config.clip_norm);
            }
        }

        const std::vector<int>& val = dataset.val_idx.empty() ? dataset.train_idx : dataset.val_idx;
        double val_total = 0.0;
        for (int idx : val)
            val_total += instance_loss(dataset.instances[static_cast<std::size_t>(idx)], params,
                                       nullptr);
        val_total /= static_cast<double>(val.size());

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_total = epoch_count > 0 ? epoch_loss / epoch_count : 0.0;
        rec.val_total = val_total;
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(rec);

        if (rec.val_total < best_val - 1e-12) {
            best_val = rec.val_total;
            best_params = params;
            result.best_epoch = epoch;
            no_improve = 0;
        } else if (++no_improve >= config.patience) {
            break;
        }
    }

    result.params = std::move(best_params);
    return result;
}

void write_train_log(const std::vector<EpochRecord>& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write training log " + path.string());
    for (const auto& rec : log) {
        nlohmann::json j = {
            {"epoch", rec.epoch},
            {"train_losses",
             {{"l", rec.train_landscape},
              {"d", rec.train_decision},
              {"ps", rec.train_pareto_set},
              {"total", rec.train_total}}},
            {"val_total", rec.val_total},
            {"cache_sizes", rec.cache_sizes},
            {"wall_time_s", rec.wall_time_s},
        };
        out << j.dump() << "\n";
    }
}

}  // namespace mdfl
