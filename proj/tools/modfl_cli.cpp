#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "modfl/benchmarks.hpp"
#include "modfl/dataset_io.hpp"
#include "modfl/evaluate.hpp"
#include "modfl/trainer.hpp"
#include "modfl/verify.hpp"

namespace {

using namespace mdfl;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerification = 3;

void write_json(const nlohmann::json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path.string());
    out << j.dump(1) << "\n";
}

struct GenerateOptions {
    std::string benchmark = "bipartite";
    std::string out_dir;
    int instances = 27;
    std::uint64_t seed = 0;
    int nodes_per_side = 50;
    double rho = 0.05;
    int node_feature_dim = 10;
    bool third_objective = false;
    std::string perturb = "intent";
    int nd = 100, nc = 53, k_categories = 5;
    double thr = 0.2;
    int feature_dim = 8;
    int denom = 5;
    std::string cora_content, cora_cites;
    int nodes_per_instance = 100;
};

int cmd_generate(const GenerateOptions& opt) {
    if (opt.instances < 1) throw config_error("--instances must be positive");
    Dataset ds;
    nlohmann::json cfg;
    cfg["benchmark"] = opt.benchmark;
    cfg["seed"] = opt.seed;
    cfg["version"] = kVersion;
    if (opt.benchmark == "bipartite" || opt.benchmark == "cora") {
        BipartiteConfig bc;
        bc.nodes_per_side = opt.nodes_per_side;
        bc.rho = opt.rho;
        bc.node_feature_dim = opt.node_feature_dim;
        bc.instances = opt.instances;
        bc.third_objective = opt.third_objective;
        bc.seed = opt.seed;
        bc.denom = opt.denom;
        if (opt.perturb == "intent")
            bc.perturb_mode = BipartiteConfig::PerturbMode::Intent;
        else if (opt.perturb == "literal")
            bc.perturb_mode = BipartiteConfig::PerturbMode::Literal;
        else
            throw config_error("--perturb must be intent or literal");
        cfg["rho"] = bc.rho;
        cfg["perturb"] = opt.perturb;
        cfg["third_objective"] = bc.third_objective;
        if (opt.benchmark == "bipartite") {
            cfg["nodes_per_side"] = bc.nodes_per_side;
            cfg["instances"] = opt.instances;
            ds = gen_bipartite(bc);
        } else {
            if (opt.cora_content.empty() || opt.cora_cites.empty())
                throw config_error("cora benchmark needs --cora-content and --cora-cites");
            cfg["content"] = opt.cora_content;
            cfg["cites"] = opt.cora_cites;
            cfg["nodes_per_instance"] = opt.nodes_per_instance;
            ds = load_cora(opt.cora_content, opt.cora_cites, opt.instances,
                           opt.nodes_per_instance, bc);
        }
    } else if (opt.benchmark == "ad_alloc") {
        AdAllocConfig ac;
        ac.nd = opt.nd;
        ac.nc = opt.nc;
        ac.k_categories = opt.k_categories;
        ac.thr = opt.thr;
        ac.feature_dim = opt.feature_dim;
        ac.seed = opt.seed;
        ac.denom = opt.denom;
        cfg["nd"] = ac.nd;
        cfg["nc"] = ac.nc;
        cfg["k_categories"] = ac.k_categories;
        cfg["thr"] = ac.thr;
        cfg["instances"] = opt.instances;
        ds = gen_ad_alloc(ac, opt.instances);
    } else {
        throw config_error("unknown benchmark \"" + opt.benchmark + "\"");
    }
    write_dataset(ds, opt.out_dir);
    write_json(cfg, fs::path(opt.out_dir) / "resolved_config.json");
    std::cout << "wrote " << ds.instances.size() << " instances to " << opt.out_dir << "\n";
    return kExitOk;
}

struct TrainOptions {
    std::string data_dir, out_dir;
    std::string method = "modfl";
    TrainConfig config;
    std::vector<std::string> ablations;
};

int cmd_train(const TrainOptions& opt) {
    Dataset ds = load_dataset(opt.data_dir);
    TrainConfig tc = opt.config;
    nlohmann::json ablation_labels = nlohmann::json::array();
    for (const auto& a : opt.ablations) {
        if (a == "landscape") {
            tc.ablate_landscape = true;
            ablation_labels.push_back("w/o Landscape Loss");
        } else if (a == "decision") {
            tc.ablate_decision = true;
            ablation_labels.push_back("w/o Decision Loss");
        } else if (a == "pareto_set") {
            tc.ablate_pareto_set = true;
            ablation_labels.push_back("w/o Pareto Set Loss");
        } else {
            throw config_error("--ablate must be landscape, decision or pareto_set");
        }
    }

    TrainResult result;
    if (opt.method == "modfl")
        result = train_modfl(ds, tc);
    else if (opt.method == "twostage")
        result = train_twostage(ds, tc);
    else
        throw config_error("--method must be modfl or twostage");

    fs::create_directories(opt.out_dir);
    save_checkpoint(result.params, fs::path(opt.out_dir) / "checkpoint.json");
    write_train_log(result.log, fs::path(opt.out_dir) / "train_log.jsonl");
    nlohmann::json cfg = {{"version", kVersion},
                          {"method", opt.method},
                          {"data", opt.data_dir},
                          {"seed", tc.seed},
                          {"lr", tc.lr},
                          {"batch_size", tc.batch_size},
                          {"max_epochs", tc.max_epochs},
                          {"patience", tc.patience},
                          {"gamma", tc.gamma},
                          {"lambdas", tc.lambdas},
                          {"p_solve", tc.p_solve},
                          {"cache_capacity", tc.cache_capacity},
                          {"refresh_weights", tc.refresh_weights},
                          {"denom", tc.denom},
                          {"ot",
                           {{"epsilon", tc.ot_epsilon},
                            {"tau", tc.ot_tau},
                            {"anneal_start", tc.ot_anneal_start},
                            {"anneal_iters", tc.ot_anneal_iters},
                            {"final_iters", tc.ot_final_iters}}},
                          {"ablations", ablation_labels},
                          {"best_epoch", result.best_epoch},
                          {"epochs_run", result.log.size()}};
    write_json(cfg, fs::path(opt.out_dir) / "resolved_config.json");
    std::cout << "trained " << opt.method << " for " << result.log.size()
              << " epochs (best epoch " << result.best_epoch << ")\n";
    return kExitOk;
}

struct EvaluateOptions {
    std::string data_dir, out_dir;
    std::vector<std::string> checkpoints;
    std::vector<std::string> names;
    bool oracle = false;
    std::string split = "test";
    int denom = 5;
};

int cmd_evaluate(const EvaluateOptions& opt) {
    Dataset ds = load_dataset(opt.data_dir);
    std::vector<int> indices;
    if (opt.split == "test")
        indices = ds.test_idx;
    else if (opt.split == "val")
        indices = ds.val_idx;
    else if (opt.split == "train")
        indices = ds.train_idx;
    else if (opt.split == "all")
        for (std::size_t i = 0; i < ds.instances.size(); ++i) indices.push_back(static_cast<int>(i));
    else
        throw config_error("--split must be train, val, test or all");
    if (indices.empty()) throw config_error("selected split is empty");
    if (!opt.oracle && opt.checkpoints.empty())
        throw config_error("evaluate needs --checkpoint or --oracle");

    EvaluateConfig cfg;
    cfg.denom = opt.denom;
    cfg.with_loss_diagnostics = opt.oracle;

    fs::create_directories(opt.out_dir);
    std::vector<MetricsRow> rows;
    EvaluationResult result;
    auto run_one = [&](const PredictFn& fn, const std::string& name) {
        result = evaluate_method(ds, indices, fn, name, cfg);
        rows.push_back(result.row);
        write_per_instance_json(result, fs::path(opt.out_dir) / ("per_instance_" + name + ".json"));
    };

    if (opt.oracle) run_one(oracle_predict_fn(), "oracle");
    for (std::size_t k = 0; k < opt.checkpoints.size(); ++k) {
        auto params = std::make_shared<const PredictorParams>(load_checkpoint(opt.checkpoints[k]));
        if (static_cast<int>(ds.instances.at(0).features.cols()) != params->config.input_dim)
            throw dimension_error("checkpoint input_dim " +
                                  std::to_string(params->config.input_dim) +
                                  " does not match dataset feature dim " +
                                  std::to_string(ds.instances.at(0).features.cols()));
        const std::string name =
            k < opt.names.size() ? opt.names[k] : fs::path(opt.checkpoints[k]).stem().string();
        run_one(model_predict_fn(params), name);
    }

    write_metrics_csv(rows, fs::path(opt.out_dir) / "metrics.csv");
    nlohmann::json cfg_json = {{"version", kVersion},
                               {"data", opt.data_dir},
                               {"split", opt.split},
                               {"denom", opt.denom},
                               {"oracle", opt.oracle},
                               {"checkpoints", opt.checkpoints}};
    write_json(cfg_json, fs::path(opt.out_dir) / "resolved_config.json");
    for (const auto& row : rows)
        std::cout << row.method << ": GD=" << row.gd << " MPFE=" << row.mpfe << " HAR=" << row.har
                  << " r=" << row.regret_mean << "\n";
    return kExitOk;
}

int cmd_verify(bool full, bool corrupt_sign) {
    auto results = run_verification(full, corrupt_sign);
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.seconds << " s): "
                  << r.detail << "\n";
        all_ok = all_ok && r.passed;
    }
    std::cout << (all_ok ? "verification passed" : "verification FAILED") << "\n";
    return all_ok ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective decision-focused learning: generate, train, evaluate, verify"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Plain-text config file; command-line flags override it");

    GenerateOptions gen;
    auto* sub_gen = app.add_subcommand("generate", "Generate a benchmark dataset directory");
    sub_gen->add_option("--benchmark", gen.benchmark, "bipartite | ad_alloc | cora");
    sub_gen->add_option("--out", gen.out_dir, "Output directory")->required();
    sub_gen->add_option("--instances", gen.instances, "Number of instances");
    sub_gen->add_option("--seed", gen.seed, "Root seed");
    sub_gen->add_option("--nodes-per-side", gen.nodes_per_side, "Bipartite nodes per side");
    sub_gen->add_option("--rho", gen.rho, "Perturbation probability");
    sub_gen->add_option("--node-feature-dim", gen.node_feature_dim, "Bipartite node feature dim");
    sub_gen->add_flag("--third-objective", gen.third_objective, "Add mixed third objective");
    sub_gen->add_option("--perturb", gen.perturb, "intent | literal");
    sub_gen->add_option("--nd", gen.nd, "Ad queries per instance");
    sub_gen->add_option("--nc", gen.nc, "Ad candidates");
    sub_gen->add_option("--k-categories", gen.k_categories, "Ad categories");
    sub_gen->add_option("--thr", gen.thr, "Ad exposure tolerance");
    sub_gen->add_option("--feature-dim", gen.feature_dim, "Ad feature dim");
    sub_gen->add_option("--denom", gen.denom, "Weight grid denominator");
    sub_gen->add_option("--cora-content", gen.cora_content, "Cora .content file");
    sub_gen->add_option("--cora-cites", gen.cora_cites, "Cora .cites file");
    sub_gen->add_option("--nodes-per-instance", gen.nodes_per_instance, "Cora nodes per instance");

    TrainOptions tr;
    auto* sub_tr = app.add_subcommand("train", "Train a predictor on a dataset directory");
    sub_tr->add_option("--data", tr.data_dir, "Dataset directory")->required();
    sub_tr->add_option("--out", tr.out_dir, "Run output directory")->required();
    sub_tr->add_option("--method", tr.method, "modfl | twostage");
    sub_tr->add_option("--seed", tr.config.seed, "Root seed");
    sub_tr->add_option("--lr", tr.config.lr, "Learning rate");
    sub_tr->add_option("--batch-size", tr.config.batch_size, "Batch size");
    sub_tr->add_option("--max-epochs", tr.config.max_epochs, "Epoch cap");
    sub_tr->add_option("--patience", tr.config.patience, "Early-stopping patience");
    sub_tr->add_option("--gamma", tr.config.gamma, "Squared regularizer weight");
    sub_tr->add_option("--p-solve", tr.config.p_solve, "Solver invocation probability");
    sub_tr->add_option("--lambda-landscape", tr.config.lambdas[0], "Landscape loss weight");
    sub_tr->add_option("--lambda-decision", tr.config.lambdas[1], "Decision loss weight");
    sub_tr->add_option("--lambda-pareto-set", tr.config.lambdas[2], "Pareto set loss weight");
    sub_tr->add_option("--cache-capacity", tr.config.cache_capacity, "Solution cache capacity");
    sub_tr->add_option("--refresh-weights", tr.config.refresh_weights,
                       "Grid weights solved per cache refresh");
    sub_tr->add_option("--denom", tr.config.denom, "Weight grid denominator");
    sub_tr->add_option("--trunk-width", tr.config.trunk_width, "Predictor trunk width");
    sub_tr->add_option("--head-width", tr.config.head_width, "Predictor head width");
    sub_tr->add_option("--ot-anneal-iters", tr.config.ot_anneal_iters,
                       "Sinkhorn iterations per annealing stage");
    sub_tr->add_option("--ot-final-iters", tr.config.ot_final_iters,
                       "Sinkhorn iterations at the target epsilon");
    sub_tr->add_option("--ablate", tr.ablations, "landscape | decision | pareto_set (repeatable)");

    EvaluateOptions ev;
    auto* sub_ev = app.add_subcommand("evaluate", "Evaluate checkpoints on a dataset");
    sub_ev->add_option("--data", ev.data_dir, "Dataset directory")->required();
    sub_ev->add_option("--out", ev.out_dir, "Output directory")->required();
    sub_ev->add_option("--checkpoint", ev.checkpoints, "Checkpoint file (repeatable)");
    sub_ev->add_option("--method-name", ev.names, "Row label per checkpoint (repeatable)");
    sub_ev->add_flag("--oracle", ev.oracle, "Evaluate the perfect predictor");
    sub_ev->add_option("--split", ev.split, "train | val | test | all");
    sub_ev->add_option("--denom", ev.denom, "Weight grid denominator");

    bool verify_full = false, verify_corrupt = false;
    auto* sub_vf = app.add_subcommand("verify", "Run the verification suites");
    sub_vf->add_flag("--full", verify_full, "Include the slow directional and determinism suites");
    sub_vf->add_flag("--negative-control-dslp-sign", verify_corrupt,
                     "Corrupt the layer Jacobian sign (the gradient suite must fail)")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sub_gen->parsed()) return cmd_generate(gen);
        if (sub_tr->parsed()) return cmd_train(tr);
        if (sub_ev->parsed()) return cmd_evaluate(ev);
        if (sub_vf->parsed()) return cmd_verify(verify_full, verify_corrupt);
    } catch (const config_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
