#include "modfl/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "modfl/rng.hpp"
#include "modfl/solver.hpp"

namespace mdfl {

std::vector<Vec> native_costs(const MOLPInstance& instance) {
    std::vector<Vec> out = instance.costs;
    if (instance.orientation == Orientation::Max)
        for (auto& y : out) y = -y;
    return out;
}

double native_sign(const MOLPInstance& instance) {
    return instance.orientation == Orientation::Max ? -1.0 : 1.0;
}

namespace {

// Small fixed random MLP producing the ground-truth coefficients. Width and
// depth are fixed so generated datasets are fully described by their seeds.
class TeacherNet {
  public:
    TeacherNet(int input_dim, std::uint64_t seed, int width = 16) {
        Rng rng(seed);
        const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
        w1_.resize(width, input_dim);
        for (int i = 0; i < width; ++i)
            for (int j = 0; j < input_dim; ++j) w1_(i, j) = rng.normal() * s1;
        b1_.resize(width);
        for (int i = 0; i < width; ++i) b1_[i] = 0.1 * rng.normal();
        const double s2 = 1.0 / std::sqrt(static_cast<double>(width));
        w2_.resize(width);
        for (int i = 0; i < width; ++i) w2_[i] = rng.normal() * s2;
        b2_ = 0.1 * rng.normal();
    }

    // Raw score; callers squash through a sigmoid as needed.
    double operator()(const Vec& x) const {
        Vec h = (w1_ * x + b1_).array().tanh();
        return 2.0 * w2_.dot(h) + b2_;
    }

  private:
    Mat w1_;
    Vec b1_, w2_;
    double b2_ = 0.0;
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// 70/15/15 split over a seeded shuffle; small datasets keep at least one
// training instance and use leftovers for val/test in that order.
void assign_splits(Dataset& ds, std::uint64_t seed) {
    const int count = static_cast<int>(ds.instances.size());
    std::vector<int> order(count);
    for (int i = 0; i < count; ++i) order[i] = i;
    Rng rng(substream(seed, "split"));
    rng.shuffle(order);
    int n_val = 0, n_test = 0;
    if (count >= 3) {
        n_val = std::max(1, static_cast<int>(0.15 * count));
        n_test = std::max(1, static_cast<int>(0.15 * count));
    } else if (count == 2) {
        n_val = 1;
    }
    const int n_train = count - n_val - n_test;
    ds.train_idx.assign(order.begin(), order.begin() + n_train);
    ds.val_idx.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    ds.test_idx.assign(order.begin() + n_train + n_val, order.end());
    std::sort(ds.train_idx.begin(), ds.train_idx.end());
    std::sort(ds.val_idx.begin(), ds.val_idx.end());
    std::sort(ds.test_idx.begin(), ds.test_idx.end());
}

void attach_pareto(MOLPInstance& inst, int denom) {
    MultiObjectiveSolution mo = solve_multiobjective(inst, denom);
    inst.pareto_set = std::move(mo.pareto_set);
    inst.pareto_front = std::move(mo.pareto_front);
}

}  // namespace

Dataset gen_ad_alloc(const AdAllocConfig& config, int count) {
    if (count < 1) throw config_error("gen_ad_alloc: instance count must be positive");
    if (config.nd < 1 || config.nc < 1) throw config_error("gen_ad_alloc: nd and nc must be positive");
    if (config.k_categories < 1 || config.k_categories > config.nc)
        throw config_error("gen_ad_alloc: need 1 <= k_categories <= nc");
    if (config.thr <= 0.0) throw config_error("gen_ad_alloc: thr must be positive");
    Vec delta = config.delta;
    if (delta.size() == 0) delta = Vec::Constant(config.k_categories, 0.8 / config.k_categories);
    if (delta.size() != config.k_categories)
        throw config_error("gen_ad_alloc: delta length != k_categories");
    if (delta.minCoeff() < 0.0) throw config_error("gen_ad_alloc: delta entries must be >= 0");
    double excess = 0.0;
    for (int k = 0; k < delta.size(); ++k) excess += std::max(delta[k] - config.thr, 0.0);
    if (excess > 1.0)
        throw config_error("gen_ad_alloc: infeasible exposure targets (sum of delta_k - thr exceeds 1)");

    const int n = config.nd * config.nc;
    TeacherNet ctr_teacher(config.feature_dim, substream(config.seed, "teacher_ctr"));
    TeacherNet relogin_teacher(config.feature_dim, substream(config.seed, "teacher_relogin"));

    Dataset ds;
    ds.meta.benchmark = "ad_alloc";
    ds.meta.costs_are_probabilities = true;
    ds.meta.seed = config.seed;

    for (int inst_id = 0; inst_id < count; ++inst_id) {
        Rng rng(substream(config.seed, "ad_instance", static_cast<std::uint64_t>(inst_id)));
        MOLPInstance inst;
        inst.id = inst_id;
        inst.orientation = Orientation::Max;
        inst.features.resize(n, config.feature_dim);
        Vec y1(n), y2(n);
        for (int cell = 0; cell < n; ++cell) {
            for (int f = 0; f < config.feature_dim; ++f) inst.features(cell, f) = rng.normal();
            Vec x = inst.features.row(cell);
            y1[cell] = sigmoid(ctr_teacher(x));
            y2[cell] = sigmoid(relogin_teacher(x));
        }
        // Stored costs are minimization-ready (negated native probabilities).
        inst.costs = {-y1, -y2};

        std::vector<Eigen::Triplet<double>> trips;
        const int m = config.nd + 2 * config.k_categories;
        inst.b.resize(m);
        for (int i = 0; i < config.nd; ++i) {
            for (int j = 0; j < config.nc; ++j)
                trips.emplace_back(i, i * config.nc + j, 1.0);
            inst.b[i] = 1.0;
        }
        // Category of candidate j is j mod K; exposure is averaged over ND.
        const double inv_nd = 1.0 / static_cast<double>(config.nd);
        for (int k = 0; k < config.k_categories; ++k) {
            const int up_row = config.nd + 2 * k;
            const int lo_row = config.nd + 2 * k + 1;
            for (int j = 0; j < config.nc; ++j) {
                if (j % config.k_categories != k) continue;
                for (int i = 0; i < config.nd; ++i) {
                    trips.emplace_back(up_row, i * config.nc + j, inv_nd);
                    trips.emplace_back(lo_row, i * config.nc + j, -inv_nd);
                }
            }
            inst.b[up_row] = delta[k] + config.thr;
            inst.b[lo_row] = -delta[k] + config.thr;
        }
        inst.A.resize(m, n);
        inst.A.setFromTriplets(trips.begin(), trips.end());
        inst.lower = Vec::Zero(n);
        inst.upper = Vec::Ones(n);

        attach_pareto(inst, config.denom);
        validate_instance(inst);
        ds.instances.push_back(std::move(inst));
    }
    assign_splits(ds, config.seed);
    return ds;
}

namespace {

// Shared by the synthetic generator and the Cora loader: build one bipartite
// matching instance from an adjacency labelling plus per-edge features.
MOLPInstance build_bipartite_instance(int inst_id, int nu, int nv, const Mat& edge_features,
                                      const Vec& y1, const BipartiteConfig& config, Rng& rng) {
    const int n = nu * nv;
    MOLPInstance inst;
    inst.id = inst_id;
    inst.orientation = Orientation::Max;
    inst.features = edge_features;

    Vec y2(n);
    for (int cell = 0; cell < n; ++cell) {
        const double r = rng.uniform01();
        const bool flip = config.perturb_mode == BipartiteConfig::PerturbMode::Intent
                              ? (r < config.rho)
                              : (r >= config.rho);  // Eq. as printed: flip when r >= rho
        y2[cell] = flip ? 1.0 - y1[cell] : y1[cell];
    }

    inst.costs = {-y1, -y2};
    if (config.third_objective) {
        const double w1 = rng.uniform01();
        const double w2 = rng.uniform01();
        inst.costs.push_back(-(w1 * y1 + w2 * y2));
    }

    std::vector<Eigen::Triplet<double>> trips;
    inst.b = Vec::Ones(nu + nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            trips.emplace_back(i, i * nv + j, 1.0);
            trips.emplace_back(nu + j, i * nv + j, 1.0);
        }
    inst.A.resize(nu + nv, n);
    inst.A.setFromTriplets(trips.begin(), trips.end());
    inst.lower = Vec::Zero(n);
    inst.upper = Vec::Ones(n);

    attach_pareto(inst, config.denom);
    validate_instance(inst);
    return inst;
}

}  // namespace

Dataset gen_bipartite(const BipartiteConfig& config) {
    if (config.instances < 1) throw config_error("gen_bipartite: instance count must be positive");
    if (config.nodes_per_side < 1) throw config_error("gen_bipartite: nodes_per_side must be positive");
    if (config.rho < 0.0 || config.rho > 1.0) throw config_error("gen_bipartite: rho must be in [0,1]");

    const int nu = config.nodes_per_side, nv = config.nodes_per_side;
    TeacherNet teacher(2 * config.node_feature_dim, substream(config.seed, "teacher_edge"));

    Dataset ds;
    ds.meta.benchmark = "bipartite";
    ds.meta.costs_are_probabilities = false;
    ds.meta.seed = config.seed;

    for (int inst_id = 0; inst_id < config.instances; ++inst_id) {
        Rng rng(substream(config.seed, "bip_instance", static_cast<std::uint64_t>(inst_id)));
        Mat u(nu, config.node_feature_dim), v(nv, config.node_feature_dim);
        for (int i = 0; i < nu; ++i)
            for (int f = 0; f < config.node_feature_dim; ++f) u(i, f) = rng.normal();
        for (int j = 0; j < nv; ++j)
            for (int f = 0; f < config.node_feature_dim; ++f) v(j, f) = rng.normal();

        const int n = nu * nv;
        Mat edge_features(n, 2 * config.node_feature_dim);
        Vec logits(n);
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j) {
                const int cell = i * nv + j;
                edge_features.row(cell) << u.row(i), v.row(j);
                logits[cell] = teacher(edge_features.row(cell));
            }
        // Shift logits so the expected density matches the configured target.
        std::vector<double> sorted(logits.data(), logits.data() + n);
        std::sort(sorted.begin(), sorted.end());
        const int q = std::min(n - 1, std::max(0, static_cast<int>((1.0 - config.density) * n)));
        const double shift = sorted[static_cast<std::size_t>(q)];
        Vec y1(n);
        for (int cell = 0; cell < n; ++cell)
            y1[cell] = rng.bernoulli(sigmoid(4.0 * (logits[cell] - shift))) ? 1.0 : 0.0;

        ds.instances.push_back(build_bipartite_instance(inst_id, nu, nv, edge_features, y1,
                                                        config, rng));
    }
    assign_splits(ds, config.seed);
    return ds;
}

// ---------------------------------------------------------------------------
// Cora loader
// ---------------------------------------------------------------------------
namespace {

struct CoraGraph {
    std::vector<std::string> ids;
    Mat features;                       // node x words
    std::set<std::pair<int, int>> edges;  // undirected, indices into ids
};

CoraGraph parse_cora(const std::filesystem::path& content_path,
                     const std::filesystem::path& cites_path) {
    CoraGraph g;
    std::map<std::string, int> index;
    std::vector<std::vector<double>> rows;

    std::ifstream content(content_path);
    if (!content) throw parse_error("cannot open content file " + content_path.string());
    std::string line;
    int line_no = 0;
    std::size_t word_count = 0;
    while (std::getline(content, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (std::getline(ss, tok, '\t')) tokens.push_back(tok);
        if (tokens.size() < 3)
            throw parse_error("content line " + std::to_string(line_no) +
                              ": expected id, word flags and label");
        std::vector<double> feats(tokens.size() - 2);
        for (std::size_t k = 1; k + 1 < tokens.size(); ++k) {
            try {
                feats[k - 1] = std::stod(tokens[k]);
            } catch (const std::exception&) {
                throw parse_error("content line " + std::to_string(line_no) +
                                  ": non-numeric word flag \"" + tokens[k] + "\"");
            }
        }
        if (word_count == 0) word_count = feats.size();
        if (feats.size() != word_count)
            throw parse_error("content line " + std::to_string(line_no) + ": ragged word vector");
        index[tokens[0]] = static_cast<int>(g.ids.size());
        g.ids.push_back(tokens[0]);
        rows.push_back(std::move(feats));
    }
    g.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(word_count));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < word_count; ++j)
            g.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

    std::ifstream cites(cites_path);
    if (!cites) throw parse_error("cannot open cites file " + cites_path.string());
    line_no = 0;
    while (std::getline(cites, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, '\t') || !std::getline(ss, b, '\t'))
            throw parse_error("cites line " + std::to_string(line_no) + ": expected two ids");
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end()) continue;  // citations to unknown papers
        if (ia->second == ib->second) continue;
        g.edges.emplace(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
    }
    return g;
}

// Greedy edge-locality partitioner (METIS stand-in): grow each part from the
// highest-degree unassigned node, repeatedly absorbing the unassigned node
// with the most edges into the part (ties to the smaller index).
std::vector<std::vector<int>> greedy_partition(const CoraGraph& g, int parts, int nodes_per) {
    const int total = static_cast<int>(g.ids.size());
    std::vector<std::vector<int>> adj(total);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> assigned(total, false);
    std::vector<std::vector<int>> out;
    for (int p = 0; p < parts; ++p) {
        int start = -1, best_deg = -1;
        for (int i = 0; i < total; ++i)
            if (!assigned[i] && static_cast<int>(adj[i].size()) > best_deg) {
                best_deg = static_cast<int>(adj[i].size());
                start = i;
            }
        if (start < 0) break;
        std::vector<int> part{start};
        assigned[start] = true;
        std::vector<int> link_count(total, 0);
        for (int nb : adj[start]) link_count[nb]++;
        while (static_cast<int>(part.size()) < nodes_per) {
            int pick = -1, best = -1;
            for (int i = 0; i < total; ++i)
                if (!assigned[i] && link_count[i] > best) {
                    best = link_count[i];
                    pick = i;
                }
            if (pick < 0) break;
            part.push_back(pick);
            assigned[pick] = true;
            for (int nb : adj[pick]) link_count[nb]++;
        }
        if (static_cast<int>(part.size()) == nodes_per) out.push_back(std::move(part));
    }
    return out;
}

// Balanced bipartition maximizing cross edges: seeded random split plus
// first-improvement swap local search.
std::pair<std::vector<int>, std::vector<int>> bipartition(const std::vector<int>& nodes,
                                                          const std::set<std::pair<int, int>>& edges,
                                                          Rng& rng) {
    std::vector<int> order = nodes;
    rng.shuffle(order);
    const int half = static_cast<int>(order.size()) / 2;
    std::vector<int> left(order.begin(), order.begin() + half);
    std::vector<int> right(order.begin() + half, order.end());

    auto has_edge = [&](int a, int b) {
        return edges.count({std::min(a, b), std::max(a, b)}) > 0;
    };
    auto cut = [&]() {
        int c = 0;
        for (int a : left)
            for (int b : right) c += has_edge(a, b) ? 1 : 0;
        return c;
    };

    int current = cut();
    bool improved = true;
    int rounds = 0;
    while (improved && rounds < 50) {
        improved = false;
        ++rounds;
        for (std::size_t i = 0; i < left.size() && !improved; ++i)
            for (std::size_t j = 0; j < right.size() && !improved; ++j) {
                std::swap(left[i], right[j]);
                const int trial = cut();
                if (trial > current) {
                    current = trial;
                    improved = true;
                } else {
                    std::swap(left[i], right[j]);
                }
            }
    }
    return {left, right};
}

}  // namespace

Dataset load_cora(const std::filesystem::path& content_path,
                  const std::filesystem::path& cites_path, int instances, int nodes_per,
                  const BipartiteConfig& perturb) {
    if (instances < 1 || nodes_per < 2) throw config_error("load_cora: bad instance geometry");
    CoraGraph g = parse_cora(content_path, cites_path);
    const int usable = std::min<int>(instances, static_cast<int>(g.ids.size()) / nodes_per);
    const int dropped = static_cast<int>(g.ids.size()) - usable * nodes_per;
    if (dropped > 0)
        std::cerr << "load_cora: dropping " << dropped << " trailing nodes ("
                  << g.ids.size() << " nodes, " << usable << " instances of " << nodes_per << ")\n";

    auto parts = greedy_partition(g, usable, nodes_per);

    Dataset ds;
    ds.meta.benchmark = "cora";
    ds.meta.costs_are_probabilities = false;
    ds.meta.seed = perturb.seed;

    for (std::size_t p = 0; p < parts.size(); ++p) {
        Rng rng(substream(perturb.seed, "cora_instance", p));
        auto [left, right] = bipartition(parts[p], g.edges, rng);
        const int nu = static_cast<int>(left.size()), nv = static_cast<int>(right.size());
        const int n = nu * nv;
        Mat edge_features(n, 2 * g.features.cols());
        Vec y1(n);
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j) {
                const int cell = i * nv + j;
                edge_features.row(cell) << g.features.row(left[static_cast<std::size_t>(i)]),
                    g.features.row(right[static_cast<std::size_t>(j)]);
                const int a = left[static_cast<std::size_t>(i)], b = right[static_cast<std::size_t>(j)];
                y1[cell] = g.edges.count({std::min(a, b), std::max(a, b)}) ? 1.0 : 0.0;
            }
        ds.instances.push_back(build_bipartite_instance(static_cast<int>(p), nu, nv,
                                                        edge_features, y1, perturb, rng));
    }
    assign_splits(ds, perturb.seed);
    return ds;
}

QuadraticPareto quadratic_pareto_set(const QuadraticExample& example) {
    if (example.a1 <= 0.0) throw config_error("quadratic_pareto_set: a1 must be positive");
    QuadraticPareto out;
    const double p2 = example.a2 / (2.0 * example.a1);
    const double p3 = example.a3 / (2.0 * example.a1);
    out.lo = std::min(p2, p3);
    out.hi = std::max(p2, p3);
    if (example.a2 == example.a3) {
        out.degenerate = true;
        out.overlap_ratio = 0.0;
        return out;
    }
    out.overlap_ratio =
        std::pow(1.0 - example.eps_prec / std::abs(example.a2 - example.a3), example.n);
    return out;
}

bool quadratic_grid_dominance_check(const QuadraticExample& example, double step, double margin) {
    const QuadraticPareto interval = quadratic_pareto_set(example);
    auto f1 = [&](double pi) { return example.a1 * pi * pi - example.a2 * pi; };
    auto f2 = [&](double pi) { return example.a1 * pi * pi - example.a3 * pi; };

    // Grid layout: the interval endpoints are exact grid points, the inside
    // is subdivided uniformly at spacing strictly below `step`, and the
    // outside extends from the endpoints at spacing `step`. With the
    // endpoints present, every outside point is dominated by the nearest
    // endpoint with a margin quadratic in its distance, so the check does
    // not ride on floating-point ties.
    std::vector<double> grid;
    const int outside = static_cast<int>(std::ceil(margin / step));
    for (int k = outside; k >= 1; --k) grid.push_back(interval.lo - k * step);
    const int inside = interval.degenerate
                           ? 1
                           : static_cast<int>(std::ceil((interval.hi - interval.lo) / step)) + 1;
    for (int k = 0; k <= inside; ++k)
        grid.push_back(interval.lo + (interval.hi - interval.lo) * k / inside);
    for (int k = 1; k <= outside; ++k) grid.push_back(interval.hi + k * step);

    for (double x : grid) {
        bool dominated = false;
        for (double other : grid) {
            if (other == x) continue;
            const bool no_worse = f1(other) <= f1(x) && f2(other) <= f2(x);
            const bool strictly = f1(other) < f1(x) || f2(other) < f2(x);
            if (no_worse && strictly) {
                dominated = true;
                break;
            }
        }
        const bool is_inside = x >= interval.lo - 1e-12 && x <= interval.hi + 1e-12;
        if (is_inside && dominated) return false;
        if (!is_inside && !dominated) return false;
    }
    return true;
}

}  // namespace mdfl
