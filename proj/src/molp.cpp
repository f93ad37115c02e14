#include "modfl/molp.hpp"

#include <fstream>

#include "json.hpp"

namespace mdfl {

using nlohmann::json;

std::string to_string(Orientation o) { return o == Orientation::Min ? "min" : "max"; }

Orientation orientation_from_string(const std::string& s) {
    if (s == "min") return Orientation::Min;
    if (s == "max") return Orientation::Max;
    throw parse_error("orientation must be \"min\" or \"max\", got \"" + s + "\"");
}

bool dominates(const ObjectiveVector& phi, const ObjectiveVector& psi, Orientation o) {
    if (phi.size() != psi.size())
        throw dimension_error("dominates: objective vectors of length " +
                              std::to_string(phi.size()) + " vs " + std::to_string(psi.size()));
    const double sign = (o == Orientation::Min) ? 1.0 : -1.0;
    bool strict = false;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double a = sign * phi[i], b = sign * psi[i];
        if (a > b) return false;
        if (a < b) strict = true;
    }
    return strict;
}

FrontApproximation pareto_filter(const std::vector<ObjectiveVector>& points, Orientation o) {
    if (points.empty()) throw contract_error("pareto_filter: empty input");
    const Eigen::Index t = points[0].size();
    for (const auto& p : points) {
        if (p.size() != t) throw dimension_error("pareto_filter: ragged objective vectors");
        if (!p.allFinite()) throw dimension_error("pareto_filter: non-finite objective vector");
    }
    FrontApproximation front;
    front.orientation = o;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < points.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(points[j], points[i], o)) keep = false;
            // Exact duplicates collapse to the first occurrence.
            if (j < i && points[j] == points[i]) keep = false;
        }
        if (keep) front.points.push_back(points[i]);
    }
    return front;
}

ObjectiveVector evaluate_objectives(const MOLPInstance& instance, const Vec& pi) {
    if (pi.size() != instance.n_vars())
        throw dimension_error("evaluate_objectives: solution length " + std::to_string(pi.size()) +
                              " != n_vars " + std::to_string(instance.n_vars()));
    ObjectiveVector f(instance.n_objectives());
    for (int t = 0; t < instance.n_objectives(); ++t) f[t] = instance.costs[t].dot(pi);
    return f;
}

bool check_feasible(const MOLPInstance& instance, const Vec& pi, double tol) {
    if (pi.size() != instance.n_vars())
        throw dimension_error("check_feasible: solution length mismatch");
    if (instance.b.size() > 0) {
        Vec slack = instance.b - instance.A * pi;
        if (slack.minCoeff() < -tol) return false;
    }
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
        if (pi[i] < instance.lower[i] - tol || pi[i] > instance.upper[i] + tol) return false;
    }
    return true;
}

void validate_instance(const MOLPInstance& instance) {
    const int n = instance.n_vars();
    const int t = instance.n_objectives();
    if (t == 0) throw contract_error("instance " + std::to_string(instance.id) + ": no costs");
    for (const auto& y : instance.costs)
        if (y.size() != n) throw dimension_error("instance: cost vector length != n_vars");
    if (instance.A.rows() != instance.b.size())
        throw dimension_error("instance: A has " + std::to_string(instance.A.rows()) +
                              " rows but b has " + std::to_string(instance.b.size()));
    if (instance.A.cols() != n) throw dimension_error("instance: A column count != n_vars");
    if (instance.lower.size() != n || instance.upper.size() != n)
        throw dimension_error("instance: bounds length != n_vars");
    if (instance.pareto_set.size() != instance.pareto_front.size())
        throw dimension_error("instance: pareto_set / pareto_front size mismatch");
    for (std::size_t k = 0; k < instance.pareto_set.size(); ++k) {
        const Vec& pi = instance.pareto_set[k];
        if (!check_feasible(instance, pi, 1e-8))
            throw contract_error("instance " + std::to_string(instance.id) + ": pareto_set[" +
                                 std::to_string(k) + "] infeasible");
        Vec f = evaluate_objectives(instance, pi);
        if ((f - instance.pareto_front[k]).lpNorm<Eigen::Infinity>() > 1e-9)
            throw contract_error("instance " + std::to_string(instance.id) + ": pareto_front[" +
                                 std::to_string(k) + "] inconsistent with pareto_set");
    }
}

void validate_dataset(const Dataset& dataset) {
    std::vector<int> seen(dataset.instances.size(), 0);
    auto mark = [&](const std::vector<int>& idx) {
        for (int i : idx) {
            if (i < 0 || i >= static_cast<int>(seen.size()))
                throw contract_error("dataset split index out of range");
            ++seen[i];
        }
    };
    mark(dataset.train_idx);
    mark(dataset.val_idx);
    mark(dataset.test_idx);
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] != 1)
            throw contract_error("dataset splits must be disjoint and cover instance " +
                                 std::to_string(i));
}

namespace {

const json& require_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw parse_error(std::string("instance file: missing field \"") + name + "\"");
    return *it;
}

Vec to_vec(const json& j, const char* name) {
    if (!j.is_array()) throw parse_error(std::string("instance file: field \"") + name + "\" must be an array");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw parse_error(std::string("instance file: non-numeric entry in \"") + name + "\"");
        v[i] = j[i].get<double>();
    }
    return v;
}

std::vector<Vec> to_vec_list(const json& j, const char* name) {
    if (!j.is_array()) throw parse_error(std::string("instance file: field \"") + name + "\" must be an array");
    std::vector<Vec> out;
    out.reserve(j.size());
    for (const auto& row : j) out.push_back(to_vec(row, name));
    return out;
}

json from_vec(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json from_vec_list(const std::vector<Vec>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(from_vec(v));
    return a;
}

}  // namespace

MOLPInstance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open instance file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw parse_error("instance file " + path.string() + ": " + e.what());
    }

    MOLPInstance inst;
    inst.id = require_field(j, "id").get<int>();
    const int n = require_field(j, "n_vars").get<int>();
    const int t = require_field(j, "t_objectives").get<int>();
    inst.orientation = orientation_from_string(require_field(j, "orientation").get<std::string>());

    auto feats = to_vec_list(require_field(j, "features"), "features");
    if (!feats.empty()) {
        inst.features.resize(static_cast<Eigen::Index>(feats.size()), feats[0].size());
        for (std::size_t i = 0; i < feats.size(); ++i) {
            if (feats[i].size() != inst.features.cols())
                throw parse_error("instance file: ragged rows in \"features\"");
            inst.features.row(static_cast<Eigen::Index>(i)) = feats[i];
        }
    }

    inst.costs = to_vec_list(require_field(j, "costs"), "costs");
    if (static_cast<int>(inst.costs.size()) != t)
        throw parse_error("instance file: \"costs\" has " + std::to_string(inst.costs.size()) +
                          " rows, expected t_objectives = " + std::to_string(t));
    for (const auto& y : inst.costs)
        if (y.size() != n) throw parse_error("instance file: cost vector length != n_vars");

    const json& ja = require_field(j, "A");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(ja.size());
    for (const auto& e : ja) {
        if (!e.is_array() || e.size() != 3)
            throw parse_error("instance file: \"A\" entries must be [row, col, value] triplets");
        trips.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
    inst.b = to_vec(require_field(j, "b"), "b");
    inst.A.resize(inst.b.size(), n);
    inst.A.setFromTriplets(trips.begin(), trips.end());

    const json& jb = require_field(j, "bounds");
    if (static_cast<int>(jb.size()) != n) throw parse_error("instance file: \"bounds\" length != n_vars");
    inst.lower.resize(n);
    inst.upper.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!jb[i].is_array() || jb[i].size() != 2)
            throw parse_error("instance file: \"bounds\" entries must be [lo, hi]");
        inst.lower[i] = jb[i][0].get<double>();
        inst.upper[i] = jb[i][1].get<double>();
    }

    inst.pareto_set = to_vec_list(require_field(j, "pareto_set"), "pareto_set");
    inst.pareto_front = to_vec_list(require_field(j, "pareto_front"), "pareto_front");
    return inst;
}

void write_instance(const MOLPInstance& instance, const std::filesystem::path& path) {
    json j;
    j["id"] = instance.id;
    j["n_vars"] = instance.n_vars();
    j["t_objectives"] = instance.n_objectives();
    j["orientation"] = to_string(instance.orientation);
    json feats = json::array();
    for (Eigen::Index r = 0; r < instance.features.rows(); ++r)
        feats.push_back(from_vec(instance.features.row(r)));
    j["features"] = std::move(feats);
    j["costs"] = from_vec_list(instance.costs);
    json ja = json::array();
    for (int k = 0; k < instance.A.outerSize(); ++k)
        for (SpMat::InnerIterator it(instance.A, k); it; ++it)
            ja.push_back(json::array({it.row(), it.col(), it.value()}));
    j["A"] = std::move(ja);
    j["b"] = from_vec(instance.b);
    json jb = json::array();
    for (Eigen::Index i = 0; i < instance.lower.size(); ++i)
        jb.push_back(json::array({instance.lower[i], instance.upper[i]}));
    j["bounds"] = std::move(jb);
    j["pareto_set"] = from_vec_list(instance.pareto_set);
    j["pareto_front"] = from_vec_list(instance.pareto_front);

    std::ofstream out(path);
    if (!out) throw parse_error("cannot write instance file " + path.string());
    out << j.dump(1) << "\n";
}

}  // namespace mdfl
