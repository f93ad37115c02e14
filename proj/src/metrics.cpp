#include "modfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "modfl/solver.hpp"

namespace mdfl {

RegretResult regret(const std::vector<const MOLPInstance*>& instances,
                    const std::vector<std::vector<Vec>>& solutions_per_instance) {
    if (instances.empty()) throw contract_error("regret: no instances");
    if (instances.size() != solutions_per_instance.size())
        throw dimension_error("regret: instance/solution list length mismatch");
    const int t = instances[0]->n_objectives();

    RegretResult out;
    out.per_objective = Vec::Zero(t);
    Vec counts = Vec::Zero(t);
    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        const MOLPInstance& inst = *instances[idx];
        if (inst.n_objectives() != t) throw dimension_error("regret: inconsistent objective counts");
        for (int j = 0; j < t; ++j) {
            LPSolution opt = solve_lp(inst.costs[j], inst.A, inst.b, inst.lower, inst.upper);
            if (opt.status != SolveStatus::Optimal)
                throw solver_error("regret: single-objective solve " + to_string(opt.status));
            const double f_star = opt.objective;
            if (std::abs(f_star) < 1e-12) {
                out.skipped_terms += static_cast<int>(solutions_per_instance[idx].size());
                continue;
            }
            for (const Vec& pi : solutions_per_instance[idx]) {
                const double achieved = inst.costs[j].dot(pi);
                out.per_objective[j] += (achieved - f_star) / std::abs(f_star);
                counts[j] += 1.0;
            }
        }
    }
    for (int j = 0; j < t; ++j)
        if (counts[j] > 0.0) out.per_objective[j] /= counts[j];
    out.mean = out.per_objective.mean();
    return out;
}

namespace {

double min_distance(const ObjectiveVector& p, const std::vector<ObjectiveVector>& points,
                    double power) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : points) {
        if (q.size() != p.size()) throw dimension_error("front metric: dimension mismatch");
        double d;
        if (power == 2.0) {
            d = (p - q).norm();
        } else {
            d = std::pow((p - q).array().abs().pow(power).sum(), 1.0 / power);
        }
        best = std::min(best, d);
    }
    return best;
}

}  // namespace

double gd(const FrontApproximation& pred_front, const FrontApproximation& true_front) {
    if (pred_front.points.empty() || true_front.points.empty())
        throw contract_error("gd: empty front");
    double sum = 0.0;
    for (const auto& p : pred_front.points) sum += min_distance(p, true_front.points, 2.0);
    return sum / static_cast<double>(pred_front.points.size());
}

double mpfe(const FrontApproximation& pred_front, const FrontApproximation& true_front, double p) {
    if (pred_front.points.empty() || true_front.points.empty())
        throw contract_error("mpfe: empty front");
    double worst = 0.0;
    for (const auto& true_point : true_front.points)
        worst = std::max(worst, min_distance(true_point, pred_front.points, p));
    return worst;
}

namespace {

// Exact 2-d hypervolume of minimization points against reference r: points
// must satisfy p <= r componentwise (caller clips).
double hv2(std::vector<ObjectiveVector> pts, const Vec& r) {
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end(), [](const ObjectiveVector& a, const ObjectiveVector& b) {
        if (a[0] != b[0]) return a[0] < b[0];
        return a[1] < b[1];
    });
    double volume = 0.0;
    double prev_y = r[1];
    for (const auto& p : pts) {
        if (p[1] < prev_y) {
            volume += (r[0] - p[0]) * (prev_y - p[1]);
            prev_y = p[1];
        }
    }
    return volume;
}

double hv3(const std::vector<ObjectiveVector>& pts, const Vec& r) {
    if (pts.empty()) return 0.0;
    // Sweep the third coordinate: between consecutive z levels, the dominated
    // area is the 2-d hypervolume of all points with z at or below the slab.
    std::vector<double> levels;
    for (const auto& p : pts) levels.push_back(p[2]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    double volume = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double z0 = levels[k];
        const double z1 = (k + 1 < levels.size()) ? levels[k + 1] : r[2];
        if (z1 <= z0) continue;
        std::vector<ObjectiveVector> slab;
        for (const auto& p : pts)
            if (p[2] <= z0) slab.push_back(p.head(2));
        volume += hv2(std::move(slab), r.head(2)) * (z1 - z0);
    }
    return volume;
}

}  // namespace

double hypervolume(const std::vector<ObjectiveVector>& front, const Vec& reference,
                   Orientation orientation, int* clipped) {
    if (front.empty()) throw contract_error("hypervolume: empty front");
    const int t = static_cast<int>(front[0].size());
    if (t != 2 && t != 3)
        throw config_error("hypervolume: only T in {2,3} supported, got T=" + std::to_string(t));
    if (reference.size() != t) throw dimension_error("hypervolume: reference dimension mismatch");

    const double sign = orientation == Orientation::Min ? 1.0 : -1.0;
    Vec r = sign * reference;
    std::vector<ObjectiveVector> pts;
    int dropped = 0;
    for (const auto& p : front) {
        if (p.size() != t) throw dimension_error("hypervolume: ragged front");
        ObjectiveVector q = sign * p;
        if ((q.array() <= r.array()).all())
            pts.push_back(std::move(q));
        else
            ++dropped;
    }
    if (clipped) *clipped = dropped;
    if (pts.empty()) return 0.0;
    return t == 2 ? hv2(std::move(pts), r) : hv3(pts, r);
}

double har(const FrontApproximation& pred_front, const FrontApproximation& true_front,
           const Vec& reference) {
    if (pred_front.orientation != true_front.orientation)
        throw contract_error("har: fronts with mixed orientations");
    const double hv_true = hypervolume(true_front.points, reference, true_front.orientation);
    if (hv_true <= 0.0) throw solver_error("har: true front has zero hypervolume");
    const double hv_pred = hypervolume(pred_front.points, reference, pred_front.orientation);
    return hv_pred / hv_true;
}

Vec reference_point(const std::vector<ObjectiveVector>& single_objective_values,
                    Orientation orientation, ReferenceRule rule) {
    if (single_objective_values.empty()) throw contract_error("reference_point: no optima");
    const int t = static_cast<int>(single_objective_values[0].size());
    const double sign = orientation == Orientation::Min ? 1.0 : -1.0;
    Vec ref(t);
    for (int j = 0; j < t; ++j) {
        double worst = -std::numeric_limits<double>::infinity();
        double ideal = std::numeric_limits<double>::infinity();
        for (const auto& f : single_objective_values) {
            worst = std::max(worst, sign * f[j]);
            ideal = std::min(ideal, sign * f[j]);
        }
        ref[j] = sign * (rule == ReferenceRule::NadirOfOptima ? worst : ideal);
    }
    return ref;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) throw contract_error("write_metrics_csv: no rows");
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write metrics CSV " + path.string());
    const int t = static_cast<int>(rows[0].regret_per_objective.size());
    out << "method,GD,MPFE,HAR";
    for (int j = 1; j <= t; ++j) out << ",r" << j;
    out << ",r\n";
    out.precision(10);
    for (const auto& row : rows) {
        out << row.method << "," << row.gd << "," << row.mpfe << "," << row.har;
        for (int j = 0; j < t; ++j) out << "," << row.regret_per_objective[j];
        out << "," << row.regret_mean << "\n";
    }
}

}  // namespace mdfl
