#include "modfl/predictor.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "modfl/rng.hpp"

namespace mdfl {

using nlohmann::json;

namespace {

Mat init_weight(Rng& rng, int rows, int cols) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    Mat w(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-scale, scale);
    return w;
}

Mat relu(const Mat& m) { return m.cwiseMax(0.0); }

}  // namespace

PredictorParams init_predictor(const PredictorConfig& config) {
    if (config.input_dim < 1 || config.trunk_width < 1 || config.head_width < 1 ||
        config.n_heads < 1)
        throw config_error("init_predictor: all architecture sizes must be positive");
    Rng rng(substream(config.seed, "init"));
    PredictorParams p;
    p.config = config;
    p.w1 = init_weight(rng, config.trunk_width, config.input_dim);
    p.b1 = Vec::Zero(config.trunk_width);
    p.w2 = init_weight(rng, config.trunk_width, config.trunk_width);
    p.b2 = Vec::Zero(config.trunk_width);
    for (int t = 0; t < config.n_heads; ++t) {
        p.w3.push_back(init_weight(rng, config.head_width, config.trunk_width));
        p.b3.push_back(Vec::Zero(config.head_width));
        p.w4.push_back(init_weight(rng, 1, config.head_width));
        p.b4.push_back(Vec::Zero(1));
    }
    return p;
}

std::vector<Vec> predict(const PredictorParams& params, const Mat& features, GradientTape* tape) {
    if (features.cols() != params.config.input_dim)
        throw dimension_error("predict: feature dim " + std::to_string(features.cols()) +
                              " != configured input_dim " +
                              std::to_string(params.config.input_dim));
    const auto& cfg = params.config;
    Mat h1 = relu((features * params.w1.transpose()).rowwise() + params.b1.transpose());
    Mat h2 = relu((h1 * params.w2.transpose()).rowwise() + params.b2.transpose());
    std::vector<Vec> outputs;
    std::vector<Mat> h3s;
    for (int t = 0; t < cfg.n_heads; ++t) {
        Mat h3 = relu((h2 * params.w3[t].transpose()).rowwise() + params.b3[t].transpose());
        Vec out = (h3 * params.w4[t].transpose()).col(0);
        out.array() += params.b4[t][0];
        if (cfg.sigmoid_output) out = (1.0 / (1.0 + (-out.array()).exp())).matrix();
        outputs.push_back(std::move(out));
        if (tape) h3s.push_back(std::move(h3));
    }
    if (tape) {
        tape->x = features;
        tape->h1 = std::move(h1);
        tape->h2 = std::move(h2);
        tape->h3 = std::move(h3s);
        tape->out = outputs;
        tape->used = false;
    }
    return outputs;
}

PredictorGradients zero_gradients(const PredictorConfig& config) {
    PredictorGradients g;
    g.w1 = Mat::Zero(config.trunk_width, config.input_dim);
    g.b1 = Vec::Zero(config.trunk_width);
    g.w2 = Mat::Zero(config.trunk_width, config.trunk_width);
    g.b2 = Vec::Zero(config.trunk_width);
    for (int t = 0; t < config.n_heads; ++t) {
        g.w3.push_back(Mat::Zero(config.head_width, config.trunk_width));
        g.b3.push_back(Vec::Zero(config.head_width));
        g.w4.push_back(Mat::Zero(1, config.head_width));
        g.b4.push_back(Vec::Zero(1));
    }
    return g;
}

PredictorGradients backward(const PredictorParams& params, GradientTape& tape,
                            const std::vector<Vec>& grad_outputs) {
    if (tape.used) throw contract_error("backward: tape already consumed");
    tape.used = true;
    const auto& cfg = params.config;
    if (static_cast<int>(grad_outputs.size()) != cfg.n_heads)
        throw dimension_error("backward: need one upstream gradient per head");

    PredictorGradients g = zero_gradients(cfg);
    Mat d_h2 = Mat::Zero(tape.h2.rows(), tape.h2.cols());

    for (int t = 0; t < cfg.n_heads; ++t) {
        Vec d_out = grad_outputs[t];
        if (d_out.size() != tape.out[t].size())
            throw dimension_error("backward: upstream gradient length mismatch");
        if (cfg.sigmoid_output)
            d_out = (d_out.array() * tape.out[t].array() * (1.0 - tape.out[t].array())).matrix();
        // out = h3 w4^T + b4
        g.w4[t] += d_out.transpose() * tape.h3[t];
        g.b4[t][0] += d_out.sum();
        Mat d_h3 = d_out * params.w4[t];  // (cells x head_width)
        d_h3 = (d_h3.array() * (tape.h3[t].array() > 0.0).cast<double>()).matrix();
        g.w3[t] += d_h3.transpose() * tape.h2;
        g.b3[t] += d_h3.colwise().sum().transpose();
        d_h2 += d_h3 * params.w3[t];
    }

    d_h2 = (d_h2.array() * (tape.h2.array() > 0.0).cast<double>()).matrix();
    g.w2 += d_h2.transpose() * tape.h1;
    g.b2 += d_h2.colwise().sum().transpose();
    Mat d_h1 = d_h2 * params.w2;
    d_h1 = (d_h1.array() * (tape.h1.array() > 0.0).cast<double>()).matrix();
    g.w1 += d_h1.transpose() * tape.x;
    g.b1 += d_h1.colwise().sum().transpose();
    return g;
}

double PredictorGradients::global_norm() const {
    double sq = w1.squaredNorm() + w2.squaredNorm() + b1.squaredNorm() + b2.squaredNorm();
    for (std::size_t t = 0; t < w3.size(); ++t)
        sq += w3[t].squaredNorm() + b3[t].squaredNorm() + w4[t].squaredNorm() + b4[t].squaredNorm();
    return std::sqrt(sq);
}

void accumulate(PredictorGradients& acc, const PredictorGradients& g, double scale) {
    acc.w1 += scale * g.w1;
    acc.b1 += scale * g.b1;
    acc.w2 += scale * g.w2;
    acc.b2 += scale * g.b2;
    for (std::size_t t = 0; t < acc.w3.size(); ++t) {
        acc.w3[t] += scale * g.w3[t];
        acc.b3[t] += scale * g.b3[t];
        acc.w4[t] += scale * g.w4[t];
        acc.b4[t] += scale * g.b4[t];
    }
}

void sgd_step(PredictorParams& params, const PredictorGradients& grads, double lr,
              double clip_norm) {
    const double norm = grads.global_norm();
    if (!std::isfinite(norm))
        throw solver_error("sgd_step: non-finite gradient norm, step rejected");
    double scale = lr;
    if (clip_norm > 0.0 && norm > clip_norm) scale = lr * clip_norm / norm;
    params.w1 -= scale * grads.w1;
    params.b1 -= scale * grads.b1;
    params.w2 -= scale * grads.w2;
    params.b2 -= scale * grads.b2;
    for (std::size_t t = 0; t < params.w3.size(); ++t) {
        params.w3[t] -= scale * grads.w3[t];
        params.b3[t] -= scale * grads.b3[t];
        params.w4[t] -= scale * grads.w4[t];
        params.b4[t] -= scale * grads.b4[t];
    }
}

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("checkpoint: malformed tensor");
    Mat m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != j[0].size()) throw parse_error("checkpoint: ragged tensor rows");
        for (std::size_t c = 0; c < j[i].size(); ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& j) {
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

}  // namespace

void save_checkpoint(const PredictorParams& params, const std::filesystem::path& path) {
    json j;
    j["architecture"] = {{"input_dim", params.config.input_dim},
                         {"trunk_width", params.config.trunk_width},
                         {"head_width", params.config.head_width},
                         {"n_heads", params.config.n_heads},
                         {"sigmoid_output", params.config.sigmoid_output},
                         {"seed", params.config.seed}};
    j["w1"] = mat_to_json(params.w1);
    j["b1"] = vec_to_json(params.b1);
    j["w2"] = mat_to_json(params.w2);
    j["b2"] = vec_to_json(params.b2);
    for (int t = 0; t < params.config.n_heads; ++t) {
        j["heads"].push_back({{"w3", mat_to_json(params.w3[t])},
                              {"b3", vec_to_json(params.b3[t])},
                              {"w4", mat_to_json(params.w4[t])},
                              {"b4", vec_to_json(params.b4[t])}});
    }
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write checkpoint " + path.string());
    out << j.dump(1) << "\n";
}

PredictorParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open checkpoint " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw parse_error("checkpoint " + path.string() + ": " + e.what());
    }
    if (!j.contains("architecture")) throw parse_error("checkpoint: missing architecture header");
    const json& a = j["architecture"];
    PredictorParams p;
    p.config.input_dim = a.at("input_dim").get<int>();
    p.config.trunk_width = a.at("trunk_width").get<int>();
    p.config.head_width = a.at("head_width").get<int>();
    p.config.n_heads = a.at("n_heads").get<int>();
    p.config.sigmoid_output = a.at("sigmoid_output").get<bool>();
    p.config.seed = a.at("seed").get<std::uint64_t>();
    p.w1 = mat_from_json(j.at("w1"));
    p.b1 = vec_from_json(j.at("b1"));
    p.w2 = mat_from_json(j.at("w2"));
    p.b2 = vec_from_json(j.at("b2"));
    for (const auto& h : j.at("heads")) {
        p.w3.push_back(mat_from_json(h.at("w3")));
        p.b3.push_back(vec_from_json(h.at("b3")));
        p.w4.push_back(mat_from_json(h.at("w4")));
        p.b4.push_back(vec_from_json(h.at("b4")));
    }
    if (static_cast<int>(p.w3.size()) != p.config.n_heads)
        throw parse_error("checkpoint: head count mismatch");
    return p;
}

}  // namespace mdfl
