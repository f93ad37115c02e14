#include <filesystem>

#include "doctest.h"
#include "modfl/predictor.hpp"
#include "modfl/rng.hpp"
#include "support/test_helpers.hpp"

using namespace mdfl;
namespace fs = std::filesystem;

namespace {

PredictorConfig tiny_config(int input_dim = 3, int heads = 2, std::uint64_t seed = 1) {
    PredictorConfig cfg;
    cfg.input_dim = input_dim;
    cfg.trunk_width = 8;
    cfg.head_width = 8;
    cfg.n_heads = heads;
    cfg.seed = seed;
    return cfg;
}

// All-ones 1x1 layers: the network passes positive scalars through.
PredictorParams identity_params() {
    PredictorConfig cfg;
    cfg.input_dim = 1;
    cfg.trunk_width = 1;
    cfg.head_width = 1;
    cfg.n_heads = 1;
    PredictorParams p;
    p.config = cfg;
    p.w1 = Mat::Ones(1, 1);
    p.b1 = Vec::Zero(1);
    p.w2 = Mat::Ones(1, 1);
    p.b2 = Vec::Zero(1);
    p.w3 = {Mat::Ones(1, 1)};
    p.b3 = {Vec::Zero(1)};
    p.w4 = {Mat::Ones(1, 1)};
    p.b4 = {Vec::Zero(1)};
    return p;
}

double scalar_loss(const PredictorParams& p, const Mat& features,
                   const std::vector<Vec>& coeff) {
    auto out = predict(p, features);
    double loss = 0.0;
    for (std::size_t t = 0; t < out.size(); ++t) loss += coeff[t].dot(out[t]);
    return loss;
}

}  // namespace

TEST_SUITE_BEGIN("predictor");

TEST_CASE("zero parameters produce zero outputs") {
    PredictorParams p = init_predictor(tiny_config());
    p.w1.setZero();
    p.w2.setZero();
    for (auto& w : p.w3) w.setZero();
    for (auto& w : p.w4) w.setZero();
    Mat features = Mat::Random(5, 3);
    for (const auto& out : predict(p, features)) CHECK(out == Vec::Zero(5));
}

TEST_CASE("identity-like configuration passes positive features through") {
    PredictorParams p = identity_params();
    Mat features(4, 1);
    features << 0.5, 1.0, 2.5, 0.1;
    auto out = predict(p, features);
    REQUIRE(out.size() == 1);
    CHECK((out[0] - features.col(0)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("forward pass matches an independent matrix recomputation") {
    PredictorParams p = init_predictor(tiny_config(3, 2, 7));
    Rng rng(3);
    Mat features(6, 3);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) features(i, j) = rng.normal();
    auto out = predict(p, features);

    for (int cell = 0; cell < 6; ++cell) {
        Vec x = features.row(cell);
        Vec h1 = (p.w1 * x + p.b1).cwiseMax(0.0);
        Vec h2 = (p.w2 * h1 + p.b2).cwiseMax(0.0);
        for (int t = 0; t < 2; ++t) {
            Vec h3 = (p.w3[t] * h2 + p.b3[t]).cwiseMax(0.0);
            const double y = (p.w4[t] * h3)(0) + p.b4[t][0];
            CHECK(out[static_cast<std::size_t>(t)][cell] == doctest::Approx(y).epsilon(1e-12));
        }
    }
}

TEST_CASE("sigmoid head keeps outputs in (0,1)") {
    auto cfg = tiny_config();
    cfg.sigmoid_output = true;
    PredictorParams p = init_predictor(cfg);
    Mat features = 10.0 * Mat::Random(8, 3);
    for (const auto& out : predict(p, features)) {
        CHECK(out.minCoeff() > 0.0);
        CHECK(out.maxCoeff() < 1.0);
    }
}

TEST_CASE("backward zero upstream gradient gives zero parameter gradient") {
    PredictorParams p = init_predictor(tiny_config());
    Mat features = Mat::Random(4, 3);
    GradientTape tape;
    predict(p, features, &tape);
    auto g = backward(p, tape, {Vec::Zero(4), Vec::Zero(4)});
    CHECK(g.global_norm() == 0.0);
}

TEST_CASE("linear-chain gradient has the outer-product structure") {
    PredictorParams p = identity_params();
    Mat features(3, 1);
    features << 0.5, 1.5, 2.0;
    GradientTape tape;
    predict(p, features, &tape);
    // L = sum(y): dL/dw1 = sum of inputs (all downstream weights are 1).
    auto g = backward(p, tape, {Vec::Ones(3)});
    CHECK(g.w1(0, 0) == doctest::Approx(features.col(0).sum()).epsilon(1e-12));
    CHECK(g.b4[0][0] == doctest::Approx(3.0));
}

TEST_CASE("tape cannot be consumed twice") {
    PredictorParams p = init_predictor(tiny_config());
    Mat features = Mat::Random(4, 3);
    GradientTape tape;
    predict(p, features, &tape);
    backward(p, tape, {Vec::Zero(4), Vec::Zero(4)});
    CHECK_THROWS_AS(backward(p, tape, {Vec::Zero(4), Vec::Zero(4)}), contract_error);
}

TEST_CASE("full gradient matches finite differences over 50 parameters") {
    PredictorParams p = init_predictor(tiny_config(3, 2, 11));
    Rng rng(5);
    Mat features(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) features(i, j) = rng.normal();
    std::vector<Vec> coeff{Vec(5), Vec(5)};
    for (int i = 0; i < 5; ++i) {
        coeff[0][i] = rng.normal();
        coeff[1][i] = rng.normal();
    }

    GradientTape tape;
    predict(p, features, &tape);
    auto g = backward(p, tape, coeff);

    auto check_param = [&](double* param, double analytic) {
        const double h = 1e-5;
        const double keep = *param;
        *param = keep + h;
        const double fp = scalar_loss(p, features, coeff);
        *param = keep - h;
        const double fm = scalar_loss(p, features, coeff);
        *param = keep;
        const double fd = (fp - fm) / (2.0 * h);
        CHECK(mdfl::testing::close_rel(analytic, fd, 1e-4));
    };

    Rng pick(6);
    for (int k = 0; k < 50; ++k) {
        switch (pick.uniform_index(4)) {
            case 0: {
                const int i = static_cast<int>(pick.uniform_index(p.w1.rows()));
                const int j = static_cast<int>(pick.uniform_index(p.w1.cols()));
                check_param(&p.w1(i, j), g.w1(i, j));
                break;
            }
            case 1: {
                const int i = static_cast<int>(pick.uniform_index(p.w2.rows()));
                const int j = static_cast<int>(pick.uniform_index(p.w2.cols()));
                check_param(&p.w2(i, j), g.w2(i, j));
                break;
            }
            case 2: {
                const int t = static_cast<int>(pick.uniform_index(2));
                const int i = static_cast<int>(pick.uniform_index(p.w3[t].rows()));
                const int j = static_cast<int>(pick.uniform_index(p.w3[t].cols()));
                check_param(&p.w3[t](i, j), g.w3[t](i, j));
                break;
            }
            default: {
                const int t = static_cast<int>(pick.uniform_index(2));
                const int j = static_cast<int>(pick.uniform_index(p.w4[t].cols()));
                check_param(&p.w4[t](0, j), g.w4[t](0, j));
                break;
            }
        }
    }
}

TEST_CASE("sgd step arithmetic, clipping and guards") {
    PredictorParams p = identity_params();
    auto g = zero_gradients(p.config);

    sgd_step(p, g, 0.1);
    CHECK(p.w1(0, 0) == 1.0);  // zero gradient: unchanged

    g.w1(0, 0) = 0.5;
    sgd_step(p, g, 0.0);
    CHECK(p.w1(0, 0) == 1.0);  // lr 0: unchanged

    sgd_step(p, g, 0.1);
    CHECK(p.w1(0, 0) == doctest::Approx(0.95));  // theta - lr*g

    // Global-norm clipping at 10.
    g.w1(0, 0) = 1000.0;
    PredictorParams q = identity_params();
    sgd_step(q, g, 0.1, 10.0);
    CHECK(q.w1(0, 0) == doctest::Approx(1.0 - 0.1 * 10.0).epsilon(1e-9));

    g.w1(0, 0) = std::nan("");
    CHECK_THROWS_AS(sgd_step(p, g, 0.1), solver_error);
}

TEST_CASE("checkpoint round-trip is exact") {
    PredictorParams p = init_predictor(tiny_config(4, 3, 99));
    const fs::path path = fs::temp_directory_path() / "mdfl_checkpoint_test.json";
    save_checkpoint(p, path);
    PredictorParams q = load_checkpoint(path);
    CHECK(q.config.input_dim == p.config.input_dim);
    CHECK(q.config.n_heads == p.config.n_heads);
    CHECK(q.w1 == p.w1);
    CHECK(q.w2 == p.w2);
    for (int t = 0; t < 3; ++t) {
        CHECK(q.w3[t] == p.w3[t]);
        CHECK(q.w4[t] == p.w4[t]);
        CHECK(q.b3[t] == p.b3[t]);
        CHECK(q.b4[t] == p.b4[t]);
    }
    fs::remove(path);
}

TEST_CASE("initialization is deterministic in the seed") {
    PredictorParams a = init_predictor(tiny_config(3, 2, 123));
    PredictorParams b = init_predictor(tiny_config(3, 2, 123));
    PredictorParams c = init_predictor(tiny_config(3, 2, 124));
    CHECK(a.w1 == b.w1);
    CHECK(a.w3[0] == b.w3[0]);
    CHECK(a.w1 != c.w1);
}

TEST_CASE("architecture validation") {
    PredictorConfig bad = tiny_config();
    bad.input_dim = 0;
    CHECK_THROWS_AS(init_predictor(bad), config_error);
    PredictorParams p = init_predictor(tiny_config());
    Mat wrong = Mat::Random(4, 5);
    CHECK_THROWS_AS(predict(p, wrong), dimension_error);
}

TEST_SUITE_END();
