#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "modfl/molp.hpp"

namespace mdfl {

// Multi-head feed-forward coefficient predictor: a shared two-layer ReLU
// trunk plus a two-layer head per objective, i.e. four weight layers on every
// input-to-output path. Heads emit raw scores; `sigmoid_output` squashes them
// to (0,1) for benchmarks whose costs are probabilities.
struct PredictorConfig {
    int input_dim = 0;
    int trunk_width = 64;
    int head_width = 64;
    int n_heads = 2;  // T
    bool sigmoid_output = false;
    std::uint64_t seed = 0;
};

struct PredictorParams {
    PredictorConfig config;
    Mat w1, w2;          // trunk: (trunk_width x input_dim), (trunk_width x trunk_width)
    Vec b1, b2;
    std::vector<Mat> w3;  // per head: (head_width x trunk_width)
    std::vector<Vec> b3;
    std::vector<Mat> w4;  // per head: (1 x head_width)
    std::vector<Vec> b4;  // per head: length 1
};

struct PredictorGradients {
    Mat w1, w2;
    Vec b1, b2;
    std::vector<Mat> w3, w4;
    std::vector<Vec> b3, b4;

    double global_norm() const;
};

// Recorded forward values; supports exactly one backward pass.
struct GradientTape {
    Mat x;                 // inputs, one row per decision cell
    Mat h1, h2;            // post-ReLU trunk activations
    std::vector<Mat> h3;   // post-ReLU head activations
    std::vector<Vec> out;  // final outputs per head (post-sigmoid if enabled)
    bool used = false;
};

// Scaled-uniform fan-in initialization, seeded; biases zero.
PredictorParams init_predictor(const PredictorConfig& config);

// Per-cell cost predictions for all T objectives. `features` has one row per
// decision variable. Fills `tape` when provided.
std::vector<Vec> predict(const PredictorParams& params, const Mat& features,
                         GradientTape* tape = nullptr);

// Exact reverse-mode gradients of the recorded graph; consumes the tape.
PredictorGradients backward(const PredictorParams& params, GradientTape& tape,
                            const std::vector<Vec>& grad_outputs);

void accumulate(PredictorGradients& acc, const PredictorGradients& g, double scale = 1.0);
PredictorGradients zero_gradients(const PredictorConfig& config);

// theta <- theta - lr * grad, with global-norm clipping. Throws solver_error
// on non-finite gradients (step rejected).
void sgd_step(PredictorParams& params, const PredictorGradients& grads, double lr = 0.1,
              double clip_norm = 10.0);

// JSON checkpoint with an architecture header; load(save(p)) == p exactly.
void save_checkpoint(const PredictorParams& params, const std::filesystem::path& path);
PredictorParams load_checkpoint(const std::filesystem::path& path);

}  // namespace mdfl
