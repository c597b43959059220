#pragma once

#include <cstdint>
#include <vector>

#include "gkae/graph.hpp"
#include "gkae/lcrecon.hpp"
#include "gkae/matrix.hpp"

namespace gkae {

// Gradient projection with Armijo backtracking for the temporal-smoothness
// reconstruction objective
//   f(X) = sum_t xd(t)^T M_t xd(t) + gamma * ||J .* X - Y||_F^2,
// xd(t) = x(t) - x(t-1), with observed prefix columns (t < tau) held fixed.
struct TgsConfig {
    double gamma = 10.0;
    int max_outer = 500;
    int max_backtrack = 40;
    double grad_tol = 1e-6;   // infinity norm of the projected gradient
    double armijo_c = 1e-4;
    double shrink = 0.5;
};

// M_t = (L_t + epsilon I)^beta instead of L_t.
struct TgssConfig : TgsConfig {
    double sobolev_epsilon = 0.1;
    int sobolev_beta = 1;
};

struct TgsResult {
    Matrix estimate;  // N x T
    bool converged = false;
    int iterations = 0;
    double objective = 0.0;
    std::vector<double> objective_trace;  // value after each accepted step
};

TgsResult tgs_reconstruct(const GraphSequence& seq, const Matrix& observed,
                          const SamplingMask& mask, const TgsConfig& cfg = {});
TgsResult tgss_reconstruct(const GraphSequence& seq, const Matrix& observed,
                           const SamplingMask& mask, const TgssConfig& cfg = {});

// Nearest-neighbor interpolation: each hidden entry takes the value of the
// nearest observed node at the same step (hop distance; ties by Euclidean
// coordinate distance when coordinates are given, then by index). When no
// observed node is reachable, falls back to the nearest observed step of
// the same node; throws Unfillable when that fails too. `coords` holds one
// matrix (static layout) or one per step.
Matrix nni_reconstruct(const GraphSequence& seq, const Matrix& observed, const SamplingMask& mask,
                       const std::vector<Matrix>* coords = nullptr);

struct GcnaeConfig {
    int epochs = 500;
    int hidden = 8;
    double learning_rate = 1e-2;
    double leaky_slope = 0.01;
    std::uint64_t seed = 0;
};

struct GcnaeResult {
    Matrix estimate;  // N x T
    std::vector<double> loss_history;
};

// Four-layer graph-convolution autoencoder (two layers encode to `hidden`,
// two decode back to scalar signals) trained with mean-square error on the
// observed entries only; the reconstruction is the decoder output.
GcnaeResult gcnae_reconstruct(const GraphSequence& seq, const Matrix& observed,
                              const SamplingMask& mask, const GcnaeConfig& cfg = {});

// Prediction baselines used for rollout comparisons.

// Repeats the last observed column x(tau - 1) for `horizon` steps.
Matrix persistence_predict(const GraphSequence& seq, int tau, int horizon);

// Trains the graph-conv autoencoder on the prefix t < tau, then applies it
// repeatedly from x(tau - 1) using the known graph of each predicted step.
Matrix gcnae_predict(const GraphSequence& seq, int tau, int horizon, const GcnaeConfig& cfg = {});

}  // namespace gkae
