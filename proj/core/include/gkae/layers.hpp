#pragma once

#include <cstdint>

#include "gkae/autodiff.hpp"
#include "gkae/graph.hpp"
#include "gkae/matrix.hpp"
#include "gkae/rng.hpp"

namespace gkae::nn {

enum class Activation { Identity, Tanh, LeakyRelu };

ad::Tensor apply_activation(ad::Tensor x, Activation act, double slope = 0.01);

// Fully connected layer: activation(x W^T + b) on row-major batches (B x in).
struct DenseLayer {
    Matrix weight;  // out x in
    Matrix bias;    // 1 x out
    Activation activation = Activation::Identity;
    double slope = 0.01;

    static DenseLayer glorot(int in, int out, Activation act, Rng& rng);

    ad::Tensor forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor x) const;
};

// Message-passing convolution with separate self and neighbor weights:
// row i of the output is W_self h_i + W_neigh sum_j w_ij h_j + b.
// No activation; callers apply one.
struct GraphConvLayer {
    Matrix w_self;   // out x in
    Matrix w_neigh;  // out x in
    Matrix bias;     // 1 x out

    static GraphConvLayer glorot(int in, int out, Rng& rng);

    ad::Tensor forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor h,
                       const GraphSnapshot& g) const;
};

// Mean-aggregation layer: row i is W_self h_i + W_neigh mean_{j in N(i)} h_j + b.
// The neighbor term of an isolated node is zero. Aggregation covers the full
// neighborhood (no sampling).
struct SageLayer {
    Matrix w_self;
    Matrix w_neigh;
    Matrix bias;

    static SageLayer glorot(int in, int out, Rng& rng);

    ad::Tensor forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor h,
                       const GraphSnapshot& g) const;
};

// Weighted neighbor-sum operator (equals the weight matrix).
Matrix neighbor_sum_matrix(const GraphSnapshot& g);
// Row-normalized binary adjacency; isolated nodes get a zero row.
Matrix neighbor_mean_matrix(const GraphSnapshot& g);

}  // namespace gkae::nn
