#include "gkae/layers.hpp"

#include <cmath>

#include "gkae/error.hpp"

namespace gkae::nn {

ad::Tensor apply_activation(ad::Tensor x, Activation act, double slope) {
    switch (act) {
        case Activation::Identity:
            return x;
        case Activation::Tanh:
            return ad::tanh(x);
        case Activation::LeakyRelu:
            return ad::leaky_relu(x, slope);
    }
    throw Error("apply_activation: unknown activation");
}

namespace {

Matrix glorot_matrix(int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    Matrix w(rows, cols);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    return w;
}

}  // namespace

DenseLayer DenseLayer::glorot(int in, int out, Activation act, Rng& rng) {
    DenseLayer layer;
    layer.weight = glorot_matrix(out, in, rng);
    layer.bias = Matrix(1, out);
    layer.activation = act;
    return layer;
}

ad::Tensor DenseLayer::forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor x) const {
    if (x.cols() != weight.cols()) throw ShapeMismatch("DenseLayer: input width differs");
    ad::Tensor w = params.bind(tape, weight);
    ad::Tensor b = params.bind(tape, bias);
    ad::Tensor pre = ad::add(ad::matmul(x, ad::transpose(w)), b);
    return apply_activation(pre, activation, slope);
}

GraphConvLayer GraphConvLayer::glorot(int in, int out, Rng& rng) {
    GraphConvLayer layer;
    layer.w_self = glorot_matrix(out, in, rng);
    layer.w_neigh = glorot_matrix(out, in, rng);
    layer.bias = Matrix(1, out);
    return layer;
}

ad::Tensor GraphConvLayer::forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor h,
                                   const GraphSnapshot& g) const {
    if (h.rows() != g.node_count()) throw ShapeMismatch("GraphConvLayer: row count differs from N");
    if (h.cols() != w_self.cols()) throw ShapeMismatch("GraphConvLayer: input width differs");
    ad::Tensor ws = params.bind(tape, w_self);
    ad::Tensor wn = params.bind(tape, w_neigh);
    ad::Tensor b = params.bind(tape, bias);
    ad::Tensor agg = ad::matmul(tape.constant(neighbor_sum_matrix(g)), h);
    ad::Tensor self_term = ad::matmul(h, ad::transpose(ws));
    ad::Tensor neigh_term = ad::matmul(agg, ad::transpose(wn));
    return ad::add(ad::add(self_term, neigh_term), b);
}

SageLayer SageLayer::glorot(int in, int out, Rng& rng) {
    SageLayer layer;
    layer.w_self = glorot_matrix(out, in, rng);
    layer.w_neigh = glorot_matrix(out, in, rng);
    layer.bias = Matrix(1, out);
    return layer;
}

ad::Tensor SageLayer::forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor h,
                              const GraphSnapshot& g) const {
    if (h.rows() != g.node_count()) throw ShapeMismatch("SageLayer: row count differs from N");
    if (h.cols() != w_self.cols()) throw ShapeMismatch("SageLayer: input width differs");
    ad::Tensor ws = params.bind(tape, w_self);
    ad::Tensor wn = params.bind(tape, w_neigh);
    ad::Tensor b = params.bind(tape, bias);
    ad::Tensor agg = ad::matmul(tape.constant(neighbor_mean_matrix(g)), h);
    ad::Tensor self_term = ad::matmul(h, ad::transpose(ws));
    ad::Tensor neigh_term = ad::matmul(agg, ad::transpose(wn));
    return ad::add(ad::add(self_term, neigh_term), b);
}

Matrix neighbor_sum_matrix(const GraphSnapshot& g) { return g.weights; }

Matrix neighbor_mean_matrix(const GraphSnapshot& g) {
    const int n = g.node_count();
    Matrix mean(n, n);
    for (int i = 0; i < n; ++i) {
        int degree = 0;
        for (int j = 0; j < n; ++j)
            if (g.weights(i, j) > 0.0) ++degree;
        if (degree == 0) continue;
        const double inv = 1.0 / degree;
        for (int j = 0; j < n; ++j)
            if (g.weights(i, j) > 0.0) mean(i, j) = inv;
    }
    return mean;
}

}  // namespace gkae::nn
