#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gkae/gkae.hpp"
#include "gkae/graph.hpp"
#include "gkae/layers.hpp"

namespace gkae {

// Binary node-by-time observability matrix J with the tau-prefix rule:
// every column t < tau is all ones.
struct SamplingMask {
    Matrix observed;  // N x T, entries in {0,1}
    int tau = 0;
    double rate = 0.0;

    int node_count() const { return observed.rows(); }
    int length() const { return observed.cols(); }
    bool is_observed(int node, int t) const { return observed(node, t) != 0.0; }
};

// For each column t >= tau, floor(rate * N) distinct nodes drawn uniformly
// (seeded) are hidden. Throws RateOutOfRange unless 0 <= rate < 1.
SamplingMask make_mask(int nodes, int steps, int tau, double rate, std::uint64_t seed);

// Hidden signals zeroed and edges incident to hidden nodes removed:
// y'(t) = J(:,t) .* x(t), W'(t) = W(t) .* (J(:,t) J(:,t)^T).
GraphSequence apply_mask(const GraphSequence& seq, const SamplingMask& mask);

struct LcConfig {
    int input_dim = 1;
    int embed_dim = 8;        // must match the teacher's embedding size
    int decoder_hidden = 32;
    int output_dim = 0;       // N
    double leaky_slope = 0.01;
    double beta1 = 1.0;       // latent-consistency weight
    double beta2 = 1e-2;      // decoder-consistency weight
};

// Latent-consistency autoencoder: two mean-aggregation layers pooled to an
// embedding matched against teacher targets, and a dense decoder back to
// node signals.
struct LcModel {
    LcConfig config;
    nn::SageLayer enc1;  // input_dim -> embed_dim
    nn::SageLayer enc2;  // embed_dim -> embed_dim
    nn::DenseLayer dec_hidden;
    nn::DenseLayer dec_out;

    static LcModel init(LcConfig cfg, std::uint64_t seed);

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;
};

ad::Tensor lc_encode(ad::Tape& tape, ad::ParamSet& params, const LcModel& m,
                     const GraphSnapshot& masked);
ad::Tensor lc_decode(ad::Tape& tape, ad::ParamSet& params, const LcModel& m, ad::Tensor g);
Matrix lc_encode(const LcModel& m, const GraphSnapshot& masked);
Matrix lc_decode(const LcModel& m, const Matrix& g);

// Teacher targets for LC training: embeddings of the fully observed
// snapshots for t < tau and Koopman-predicted embeddings rolled out from
// g(tau-1) for t >= tau, plus the teacher-decoded signals of the tail.
struct LcTargets {
    Matrix embeddings;    // T x b
    Matrix decoded_tail;  // (T - tau) x N
    int tau = 0;
};

LcTargets compute_lc_targets(const GkaeModel& teacher, const GraphSequence& full_seq, int tau);

// beta1 * (L_latent + L_cosine) + beta2 * L_par with the teacher frozen.
// Throws MissingTargets when target sizes do not cover the sequence.
ad::Tensor build_lc_loss(ad::Tape& tape, ad::ParamSet& params, const LcModel& m,
                         const GraphSequence& masked_seq, const LcTargets& targets);
double loss_lc(const LcModel& m, const GraphSequence& masked_seq, const LcTargets& targets);

struct LcTrainConfig {
    int epochs = 200;
    double learning_rate = 1e-2;
    std::uint64_t seed = 0;
};

struct LcTraining {
    LcModel model;
    std::vector<double> loss_history;
};

// Trains an LC model on the masked sequence against targets derived from
// the (already trained) teacher. The teacher is never modified.
LcTraining train_lc(const GkaeModel& teacher, const GraphSequence& full_seq,
                    const SamplingMask& mask, LcConfig cfg, const LcTrainConfig& train);

// Decoder output for every step of a masked sequence: N x T.
Matrix reconstruct(const LcModel& m, const GraphSequence& masked_seq);

// CSV report with columns t,node,observed_flag,truth,estimate.
void write_reconstruction_report(const std::string& path, const Matrix& truth,
                                 const Matrix& estimate, const SamplingMask& mask);

}  // namespace gkae
