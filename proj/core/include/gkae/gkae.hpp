#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gkae/adam.hpp"
#include "gkae/autodiff.hpp"
#include "gkae/graph.hpp"
#include "gkae/layers.hpp"
#include "gkae/normalize.hpp"

namespace gkae {

struct GkaeConfig {
    int input_dim = 1;             // node signal width (scalar signals)
    int embed_dim = 8;             // graph embedding size b
    int koopman_dim = 8;           // latent size M
    int kae_hidden = 16;           // width of the Koopman encoder/decoder stacks
    int kae_depth = 6;             // layers per Koopman stack
    int graph_decoder_hidden = 32;
    int output_dim = 0;            // N; set from the data before init
    double leaky_slope = 0.01;
    nn::Activation kae_activation = nn::Activation::Tanh;
};

// Graph Koopman autoencoder. Five trainable parts: a two-layer graph encoder
// pooled to an embedding g, a dense Koopman encoder to the latent h, the
// square Koopman matrix advancing h linearly, a dense Koopman decoder back
// to g, and a two-layer graph decoder back to node signals.
struct GkaeModel {
    GkaeConfig config;
    nn::GraphConvLayer enc_conv;                // input_dim -> embed_dim
    nn::SageLayer enc_sage;                     // embed_dim -> embed_dim
    std::vector<nn::DenseLayer> koopman_encoder;
    Matrix koopman;                             // M x M, no bias
    std::vector<nn::DenseLayer> koopman_decoder;
    nn::DenseLayer dec_hidden;                  // embed_dim -> hidden, leaky relu
    nn::DenseLayer dec_out;                     // hidden -> N, identity
    NormStats norm;                             // training-window statistics

    static GkaeModel init(GkaeConfig cfg, std::uint64_t seed);

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;
    std::vector<std::pair<std::string, Matrix*>> named_parameters();
    std::size_t parameter_count() const;
};

struct TrainConfig {
    int epochs = 200;
    int linearity_length = 50;  // L, maximum prediction step during training
    double learning_rate = 1e-2;
    std::uint64_t seed = 0;
};

// --- tape-context forward passes (trainable or frozen via the ParamSet) ---

// Mean over node rows of the two-layer graph-encoder output: 1 x b.
ad::Tensor encode_graph(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m,
                        const GraphSnapshot& g);
ad::Tensor koopman_encode(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m, ad::Tensor g);
ad::Tensor koopman_decode(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m, ad::Tensor h);
ad::Tensor graph_decode(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m, ad::Tensor g);

// --- frozen convenience wrappers ---

Matrix encode_graph(const GkaeModel& m, const GraphSnapshot& g);
Matrix koopman_encode(const GkaeModel& m, const Matrix& g);
Matrix koopman_decode(const GkaeModel& m, const Matrix& h);
Matrix graph_decode(const GkaeModel& m, const Matrix& g);

// h advanced by `steps` applications of the Koopman matrix (repeated
// multiplication; steps = 0 returns h).
Matrix koopman_advance(const GkaeModel& m, const Matrix& h, int steps);

// Full chain: encode, advance `steps`, decode back to node signals (length N).
std::vector<double> forward_chain(const GkaeModel& m, const GraphSnapshot& g, int steps);

// Aggregated training loss on a sequence: a per-step signal reconstruction
// term plus the multi-step latent linearity term over l = 0..L-1 with
// stop-gradient targets. Throws LTooLarge when L >= T or L < 1.
ad::Tensor build_gkae_loss(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m,
                           const GraphSequence& seq, int linearity_length);
double loss_gkae(const GkaeModel& m, const GraphSequence& seq, int linearity_length);

struct GkaeTraining {
    GkaeModel model;
    std::vector<double> loss_history;  // loss at the start of each epoch
};

// Full-sequence Adam step per epoch. Deterministic for a fixed seed.
GkaeTraining train_gkae(const GraphSequence& seq, GkaeConfig cfg, const TrainConfig& train);

// Embedding rollout from an origin embedding: element p-1 is the decoded
// latent after p Koopman steps, p = 1..horizon.
std::vector<Matrix> predict_embeddings(const GkaeModel& m, const Matrix& origin_embedding,
                                       int horizon);

// Signal rollout seeded from the last snapshot of the prefix; returns an
// N x horizon matrix whose column p-1 is the prediction p steps ahead.
Matrix predict_sequence(const GkaeModel& m, const GraphSequence& prefix, int horizon);

// Versioned JSON checkpoint with named parameter arrays, shapes,
// normalization statistics and a config echo.
void save_model(const GkaeModel& m, const std::string& path);
GkaeModel load_model(const std::string& path);

}  // namespace gkae
