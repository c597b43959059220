#include "gkae/lcrecon.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "gkae/error.hpp"
#include "gkae/rng.hpp"

namespace gkae {

SamplingMask make_mask(int nodes, int steps, int tau, double rate, std::uint64_t seed) {
    if (rate < 0.0 || rate >= 1.0) throw RateOutOfRange("make_mask: rate must satisfy 0 <= rate < 1");
    if (tau < 0 || tau >= steps) throw DimensionMismatch("make_mask: tau must satisfy 0 <= tau < T");

    SamplingMask mask;
    mask.observed = Matrix(nodes, steps, 1.0);
    mask.tau = tau;
    mask.rate = rate;

    const int hidden_per_step = static_cast<int>(rate * nodes);
    Rng rng(seed);
    std::vector<int> order(nodes);
    for (int t = tau; t < steps; ++t) {
        std::iota(order.begin(), order.end(), 0);
        // partial Fisher-Yates: first hidden_per_step entries are the draw
        for (int i = 0; i < hidden_per_step; ++i) {
            const int j = i + rng.uniform_int(nodes - i);
            std::swap(order[i], order[j]);
            mask.observed(order[i], t) = 0.0;
        }
    }
    return mask;
}

GraphSequence apply_mask(const GraphSequence& seq, const SamplingMask& mask) {
    const int n = seq.node_count(), t_len = seq.length();
    if (mask.node_count() != n || mask.length() != t_len)
        throw DimensionMismatch("apply_mask: mask shape differs from sequence");

    GraphSequence out;
    out.kind = SequenceKind::Type3;
    out.dt = seq.dt;
    out.snapshots.reserve(t_len);
    for (int t = 0; t < t_len; ++t) {
        const GraphSnapshot& src = seq.snapshots[t];
        GraphSnapshot masked;
        masked.signals.resize(n);
        masked.weights = Matrix(n, n);
        for (int i = 0; i < n; ++i)
            masked.signals[i] = mask.is_observed(i, t) ? src.signals[i] : 0.0;
        for (auto [l, m] : src.edges) {
            if (mask.is_observed(l, t) && mask.is_observed(m, t)) {
                masked.edges.emplace_back(l, m);
                masked.weights(l, m) = src.weights(l, m);
                masked.weights(m, l) = src.weights(m, l);
            }
        }
        out.snapshots.push_back(std::move(masked));
    }
    return out;
}

LcModel LcModel::init(LcConfig cfg, std::uint64_t seed) {
    if (cfg.output_dim <= 0) throw Error("LcModel::init: output_dim must be set from the data");
    Rng rng(seed);
    LcModel m;
    m.config = cfg;
    m.enc1 = nn::SageLayer::glorot(cfg.input_dim, cfg.embed_dim, rng);
    m.enc2 = nn::SageLayer::glorot(cfg.embed_dim, cfg.embed_dim, rng);
    m.dec_hidden = nn::DenseLayer::glorot(cfg.embed_dim, cfg.decoder_hidden,
                                          nn::Activation::LeakyRelu, rng);
    m.dec_out = nn::DenseLayer::glorot(cfg.decoder_hidden, cfg.output_dim,
                                       nn::Activation::Identity, rng);
    return m;
}

std::vector<Matrix*> LcModel::parameters() {
    return {&enc1.w_self, &enc1.w_neigh, &enc1.bias,  &enc2.w_self,    &enc2.w_neigh,
            &enc2.bias,   &dec_hidden.weight, &dec_hidden.bias, &dec_out.weight, &dec_out.bias};
}

std::vector<const Matrix*> LcModel::parameters() const {
    auto mut = const_cast<LcModel*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

ad::Tensor lc_encode(ad::Tape& tape, ad::ParamSet& params, const LcModel& m,
                     const GraphSnapshot& masked) {
    if (masked.node_count() != m.config.output_dim)
        throw DimensionMismatch("lc_encode: snapshot node count differs from model");
    ad::Tensor h = tape.constant(Matrix::column_vector(masked.signals));
    h = m.enc1.forward(tape, params, h, masked);
    h = ad::leaky_relu(h, m.config.leaky_slope);
    h = m.enc2.forward(tape, params, h, masked);
    h = ad::leaky_relu(h, m.config.leaky_slope);
    return ad::mean_rows(h);
}

ad::Tensor lc_decode(ad::Tape& tape, ad::ParamSet& params, const LcModel& m, ad::Tensor g) {
    return m.dec_out.forward(tape, params, m.dec_hidden.forward(tape, params, g));
}

Matrix lc_encode(const LcModel& m, const GraphSnapshot& masked) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return lc_encode(tape, frozen, m, masked).value();
}

Matrix lc_decode(const LcModel& m, const Matrix& g) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return lc_decode(tape, frozen, m, tape.constant(g)).value();
}

LcTargets compute_lc_targets(const GkaeModel& teacher, const GraphSequence& full_seq, int tau) {
    const int t_len = full_seq.length();
    if (tau < 1 || tau > t_len)
        throw DimensionMismatch("compute_lc_targets: tau must satisfy 1 <= tau <= T");

    LcTargets targets;
    targets.tau = tau;
    targets.embeddings = Matrix(t_len, teacher.config.embed_dim);
    for (int t = 0; t < tau; ++t) {
        const Matrix g = encode_graph(teacher, full_seq.snapshots[t]);
        for (int j = 0; j < g.cols(); ++j) targets.embeddings(t, j) = g(0, j);
    }
    if (tau < t_len) {
        const Matrix origin = encode_graph(teacher, full_seq.snapshots[tau - 1]);
        const std::vector<Matrix> predicted = predict_embeddings(teacher, origin, t_len - tau);
        targets.decoded_tail = Matrix(t_len - tau, teacher.config.output_dim);
        for (int t = tau; t < t_len; ++t) {
            const Matrix& g = predicted[t - tau];
            for (int j = 0; j < g.cols(); ++j) targets.embeddings(t, j) = g(0, j);
            const Matrix decoded = graph_decode(teacher, g);
            for (int j = 0; j < decoded.cols(); ++j) targets.decoded_tail(t - tau, j) = decoded(0, j);
        }
    }
    return targets;
}

ad::Tensor build_lc_loss(ad::Tape& tape, ad::ParamSet& params, const LcModel& m,
                         const GraphSequence& masked_seq, const LcTargets& targets) {
    const int t_len = masked_seq.length();
    const int tau = targets.tau;
    if (targets.embeddings.rows() != t_len || targets.embeddings.cols() != m.config.embed_dim)
        throw MissingTargets("build_lc_loss: embedding targets do not cover the sequence");
    if (tau < t_len &&
        (targets.decoded_tail.rows() != t_len - tau ||
         targets.decoded_tail.cols() != m.config.output_dim))
        throw MissingTargets("build_lc_loss: decoded targets do not cover the tail");

    std::vector<ad::Tensor> embeddings;
    embeddings.reserve(t_len);
    for (int t = 0; t < t_len; ++t)
        embeddings.push_back(lc_encode(tape, params, m, masked_seq.snapshots[t]));
    ad::Tensor stacked = ad::concat_rows(embeddings);
    ad::Tensor target_g = tape.constant(targets.embeddings);

    // latent consistency: per-step mean-square error plus 1 - cosine
    ad::Tensor latent = ad::scale(ad::mse(stacked, target_g), static_cast<double>(t_len));
    ad::Tensor one = tape.constant(Matrix(1, 1, 1.0));
    ad::Tensor cosine = tape.constant(Matrix(1, 1, 0.0));
    for (int t = 0; t < t_len; ++t) {
        ad::Tensor c = ad::cosine_similarity(embeddings[t], ad::slice_rows(target_g, t, 1));
        cosine = ad::add(cosine, ad::sub(one, c));
    }
    ad::Tensor loss = ad::scale(ad::add(latent, cosine), m.config.beta1);

    // decoder output consistency on the predicted tail
    if (tau < t_len) {
        ad::Tensor decoded = lc_decode(tape, params, m, ad::slice_rows(stacked, tau, t_len - tau));
        ad::Tensor target_x = tape.constant(targets.decoded_tail);
        ad::Tensor par = ad::scale(ad::mse(decoded, target_x), static_cast<double>(t_len - tau));
        loss = ad::add(loss, ad::scale(par, m.config.beta2));
    }
    return loss;
}

double loss_lc(const LcModel& m, const GraphSequence& masked_seq, const LcTargets& targets) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return build_lc_loss(tape, frozen, m, masked_seq, targets).scalar();
}

LcTraining train_lc(const GkaeModel& teacher, const GraphSequence& full_seq,
                    const SamplingMask& mask, LcConfig cfg, const LcTrainConfig& train) {
    cfg.embed_dim = teacher.config.embed_dim;
    cfg.output_dim = full_seq.node_count();

    const GraphSequence masked = apply_mask(full_seq, mask);
    const LcTargets targets = compute_lc_targets(teacher, full_seq, mask.tau);

    LcTraining result;
    result.model = LcModel::init(cfg, train.seed);
    LcModel& model = result.model;

    std::vector<Matrix*> params = model.parameters();
    ad::AdamState adam(ad::AdamConfig{.learning_rate = train.learning_rate});
    ad::Tape tape;
    for (int epoch = 0; epoch < train.epochs; ++epoch) {
        tape.clear();
        ad::ParamSet bindings(true);
        ad::Tensor loss = build_lc_loss(tape, bindings, model, masked, targets);
        result.loss_history.push_back(loss.scalar());
        tape.backward(loss);
        std::vector<Matrix> grads;
        grads.reserve(params.size());
        for (Matrix* p : params) grads.push_back(bindings.gradient(*p));
        ad::adam_step(params, grads, adam);
    }
    return result;
}

Matrix reconstruct(const LcModel& m, const GraphSequence& masked_seq) {
    const int n = masked_seq.node_count(), t_len = masked_seq.length();
    Matrix out(n, t_len);
    for (int t = 0; t < t_len; ++t) {
        const Matrix decoded = lc_decode(m, lc_encode(m, masked_seq.snapshots[t]));
        for (int i = 0; i < n; ++i) out(i, t) = decoded(0, i);
    }
    return out;
}

void write_reconstruction_report(const std::string& path, const Matrix& truth,
                                 const Matrix& estimate, const SamplingMask& mask) {
    if (!truth.same_shape(estimate) || truth.rows() != mask.node_count() ||
        truth.cols() != mask.length())
        throw DimensionMismatch("write_reconstruction_report: shapes differ");
    std::ofstream out(path);
    if (!out) throw IoError("write_reconstruction_report: cannot open " + path);
    out << "t,node,observed_flag,truth,estimate\n";
    out.precision(17);
    for (int t = 0; t < truth.cols(); ++t)
        for (int i = 0; i < truth.rows(); ++i)
            out << t << ',' << i << ',' << (mask.is_observed(i, t) ? 1 : 0) << ',' << truth(i, t)
                << ',' << estimate(i, t) << '\n';
    if (!out) throw IoError("write_reconstruction_report: write failed for " + path);
}

}  // namespace gkae
