#include "gkae/gkae.hpp"

#include <fstream>
#include <utility>

#include "gkae/error.hpp"
#include "gkae/rng.hpp"
#include "json.hpp"

namespace gkae {

using nlohmann::json;

GkaeModel GkaeModel::init(GkaeConfig cfg, std::uint64_t seed) {
    if (cfg.output_dim <= 0) throw Error("GkaeModel::init: output_dim must be set from the data");
    Rng rng(seed);
    GkaeModel m;
    m.config = cfg;
    m.enc_conv = nn::GraphConvLayer::glorot(cfg.input_dim, cfg.embed_dim, rng);
    m.enc_sage = nn::SageLayer::glorot(cfg.embed_dim, cfg.embed_dim, rng);

    // hidden layers carry the configured activation; the final projection of
    // each stack is affine so the latent and embedding ranges stay unbounded
    auto dense_stack = [&](int in, int out) {
        std::vector<nn::DenseLayer> stack;
        for (int i = 0; i < cfg.kae_depth; ++i) {
            const int li = (i == 0) ? in : cfg.kae_hidden;
            const int lo = (i == cfg.kae_depth - 1) ? out : cfg.kae_hidden;
            const bool last = i == cfg.kae_depth - 1;
            stack.push_back(nn::DenseLayer::glorot(
                li, lo, last ? nn::Activation::Identity : cfg.kae_activation, rng));
        }
        return stack;
    };
    m.koopman_encoder = dense_stack(cfg.embed_dim, cfg.koopman_dim);

    // mildly contractive identity start: powers of K stay bounded over the
    // whole linearity horizon from the first epoch
    m.koopman = scaled(Matrix::identity(cfg.koopman_dim), 0.9);

    m.koopman_decoder = dense_stack(cfg.koopman_dim, cfg.embed_dim);
    m.dec_hidden = nn::DenseLayer::glorot(cfg.embed_dim, cfg.graph_decoder_hidden,
                                          nn::Activation::LeakyRelu, rng);
    m.dec_out = nn::DenseLayer::glorot(cfg.graph_decoder_hidden, cfg.output_dim,
                                       nn::Activation::Identity, rng);
    return m;
}

std::vector<std::pair<std::string, Matrix*>> GkaeModel::named_parameters() {
    std::vector<std::pair<std::string, Matrix*>> out;
    out.emplace_back("enc_conv.w_self", &enc_conv.w_self);
    out.emplace_back("enc_conv.w_neigh", &enc_conv.w_neigh);
    out.emplace_back("enc_conv.bias", &enc_conv.bias);
    out.emplace_back("enc_sage.w_self", &enc_sage.w_self);
    out.emplace_back("enc_sage.w_neigh", &enc_sage.w_neigh);
    out.emplace_back("enc_sage.bias", &enc_sage.bias);
    for (std::size_t i = 0; i < koopman_encoder.size(); ++i) {
        out.emplace_back("koopman_encoder." + std::to_string(i) + ".weight",
                         &koopman_encoder[i].weight);
        out.emplace_back("koopman_encoder." + std::to_string(i) + ".bias",
                         &koopman_encoder[i].bias);
    }
    out.emplace_back("koopman", &koopman);
    for (std::size_t i = 0; i < koopman_decoder.size(); ++i) {
        out.emplace_back("koopman_decoder." + std::to_string(i) + ".weight",
                         &koopman_decoder[i].weight);
        out.emplace_back("koopman_decoder." + std::to_string(i) + ".bias",
                         &koopman_decoder[i].bias);
    }
    out.emplace_back("dec_hidden.weight", &dec_hidden.weight);
    out.emplace_back("dec_hidden.bias", &dec_hidden.bias);
    out.emplace_back("dec_out.weight", &dec_out.weight);
    out.emplace_back("dec_out.bias", &dec_out.bias);
    return out;
}

std::vector<Matrix*> GkaeModel::parameters() {
    std::vector<Matrix*> out;
    for (auto& [name, p] : named_parameters()) out.push_back(p);
    return out;
}

std::vector<const Matrix*> GkaeModel::parameters() const {
    std::vector<const Matrix*> out;
    for (auto& [name, p] : const_cast<GkaeModel*>(this)->named_parameters()) out.push_back(p);
    return out;
}

std::size_t GkaeModel::parameter_count() const {
    std::size_t count = 0;
    for (const Matrix* p : parameters()) count += p->size();
    return count;
}

ad::Tensor encode_graph(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m,
                        const GraphSnapshot& g) {
    if (g.node_count() != m.config.output_dim)
        throw DimensionMismatch("encode_graph: snapshot node count differs from model");
    ad::Tensor h = tape.constant(Matrix::column_vector(g.signals));
    h = m.enc_conv.forward(tape, params, h, g);
    h = ad::leaky_relu(h, m.config.leaky_slope);
    h = m.enc_sage.forward(tape, params, h, g);
    h = ad::leaky_relu(h, m.config.leaky_slope);
    return ad::mean_rows(h);
}

namespace {

ad::Tensor dense_chain(ad::Tape& tape, ad::ParamSet& params,
                       const std::vector<nn::DenseLayer>& stack, ad::Tensor x) {
    for (const auto& layer : stack) x = layer.forward(tape, params, x);
    return x;
}

}  // namespace

ad::Tensor koopman_encode(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m, ad::Tensor g) {
    return dense_chain(tape, params, m.koopman_encoder, g);
}

ad::Tensor koopman_decode(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m, ad::Tensor h) {
    return dense_chain(tape, params, m.koopman_decoder, h);
}

ad::Tensor graph_decode(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m, ad::Tensor g) {
    return m.dec_out.forward(tape, params, m.dec_hidden.forward(tape, params, g));
}

Matrix encode_graph(const GkaeModel& m, const GraphSnapshot& g) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return encode_graph(tape, frozen, m, g).value();
}

Matrix koopman_encode(const GkaeModel& m, const Matrix& g) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return koopman_encode(tape, frozen, m, tape.constant(g)).value();
}

Matrix koopman_decode(const GkaeModel& m, const Matrix& h) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return koopman_decode(tape, frozen, m, tape.constant(h)).value();
}

Matrix graph_decode(const GkaeModel& m, const Matrix& g) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return graph_decode(tape, frozen, m, tape.constant(g)).value();
}

Matrix koopman_advance(const GkaeModel& m, const Matrix& h, int steps) {
    if (steps < 0) throw Error("koopman_advance: steps must be >= 0");
    const Matrix kt = transposed(m.koopman);
    Matrix out = h;
    for (int p = 0; p < steps; ++p) out = matmul(out, kt);
    return out;
}

std::vector<double> forward_chain(const GkaeModel& m, const GraphSnapshot& g, int steps) {
    const Matrix embedding = encode_graph(m, g);
    const Matrix advanced = koopman_advance(m, koopman_encode(m, embedding), steps);
    const Matrix signals = graph_decode(m, koopman_decode(m, advanced));
    return signals.values();
}

ad::Tensor build_gkae_loss(ad::Tape& tape, ad::ParamSet& params, const GkaeModel& m,
                           const GraphSequence& seq, int linearity_length) {
    const int t_len = seq.length();
    const int max_step = linearity_length;
    if (max_step < 1 || max_step >= t_len)
        throw LTooLarge("build_gkae_loss: linearity length must satisfy 1 <= L < T");

    // g(t) for every step, stacked as T x b
    std::vector<ad::Tensor> embeddings;
    embeddings.reserve(t_len);
    for (int t = 0; t < t_len; ++t)
        embeddings.push_back(encode_graph(tape, params, m, seq.snapshots[t]));
    ad::Tensor stacked = ad::concat_rows(embeddings);

    // signal reconstruction term: per-step element-mean errors summed over t
    ad::Tensor decoded = graph_decode(tape, params, m, stacked);
    ad::Tensor truth = tape.constant(transposed(signals_matrix(seq)));
    ad::Tensor loss = ad::scale(ad::mse(decoded, truth), static_cast<double>(t_len));

    // latent linearity term; targets are frozen copies of the embeddings
    ad::Tensor targets = ad::detach(stacked);
    ad::Tensor koopman_t = ad::transpose(params.bind(tape, m.koopman));
    ad::Tensor latents = koopman_encode(tape, params, m, stacked);
    for (int l = 0; l < max_step; ++l) {
        const int valid = t_len - l;
        ad::Tensor predicted =
            koopman_decode(tape, params, m, ad::slice_rows(latents, 0, valid));
        ad::Tensor expected = ad::slice_rows(targets, l, valid);
        loss = ad::add(loss, ad::scale(ad::mse(predicted, expected), static_cast<double>(valid)));
        if (l + 1 < max_step) latents = ad::matmul(latents, koopman_t);
    }
    return loss;
}

double loss_gkae(const GkaeModel& m, const GraphSequence& seq, int linearity_length) {
    ad::Tape tape;
    ad::ParamSet frozen(false);
    return build_gkae_loss(tape, frozen, m, seq, linearity_length).scalar();
}

GkaeTraining train_gkae(const GraphSequence& seq, GkaeConfig cfg, const TrainConfig& train) {
    if (seq.length() < train.linearity_length + 1)
        throw LTooLarge("train_gkae: sequence shorter than linearity length + 1");
    cfg.output_dim = seq.node_count();

    GkaeTraining result;
    result.model = GkaeModel::init(cfg, train.seed);
    GkaeModel& model = result.model;

    std::vector<Matrix*> params = model.parameters();
    ad::AdamState adam(ad::AdamConfig{.learning_rate = train.learning_rate});
    ad::Tape tape;
    for (int epoch = 0; epoch < train.epochs; ++epoch) {
        tape.clear();
        ad::ParamSet bindings(true);
        ad::Tensor loss = build_gkae_loss(tape, bindings, model, seq, train.linearity_length);
        result.loss_history.push_back(loss.scalar());
        tape.backward(loss);
        std::vector<Matrix> grads;
        grads.reserve(params.size());
        for (Matrix* p : params) grads.push_back(bindings.gradient(*p));
        ad::adam_step(params, grads, adam);
    }
    return result;
}

std::vector<Matrix> predict_embeddings(const GkaeModel& m, const Matrix& origin_embedding,
                                       int horizon) {
    if (horizon < 0) throw Error("predict_embeddings: horizon must be >= 0");
    std::vector<Matrix> out;
    out.reserve(horizon);
    const Matrix kt = transposed(m.koopman);
    Matrix h = koopman_encode(m, origin_embedding);
    for (int p = 1; p <= horizon; ++p) {
        h = matmul(h, kt);
        out.push_back(koopman_decode(m, h));
    }
    return out;
}

Matrix predict_sequence(const GkaeModel& m, const GraphSequence& prefix, int horizon) {
    if (prefix.snapshots.empty()) throw Error("predict_sequence: empty prefix");
    const Matrix origin = encode_graph(m, prefix.snapshots.back());
    const std::vector<Matrix> embeddings = predict_embeddings(m, origin, horizon);
    Matrix out(m.config.output_dim, horizon);
    for (int p = 0; p < horizon; ++p) {
        const Matrix signals = graph_decode(m, embeddings[p]);
        for (int i = 0; i < out.rows(); ++i) out(i, p) = signals(0, i);
    }
    return out;
}

namespace {

constexpr const char* kModelFormat = "gkae-model/1";

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<int>(), j.at("cols").get<int>(),
                  j.at("data").get<std::vector<double>>());
}

int activation_code(nn::Activation a) { return static_cast<int>(a); }

nn::Activation activation_from_code(int code) {
    switch (code) {
        case 0: return nn::Activation::Identity;
        case 1: return nn::Activation::Tanh;
        case 2: return nn::Activation::LeakyRelu;
    }
    throw FormatError("checkpoint: unknown activation code");
}

}  // namespace

void save_model(const GkaeModel& m, const std::string& path) {
    json j;
    j["format"] = kModelFormat;
    j["config"] = {{"input_dim", m.config.input_dim},
                   {"embed_dim", m.config.embed_dim},
                   {"koopman_dim", m.config.koopman_dim},
                   {"kae_hidden", m.config.kae_hidden},
                   {"kae_depth", m.config.kae_depth},
                   {"graph_decoder_hidden", m.config.graph_decoder_hidden},
                   {"output_dim", m.config.output_dim},
                   {"leaky_slope", m.config.leaky_slope},
                   {"kae_activation", activation_code(m.config.kae_activation)}};
    j["norm"] = {{"mean", m.norm.mean}, {"stddev", m.norm.stddev}, {"clamped", m.norm.clamped}};
    json params = json::object();
    for (auto& [name, p] : const_cast<GkaeModel&>(m).named_parameters())
        params[name] = matrix_to_json(*p);
    j["params"] = std::move(params);

    std::ofstream out(path);
    if (!out) throw IoError("save_model: cannot open " + path);
    out << j.dump();
    if (!out) throw IoError("save_model: write failed for " + path);
}

GkaeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_model: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(std::string("load_model: invalid JSON: ") + e.what());
    }
    if (j.value("format", "") != kModelFormat)
        throw FormatError("load_model: unsupported checkpoint format tag");

    GkaeConfig cfg;
    const json& c = j.at("config");
    cfg.input_dim = c.at("input_dim").get<int>();
    cfg.embed_dim = c.at("embed_dim").get<int>();
    cfg.koopman_dim = c.at("koopman_dim").get<int>();
    cfg.kae_hidden = c.at("kae_hidden").get<int>();
    cfg.kae_depth = c.at("kae_depth").get<int>();
    cfg.graph_decoder_hidden = c.at("graph_decoder_hidden").get<int>();
    cfg.output_dim = c.at("output_dim").get<int>();
    cfg.leaky_slope = c.at("leaky_slope").get<double>();
    cfg.kae_activation = activation_from_code(c.at("kae_activation").get<int>());

    GkaeModel m = GkaeModel::init(cfg, 0);
    m.norm.mean = j.at("norm").at("mean").get<double>();
    m.norm.stddev = j.at("norm").at("stddev").get<double>();
    m.norm.clamped = j.at("norm").at("clamped").get<bool>();
    const json& params = j.at("params");
    for (auto& [name, p] : m.named_parameters()) {
        if (!params.contains(name)) throw FormatError("load_model: missing parameter " + name);
        Matrix loaded = matrix_from_json(params.at(name));
        if (!loaded.same_shape(*p)) throw FormatError("load_model: shape mismatch for " + name);
        *p = std::move(loaded);
    }
    return m;
}

}  // namespace gkae
