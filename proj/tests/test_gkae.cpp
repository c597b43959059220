#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "gkae/error.hpp"
#include "gkae/gkae.hpp"
#include "support/generators.hpp"

using namespace gkae;
using gkae::testing::random_matrix;

namespace {

GraphSnapshot ring(int n, const std::vector<double>& signals) {
    GraphSnapshot g;
    g.signals = signals;
    g.weights = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        g.weights(i, j) = 1.0;
        g.weights(j, i) = 1.0;
        g.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    return g;
}

// Smooth synthetic sequence: two traveling waves on a ring.
GraphSequence wave_sequence(int n, int t_len) {
    GraphSequence seq;
    seq.kind = SequenceKind::Type1;
    for (int t = 0; t < t_len; ++t) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i)
            x[i] = std::sin(0.2 * t + 2.0 * M_PI * i / n) + 0.5 * std::cos(0.1 * t);
        seq.snapshots.push_back(ring(n, x));
    }
    return seq;
}

GkaeConfig small_config(int n) {
    GkaeConfig cfg;
    cfg.output_dim = n;
    cfg.embed_dim = 4;
    cfg.koopman_dim = 3;
    cfg.kae_hidden = 6;
    cfg.kae_depth = 2;
    cfg.graph_decoder_hidden = 8;
    return cfg;
}

}  // namespace

TEST_CASE("encode_graph with zero weights returns the bias") {
    GkaeConfig cfg = small_config(5);
    GkaeModel m = GkaeModel::init(cfg, 1);
    for (Matrix* p : m.parameters()) *p = Matrix(p->rows(), p->cols());
    const double c = 0.7;  // nonnegative so the activation passes it through
    for (int j = 0; j < cfg.embed_dim; ++j) m.enc_sage.bias(0, j) = c;

    Rng rng(2);
    const GraphSnapshot g = ring(5, testing::random_signal(5, rng));
    const Matrix embedding = encode_graph(m, g);
    for (int j = 0; j < cfg.embed_dim; ++j) CHECK(embedding(0, j) == doctest::Approx(c));
}

TEST_CASE("embeddings are invariant under node permutation") {
    GkaeConfig cfg = small_config(6);
    GkaeModel m = GkaeModel::init(cfg, 3);
    Rng rng(4);
    const GraphSnapshot g = ring(6, testing::random_signal(6, rng));

    // rotate labels by two
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + 2, perm.end());
    GraphSnapshot pg;
    pg.signals.resize(6);
    pg.weights = Matrix(6, 6);
    for (int i = 0; i < 6; ++i) {
        pg.signals[perm[i]] = g.signals[i];
        for (int j = 0; j < 6; ++j) pg.weights(perm[i], perm[j]) = g.weights(i, j);
    }
    for (auto [l, mm] : g.edges)
        pg.edges.emplace_back(std::min(perm[l], perm[mm]), std::max(perm[l], perm[mm]));

    const Matrix a = encode_graph(m, g);
    const Matrix b = encode_graph(m, pg);
    CHECK(frobenius_norm(a - b) < 1e-12);
}

TEST_CASE("encode_graph matches the explicit layer formulas") {
    GkaeConfig cfg = small_config(4);
    GkaeModel m = GkaeModel::init(cfg, 9);
    Rng rng(10);
    const GraphSnapshot g = testing::random_graph(4, 0.7, rng);
    GraphSnapshot with_signals = g;
    with_signals.signals = testing::random_signal(4, rng);

    // independent re-computation with plain loops
    auto leaky = [&](double v) { return v < 0.0 ? cfg.leaky_slope * v : v; };
    const int b = cfg.embed_dim;
    Matrix h1(4, b);
    for (int i = 0; i < 4; ++i)
        for (int o = 0; o < b; ++o) {
            double acc = m.enc_conv.bias(0, o) + m.enc_conv.w_self(o, 0) * with_signals.signals[i];
            for (int j = 0; j < 4; ++j)
                acc += m.enc_conv.w_neigh(o, 0) * g.weights(i, j) * with_signals.signals[j];
            h1(i, o) = leaky(acc);
        }
    Matrix h2(4, b);
    for (int i = 0; i < 4; ++i) {
        int degree = 0;
        for (int j = 0; j < 4; ++j)
            if (g.weights(i, j) > 0.0) ++degree;
        for (int o = 0; o < b; ++o) {
            double acc = m.enc_sage.bias(0, o);
            for (int k = 0; k < b; ++k) {
                acc += m.enc_sage.w_self(o, k) * h1(i, k);
                if (degree > 0) {
                    double mean = 0.0;
                    for (int j = 0; j < 4; ++j)
                        if (g.weights(i, j) > 0.0) mean += h1(j, k);
                    acc += m.enc_sage.w_neigh(o, k) * mean / degree;
                }
            }
            h2(i, o) = leaky(acc);
        }
    }
    Matrix expected(1, b);
    for (int o = 0; o < b; ++o) {
        for (int i = 0; i < 4; ++i) expected(0, o) += h2(i, o);
        expected(0, o) /= 4.0;
    }

    const Matrix actual = encode_graph(m, with_signals);
    CHECK(frobenius_norm(actual - expected) < 1e-12);
}

TEST_CASE("koopman stacks map zero to zero through zero biases") {
    GkaeConfig cfg = small_config(4);
    GkaeModel m = GkaeModel::init(cfg, 5);
    for (auto& layer : m.koopman_encoder) layer.bias = Matrix(1, layer.bias.cols());
    for (auto& layer : m.koopman_decoder) layer.bias = Matrix(1, layer.bias.cols());
    CHECK(frobenius_norm(koopman_encode(m, Matrix(1, cfg.embed_dim))) == 0.0);
    CHECK(frobenius_norm(koopman_decode(m, Matrix(1, cfg.koopman_dim))) == 0.0);
}

TEST_CASE("two-layer koopman encoder matches hand arithmetic") {
    GkaeConfig cfg = small_config(4);
    cfg.kae_depth = 2;  // tanh hidden layer, affine output layer
    GkaeModel m = GkaeModel::init(cfg, 5);
    Rng rng(6);
    const Matrix g = random_matrix(1, cfg.embed_dim, rng);
    const Matrix h = koopman_encode(m, g);
    const nn::DenseLayer& hidden = m.koopman_encoder[0];
    const nn::DenseLayer& out = m.koopman_encoder[1];
    std::vector<double> mid(cfg.kae_hidden);
    for (int o = 0; o < cfg.kae_hidden; ++o) {
        double acc = hidden.bias(0, o);
        for (int k = 0; k < cfg.embed_dim; ++k) acc += hidden.weight(o, k) * g(0, k);
        mid[o] = std::tanh(acc);
    }
    for (int o = 0; o < cfg.koopman_dim; ++o) {
        double acc = out.bias(0, o);
        for (int k = 0; k < cfg.kae_hidden; ++k) acc += out.weight(o, k) * mid[k];
        CHECK(h(0, o) == doctest::Approx(acc));
    }
}

TEST_CASE("koopman_advance") {
    GkaeConfig cfg = small_config(4);
    GkaeModel m = GkaeModel::init(cfg, 7);
    Rng rng(8);
    const Matrix h = random_matrix(1, cfg.koopman_dim, rng);

    SUBCASE("identity matrix keeps h for any power") {
        m.koopman = Matrix::identity(cfg.koopman_dim);
        CHECK(koopman_advance(m, h, 5) == h);
    }
    SUBCASE("zero steps returns h unchanged") { CHECK(koopman_advance(m, h, 0) == h); }
    SUBCASE("diagonal half decays to an eighth in three steps") {
        m.koopman = scaled(Matrix::identity(cfg.koopman_dim), 0.5);
        const Matrix out = koopman_advance(m, h, 3);
        for (int j = 0; j < cfg.koopman_dim; ++j)
            CHECK(out(0, j) == doctest::Approx(0.125 * h(0, j)));
    }
}

TEST_CASE("forward_chain equals the manual composition") {
    GkaeConfig cfg = small_config(5);
    GkaeModel m = GkaeModel::init(cfg, 11);
    Rng rng(12);
    const GraphSnapshot g = ring(5, testing::random_signal(5, rng));

    const std::vector<double> chained = forward_chain(m, g, 3);
    const Matrix manual =
        graph_decode(m, koopman_decode(m, koopman_advance(m, koopman_encode(m, encode_graph(m, g)), 3)));
    for (int i = 0; i < 5; ++i) CHECK(chained[i] == doctest::Approx(manual(0, i)));
}

TEST_CASE("loss_gkae matches a hand expansion at T=2, L=1") {
    GkaeConfig cfg = small_config(3);
    GkaeModel m = GkaeModel::init(cfg, 13);
    GraphSequence seq = wave_sequence(3, 2);

    const double loss = loss_gkae(m, seq, 1);

    double expected = 0.0;
    for (int t = 0; t < 2; ++t) {
        const Matrix g = encode_graph(m, seq.snapshots[t]);
        const Matrix xhat = graph_decode(m, g);
        double gnn = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double e = xhat(0, i) - seq.snapshots[t].signals[i];
            gnn += e * e;
        }
        expected += gnn / 3.0;
        const Matrix round = koopman_decode(m, koopman_encode(m, g));
        double kae = 0.0;
        for (int j = 0; j < cfg.embed_dim; ++j) {
            const double e = round(0, j) - g(0, j);
            kae += e * e;
        }
        expected += kae / cfg.embed_dim;
    }
    CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("loss is non-negative and zero only without residuals") {
    GkaeConfig cfg = small_config(4);
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        GkaeModel m = GkaeModel::init(cfg, 100 + trial);
        CHECK(loss_gkae(m, wave_sequence(4, 6), 2) >= 0.0);
    }

    // identity activations, identity maps and a constant zero sequence give
    // an exactly zero loss
    GkaeConfig id_cfg = small_config(2);
    id_cfg.embed_dim = 2;
    id_cfg.koopman_dim = 2;
    id_cfg.kae_depth = 1;
    id_cfg.kae_activation = nn::Activation::Identity;
    GkaeModel m = GkaeModel::init(id_cfg, 1);
    for (Matrix* p : m.parameters()) *p = Matrix(p->rows(), p->cols());
    m.koopman_encoder[0].weight = Matrix::identity(2);
    m.koopman_decoder[0].weight = Matrix::identity(2);
    m.koopman = Matrix::identity(2);

    GraphSequence zeros;
    zeros.kind = SequenceKind::Type1;
    for (int t = 0; t < 4; ++t) zeros.snapshots.push_back(ring(2, {0.0, 0.0}));
    CHECK(loss_gkae(m, zeros, 2) == 0.0);
}

TEST_CASE("loss rejects an out-of-range linearity length") {
    GkaeConfig cfg = small_config(3);
    GkaeModel m = GkaeModel::init(cfg, 5);
    const GraphSequence seq = wave_sequence(3, 4);
    CHECK_THROWS_AS(loss_gkae(m, seq, 4), LTooLarge);
    CHECK_THROWS_AS(loss_gkae(m, seq, 0), LTooLarge);
}

TEST_CASE("training reduces the loss and is seed deterministic") {
    const GraphSequence seq = wave_sequence(5, 30);
    GkaeConfig cfg = small_config(5);
    TrainConfig tcfg;
    tcfg.epochs = 25;
    tcfg.linearity_length = 5;
    tcfg.seed = 3;

    const GkaeTraining a = train_gkae(seq, cfg, tcfg);
    CHECK(a.loss_history.size() == 25);
    CHECK(a.loss_history.back() < a.loss_history.front());

    const GkaeTraining b = train_gkae(seq, cfg, tcfg);
    CHECK(a.loss_history == b.loss_history);
    const auto pa = a.model.parameters();
    const auto pb = b.model.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);
}

TEST_CASE("every parameter receives gradient on random data") {
    const GraphSequence seq = wave_sequence(5, 8);
    GkaeConfig cfg = small_config(5);
    GkaeModel m = GkaeModel::init(cfg, 21);

    ad::Tape tape;
    ad::ParamSet bindings(true);
    ad::Tensor loss = build_gkae_loss(tape, bindings, m, seq, 3);
    tape.backward(loss);
    for (auto& [name, p] : m.named_parameters()) {
        INFO("parameter: " << name);
        CHECK(max_abs(bindings.gradient(*p)) > 0.0);
    }
}

TEST_CASE("predict_embeddings composes matrix powers exactly") {
    GkaeConfig cfg = small_config(4);
    GkaeModel m = GkaeModel::init(cfg, 31);
    Rng rng(32);
    const Matrix g = random_matrix(1, cfg.embed_dim, rng);

    SUBCASE("identity sub-models give a constant embedding sequence") {
        GkaeConfig id_cfg = cfg;
        id_cfg.kae_depth = 1;
        id_cfg.koopman_dim = cfg.embed_dim;
        id_cfg.kae_activation = nn::Activation::Identity;
        GkaeModel idm = GkaeModel::init(id_cfg, 1);
        for (Matrix* p : idm.parameters()) *p = Matrix(p->rows(), p->cols());
        idm.koopman_encoder[0].weight = Matrix::identity(cfg.embed_dim);
        idm.koopman_decoder[0].weight = Matrix::identity(cfg.embed_dim);
        idm.koopman = Matrix::identity(cfg.embed_dim);
        const std::vector<Matrix> out = predict_embeddings(idm, g, 4);
        for (const Matrix& e : out) CHECK(frobenius_norm(e - g) < 1e-12);
    }
    SUBCASE("advancing p then q equals advancing p+q") {
        const Matrix h = koopman_encode(m, g);
        const Matrix ab = koopman_advance(m, koopman_advance(m, h, 2), 3);
        CHECK(ab == koopman_advance(m, h, 5));
    }
    SUBCASE("agrees with forward_chain truncated before graph decoding") {
        const std::vector<Matrix> out = predict_embeddings(m, g, 3);
        const Matrix direct = koopman_decode(m, koopman_advance(m, koopman_encode(m, g), 3));
        CHECK(frobenius_norm(out[2] - direct) < 1e-12);
    }
}

TEST_CASE("predict_sequence matches forward_chain per step") {
    GkaeConfig cfg = small_config(5);
    GkaeModel m = GkaeModel::init(cfg, 41);
    const GraphSequence seq = wave_sequence(5, 6);

    CHECK(predict_sequence(m, seq, 0).cols() == 0);

    const Matrix rollout = predict_sequence(m, seq, 4);
    for (int p = 1; p <= 4; ++p) {
        const std::vector<double> step = forward_chain(m, seq.snapshots.back(), p);
        for (int i = 0; i < 5; ++i) CHECK(rollout(i, p - 1) == doctest::Approx(step[i]));
    }
}

TEST_CASE("parameter count sits at the expected order of magnitude") {
    GkaeConfig cfg;  // paper-scale defaults
    cfg.output_dim = 20;
    const GkaeModel m = GkaeModel::init(cfg, 1);
    CHECK(m.parameter_count() > 1000);
    CHECK(m.parameter_count() < 10000);
}

TEST_CASE("checkpoint round trip is bit exact and versioned") {
    GkaeConfig cfg = small_config(5);
    GkaeModel m = GkaeModel::init(cfg, 51);
    m.norm = NormStats{3.25, 1.5, false};

    const std::string path = "gkae_test_model.json";
    save_model(m, path);
    const GkaeModel loaded = load_model(path);
    const auto pa = m.parameters();
    const auto pb = loaded.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);
    CHECK(loaded.norm.mean == m.norm.mean);
    CHECK(loaded.norm.stddev == m.norm.stddev);

    // reject a foreign format tag
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("{\"format\":\"gkae-model/999\"}", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_model(path), FormatError);
    std::remove(path.c_str());
}
