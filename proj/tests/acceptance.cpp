// Acceptance suite: runs every release criterion end to end on the synthetic
// dataset and prints one PASS/FAIL line per clause. Exits nonzero when any
// clause fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gkae/autodiff.hpp"
#include "gkae/baselines.hpp"
#include "gkae/datasets.hpp"
#include "gkae/experiment.hpp"
#include "gkae/gkae.hpp"
#include "gkae/layers.hpp"
#include "gkae/lcrecon.hpp"
#include "gkae/metrics.hpp"
#include "gkae/spectral.hpp"
#include "support/generators.hpp"
#include "support/gradcheck.hpp"
#include "support/tgs_oracle.hpp"

using namespace gkae;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& label, bool pass, const std::string& detail = "") {
    std::printf("%-66s %s%s%s\n", label.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
    const auto start = Clock::now();
    Rng rng(20240601);
    bool quadratic_ok = true, lambda1_ok = true, volume_ok = true, sandwich_ok = true,
         roundtrip_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + rng.uniform_int(10);  // up to 12 nodes
        const GraphSnapshot g = testing::random_graph(n, rng.uniform(0.2, 0.9), rng);
        const std::vector<double> x = testing::random_signal(n, rng);

        const double quad = smoothness_s2(g, x);
        const double edge = testing::edge_sum_smoothness(g, x);
        quadratic_ok &= std::fabs(quad - edge) <= 1e-9 * std::max(1.0, std::fabs(edge));

        const Matrix lap = laplacian(g);
        const Spectrum spec = eigendecompose(lap);
        if (is_connected(g)) {
            lambda1_ok &= std::fabs(spec.eigenvalues[0]) <= 1e-9;
            lambda1_ok &= n < 2 || spec.eigenvalues[1] > 1e-9;
        } else if (n >= 2) {
            lambda1_ok &= spec.eigenvalues[1] <= 1e-9;
        }

        double volume = 0.0;
        for (int i = 0; i < n; ++i) volume += lap(i, i);
        volume_ok &= n < 2 || spec.eigenvalues[1] <= volume / (n - 1) + 1e-9;

        std::vector<double> centered = x;
        double m = 0.0;
        for (double v : centered) m += v;
        m /= n;
        double norm_sq = 0.0;
        for (double& v : centered) {
            v -= m;
            norm_sq += v * v;
        }
        const double s2c = smoothness_s2(g, centered);
        sandwich_ok &= s2c >= spec.eigenvalues[1] * norm_sq - 1e-9;
        sandwich_ok &= s2c <= spec.eigenvalues[n - 1] * norm_sq + 1e-9;

        const std::vector<double> back = igft(spec, gft(spec, x));
        for (int i = 0; i < n; ++i) roundtrip_ok &= std::fabs(back[i] - x[i]) < 1e-9;
    }
    const double elapsed = seconds_since(start);
    report("[1a] quadratic form equals edge sum (200 graphs, 1e-9 rel)", quadratic_ok);
    report("[1b] lambda_1 ~ 0 iff connected", lambda1_ok);
    report("[1c] lambda_2 <= vol(G)/(N-1)", volume_ok);
    report("[1d] zero-mean sandwich bound", sandwich_ok);
    report("[1e] GFT round trip within 1e-9", roundtrip_ok);
    report("[1f] runtime < 10 s", elapsed < 10.0, fmt("(%.1f s)", elapsed));
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
    const auto start = Clock::now();
    Rng rng(777);
    double worst = 0.0;

    // dense layers under each activation
    for (auto act : {nn::Activation::Identity, nn::Activation::Tanh, nn::Activation::LeakyRelu}) {
        for (int trial = 0; trial < 20; ++trial) {
            nn::DenseLayer layer = nn::DenseLayer::glorot(3, 4, act, rng);
            layer.bias = testing::random_matrix(1, 4, rng);
            const Matrix x = testing::random_matrix(5, 3, rng);
            const Matrix target = testing::random_matrix(5, 4, rng);
            auto build = [&](ad::Tape& t, ad::ParamSet& ps) {
                return ad::mse(layer.forward(t, ps, t.constant(x)), t.constant(target));
            };
            worst = std::max(worst,
                             testing::max_rel_grad_error(build, {&layer.weight, &layer.bias}));
        }
    }
    // graph layers
    for (int trial = 0; trial < 20; ++trial) {
        const GraphSnapshot g = testing::random_graph(6, 0.5, rng);
        const Matrix h = testing::random_matrix(6, 3, rng);
        const Matrix target = testing::random_matrix(6, 2, rng);
        nn::GraphConvLayer conv = nn::GraphConvLayer::glorot(3, 2, rng);
        conv.bias = testing::random_matrix(1, 2, rng);
        auto conv_build = [&](ad::Tape& t, ad::ParamSet& ps) {
            return ad::mse(conv.forward(t, ps, t.constant(h), g), t.constant(target));
        };
        worst = std::max(worst, testing::max_rel_grad_error(
                                    conv_build, {&conv.w_self, &conv.w_neigh, &conv.bias}));

        nn::SageLayer sage = nn::SageLayer::glorot(3, 2, rng);
        sage.bias = testing::random_matrix(1, 2, rng);
        auto sage_build = [&](ad::Tape& t, ad::ParamSet& ps) {
            return ad::mse(sage.forward(t, ps, t.constant(h), g), t.constant(target));
        };
        worst = std::max(worst, testing::max_rel_grad_error(
                                    sage_build, {&sage.w_self, &sage.w_neigh, &sage.bias}));
    }
    // the full model loss (touches every op the build uses); the linearity
    // targets are frozen by design, so the differentiable objective for the
    // comparison fixes them to their unperturbed values explicitly
    for (int trial = 0; trial < 20; ++trial) {
        GraphSequence seq;
        seq.kind = SequenceKind::Type3;
        for (int t = 0; t < 5; ++t) {
            GraphSnapshot s = testing::random_graph(4, 0.6, rng);
            s.signals = testing::random_signal(4, rng);
            seq.snapshots.push_back(std::move(s));
        }
        GkaeConfig cfg;
        cfg.output_dim = 4;
        cfg.embed_dim = 3;
        cfg.koopman_dim = 2;
        cfg.kae_hidden = 4;
        cfg.kae_depth = 2;
        cfg.graph_decoder_hidden = 4;
        GkaeModel model = GkaeModel::init(cfg, rng.next());

        Matrix fixed_targets(seq.length(), cfg.embed_dim);
        for (int t = 0; t < seq.length(); ++t) {
            const Matrix g = encode_graph(model, seq.snapshots[t]);
            for (int j = 0; j < cfg.embed_dim; ++j) fixed_targets(t, j) = g(0, j);
        }
        const Matrix truth = transposed(signals_matrix(seq));

        auto build = [&](ad::Tape& t, ad::ParamSet& ps) {
            std::vector<ad::Tensor> embeddings;
            for (int tt = 0; tt < seq.length(); ++tt)
                embeddings.push_back(encode_graph(t, ps, model, seq.snapshots[tt]));
            ad::Tensor stacked = ad::concat_rows(embeddings);
            ad::Tensor loss = ad::scale(
                ad::mse(graph_decode(t, ps, model, stacked), t.constant(truth)),
                static_cast<double>(seq.length()));
            ad::Tensor targets = t.constant(fixed_targets);
            ad::Tensor koopman_t = ad::transpose(ps.bind(t, model.koopman));
            ad::Tensor latents = koopman_encode(t, ps, model, stacked);
            for (int l = 0; l < 3; ++l) {
                const int valid = seq.length() - l;
                ad::Tensor predicted =
                    koopman_decode(t, ps, model, ad::slice_rows(latents, 0, valid));
                loss = ad::add(loss, ad::scale(ad::mse(predicted, ad::slice_rows(targets, l, valid)),
                                               static_cast<double>(valid)));
                if (l + 1 < 3) latents = ad::matmul(latents, koopman_t);
            }
            return loss;
        };
        std::vector<Matrix*> params = model.parameters();
        worst = std::max(worst, testing::max_rel_grad_error(build, params));
    }
    // the LC loss (cosine path included)
    for (int trial = 0; trial < 20; ++trial) {
        GraphSequence seq;
        seq.kind = SequenceKind::Type3;
        for (int t = 0; t < 4; ++t) {
            GraphSnapshot s = testing::random_graph(4, 0.7, rng);
            s.signals = testing::random_signal(4, rng);
            seq.snapshots.push_back(std::move(s));
        }
        LcConfig cfg;
        cfg.embed_dim = 3;
        cfg.decoder_hidden = 4;
        cfg.output_dim = 4;
        LcModel model = LcModel::init(cfg, rng.next());
        LcTargets targets;
        targets.tau = 2;
        targets.embeddings = testing::random_matrix(4, 3, rng);
        targets.decoded_tail = testing::random_matrix(2, 4, rng);
        auto build = [&](ad::Tape& t, ad::ParamSet& ps) {
            return build_lc_loss(t, ps, model, seq, targets);
        };
        std::vector<Matrix*> params = model.parameters();
        worst = std::max(worst, testing::max_rel_grad_error(build, params));
    }
    const double elapsed = seconds_since(start);
    report("[2a] analytic gradients match central differences (< 1e-4)", worst < 1e-4,
           fmt("(worst %.2e)", worst));
    report("[2b] runtime < 30 s", elapsed < 30.0, fmt("(%.1f s)", elapsed));
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
    const auto start = Clock::now();
    Rng rng(424242);
    bool exact = true;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + rng.uniform_int(4);
        const int t_len = 4 + rng.uniform_int(5);
        const int tau = 2 + rng.uniform_int(2);

        GraphSequence seq;
        seq.kind = SequenceKind::Type1;
        GraphSnapshot base = testing::random_graph(n, 0.7, rng);
        if (!is_connected(base)) {
            base.weights = Matrix(n, n);
            base.edges.clear();
            for (int i = 0; i + 1 < n; ++i) {
                base.weights(i, i + 1) = 1.0;
                base.weights(i + 1, i) = 1.0;
                base.edges.emplace_back(i, i + 1);
            }
        }
        for (int t = 0; t < t_len; ++t) {
            GraphSnapshot s = base;
            for (int i = 0; i < n; ++i) s.signals[i] = std::sin(0.4 * t + 0.9 * i) + 0.05 * i * t;
            seq.snapshots.push_back(std::move(s));
        }
        const SamplingMask mask = make_mask(n, t_len, tau, 0.4, 9000 + trial);
        const Matrix x = signals_matrix(seq);
        Matrix observed(n, t_len);
        for (int t = 0; t < t_len; ++t)
            for (int i = 0; i < n; ++i) observed(i, t) = mask.is_observed(i, t) ? x(i, t) : 0.0;

        TgsConfig cfg;  // precision budget for the exactness comparison
        cfg.grad_tol = 1e-10;
        cfg.max_outer = 5000;
        const TgsResult result = tgs_reconstruct(seq, observed, mask, cfg);
        const double expected = testing::tgs_oracle_objective(seq, observed, mask, cfg.gamma);
        const double rel = std::fabs(result.objective - expected) / std::max(1.0, std::fabs(expected));
        worst = std::max(worst, rel);
        exact &= rel <= 1e-6;
    }
    const double elapsed = seconds_since(start);
    report("[3a] TGS objective matches the normal-equation minimizer (1e-6)", exact,
           fmt("(worst %.2e)", worst));
    report("[3b] runtime < 30 s", elapsed < 30.0, fmt("(%.1f s)", elapsed));
}

// -------------------------------------------------------- criteria 4 through 9

struct SeedRun {
    DatasetBundle bundle;
    GraphSequence prefix;
    GkaeTraining training;
    Matrix truth_norm;  // N x T normalized signals
};

SeedRun run_seed(std::uint64_t seed) {
    SeedRun run;
    UavConfig ucfg;
    ucfg.seed = seed;
    run.bundle = simulate_uav(ucfg);
    split_and_normalize(run.bundle, 300);
    run.prefix.kind = run.bundle.sequence.kind;
    run.prefix.dt = run.bundle.sequence.dt;
    run.prefix.snapshots.assign(run.bundle.sequence.snapshots.begin(),
                                run.bundle.sequence.snapshots.begin() + run.bundle.tau);
    GkaeConfig cfg;
    cfg.output_dim = run.bundle.sequence.node_count();
    TrainConfig tcfg;
    tcfg.seed = seed;
    run.training = train_gkae(run.prefix, cfg, tcfg);
    run.truth_norm = signals_matrix(run.bundle.sequence);
    return run;
}

Matrix window(const Matrix& all, int from, int count) {
    Matrix out(all.rows(), count);
    for (int p = 0; p < count; ++p)
        for (int i = 0; i < all.rows(); ++i) out(i, p) = all(i, from + p);
    return out;
}

void criteria_4_5_9(std::vector<SeedRun>& runs) {
    const auto start = Clock::now();
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    for (std::uint64_t seed : seeds) runs.push_back(run_seed(seed));

    std::vector<double> rmse_gkae, mae_gkae, rmse_persist, rmse_gcn;
    bool variance_ok = true;
    const int horizon = 20;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        SeedRun& run = runs[k];
        const Matrix truth = window(run.truth_norm, run.bundle.tau, horizon);
        const Matrix pred = predict_sequence(run.training.model, run.prefix, horizon);
        rmse_gkae.push_back(rmse_pred(truth, pred));
        mae_gkae.push_back(mae_pred(truth, pred));
        rmse_persist.push_back(
            rmse_pred(truth, persistence_predict(run.bundle.sequence, run.bundle.tau, horizon)));
        GcnaeConfig gcfg;
        gcfg.seed = Rng::derive(seeds[k], 2);
        rmse_gcn.push_back(
            rmse_pred(truth, gcnae_predict(run.bundle.sequence, run.bundle.tau, horizon, gcfg)));

        // criterion 9: embedding variance over the training window
        double m = 0.0, var = 0.0;
        std::vector<Matrix> gs;
        for (const auto& snap : run.prefix.snapshots)
            gs.push_back(encode_graph(run.training.model, snap));
        for (const Matrix& g : gs)
            for (int j = 0; j < g.cols(); ++j) m += g(0, j);
        m /= static_cast<double>(gs.size()) * gs.front().cols();
        for (const Matrix& g : gs)
            for (int j = 0; j < g.cols(); ++j) {
                const double d = g(0, j) - m;
                var += d * d;
            }
        var /= static_cast<double>(gs.size()) * gs.front().cols();
        variance_ok &= var > 1e-6;
    }
    const double elapsed4 = seconds_since(start);
    report("[4a] mean 20-step RMSE <= 0.35 (normalized)", mean(rmse_gkae) <= 0.35,
           fmt("(rmse %.3f)", mean(rmse_gkae)));
    report("[4b] mean 20-step MAE <= 0.20 (normalized)", mean(mae_gkae) <= 0.20,
           fmt("(mae %.3f)", mean(mae_gkae)));
    report("[4c] GKAE mean RMSE < persistence baseline",
           mean(rmse_gkae) < mean(rmse_persist),
           fmt("(%.3f vs %.3f)", mean(rmse_gkae), mean(rmse_persist)));
    report("[4d] GKAE mean RMSE < GCN-autoencoder rollout", mean(rmse_gkae) < mean(rmse_gcn),
           fmt("(%.3f vs %.3g)", mean(rmse_gkae), mean(rmse_gcn)));
    report("[4e] runtime < 10 min", elapsed4 < 600.0, fmt("(%.0f s)", elapsed4));
    report("[9]  embedding variance > 1e-6 on every seed", variance_ok);

    // criterion 5: Koopman dimension sweep, 3 seeds, M = 8 reused from above
    const auto start5 = Clock::now();
    std::vector<double> loss_m8, loss_m32;
    for (int k = 0; k < 3; ++k) {
        loss_m8.push_back(runs[k].training.loss_history.back());
        GkaeConfig cfg;
        cfg.output_dim = runs[k].bundle.sequence.node_count();
        cfg.koopman_dim = 32;
        TrainConfig tcfg;
        tcfg.seed = seeds[k];
        loss_m32.push_back(train_gkae(runs[k].prefix, cfg, tcfg).loss_history.back());
    }
    const double elapsed5 = seconds_since(start5);
    report("[5a] final loss at M=8 <= final loss at M=32 (3-seed mean)",
           mean(loss_m8) <= mean(loss_m32), fmt("(%.1f vs %.1f)", mean(loss_m8), mean(loss_m32)));
    report("[5b] runtime < 15 min", elapsed5 < 900.0, fmt("(%.0f s)", elapsed5));
}

void criteria_6_7(std::vector<SeedRun>& runs) {
    const auto start = Clock::now();
    const std::vector<double> rates{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> lc_mean, nni_mean, gcn_mean;

    for (double rate : rates) {
        std::vector<double> lc, nni, gcn;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            SeedRun& run = runs[k];
            const std::uint64_t seed = k + 1;
            const int n = run.bundle.sequence.node_count();
            const int t_len = run.bundle.sequence.length();
            const SamplingMask mask =
                make_mask(n, t_len, run.bundle.tau, rate, Rng::derive(seed, 1));

            LcConfig lcfg;
            lcfg.output_dim = n;
            LcTrainConfig ltc;
            ltc.seed = Rng::derive(seed, 3);
            const LcTraining lct = train_lc(run.training.model, run.bundle.sequence, mask, lcfg, ltc);
            const Matrix est_lc = reconstruct(lct.model, apply_mask(run.bundle.sequence, mask));
            lc.push_back(epsilon_recon(run.truth_norm, est_lc, mask));

            Matrix observed(n, t_len);
            for (int t = 0; t < t_len; ++t)
                for (int i = 0; i < n; ++i)
                    observed(i, t) = mask.is_observed(i, t) ? run.truth_norm(i, t) : 0.0;
            nni.push_back(epsilon_recon(
                run.truth_norm,
                nni_reconstruct(run.bundle.sequence, observed, mask, &run.bundle.coords), mask));
            GcnaeConfig gcfg;
            gcfg.seed = Rng::derive(seed, 2);
            gcn.push_back(epsilon_recon(
                run.truth_norm, gcnae_reconstruct(run.bundle.sequence, observed, mask, gcfg).estimate,
                mask));
        }
        lc_mean.push_back(mean(lc));
        nni_mean.push_back(mean(nni));
        gcn_mean.push_back(mean(gcn));
    }

    bool beats_nni = true, beats_gcn = true;
    for (std::size_t r = 0; r < rates.size(); ++r) {
        beats_nni &= lc_mean[r] <= nni_mean[r];
        beats_gcn &= lc_mean[r] <= gcn_mean[r];
    }
    std::string table = "(lc";
    for (double v : lc_mean) table += fmt(" %.2f", v);
    table += " | nni";
    for (double v : nni_mean) table += fmt(" %.2f", v);
    table += ")";

    report("[6a] mean eps_recon at 10% <= at 50% masking", lc_mean.front() <= lc_mean.back(),
           fmt("(%.3f vs %.3f)", lc_mean.front(), lc_mean.back()));
    report("[6b] GKAE+LC <= NNI at every masking rate (5-seed means)", beats_nni, table);
    report("[6c] GKAE+LC <= GCN-autoencoder at every masking rate", beats_gcn);
    report("[6d] eps_recon at 50% <= 0.2 (normalized)", lc_mean.back() <= 0.2,
           fmt("(%.3f)", lc_mean.back()));

    // criterion 7: two nodes fully hidden over the whole test window on top
    // of 30% background masking; MSEs aggregate as means over the seeds
    bool finite_ok = true;
    std::vector<double> fully, partially;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        SeedRun& run = runs[k];
        const std::uint64_t seed = k + 1;
        const int n = run.bundle.sequence.node_count();
        const int t_len = run.bundle.sequence.length();
        SamplingMask mask = make_mask(n, t_len, run.bundle.tau, 0.3, Rng::derive(seed, 4));
        const int hidden_a = 0, hidden_b = 1;
        for (int t = run.bundle.tau; t < t_len; ++t) {
            mask.observed(hidden_a, t) = 0.0;
            mask.observed(hidden_b, t) = 0.0;
        }

        LcConfig lcfg;
        lcfg.output_dim = n;
        LcTrainConfig ltc;
        ltc.seed = Rng::derive(seed, 5);
        const LcTraining lct = train_lc(run.training.model, run.bundle.sequence, mask, lcfg, ltc);
        const Matrix est = reconstruct(lct.model, apply_mask(run.bundle.sequence, mask));

        double fully_mse = 0.0;
        int fully_count = 0;
        double partial_mse = 0.0;
        int partial_count = 0;
        for (int t = run.bundle.tau; t < t_len; ++t)
            for (int i = 0; i < n; ++i) {
                if (mask.is_observed(i, t)) continue;
                const double e = run.truth_norm(i, t) - est(i, t);
                if (i == hidden_a || i == hidden_b) {
                    fully_mse += e * e;
                    ++fully_count;
                } else {
                    partial_mse += e * e;
                    ++partial_count;
                }
            }
        fully_mse /= fully_count;
        partial_mse /= partial_count;
        finite_ok &= std::isfinite(fully_mse);
        fully.push_back(fully_mse);
        partially.push_back(partial_mse);
    }
    const double ratio = mean(fully) / mean(partially);
    const double elapsed = seconds_since(start);
    report("[7a] fully-masked-node reconstruction MSE is finite", finite_ok);
    report("[7b] fully-masked MSE <= 3x partially-masked MSE (seed means)", ratio <= 3.0,
           fmt("(ratio %.2f)", ratio));
    report("[6e] runtime < 20 min (criteria 6 and 7)", elapsed < 1200.0, fmt("(%.0f s)", elapsed));
}

// ---------------------------------------------------------------- criterion 8

void criterion_8(const std::vector<SeedRun>& runs) {
    const auto start = Clock::now();

    // frozen teacher: LC training leaves every GKAE parameter bit-identical
    const SeedRun& run = runs.front();
    std::vector<Matrix> before;
    for (const Matrix* p : run.training.model.parameters()) before.push_back(*p);
    const SamplingMask mask = make_mask(run.bundle.sequence.node_count(),
                                        run.bundle.sequence.length(), run.bundle.tau, 0.5, 99);
    LcConfig lcfg;
    lcfg.output_dim = run.bundle.sequence.node_count();
    LcTrainConfig ltc;
    ltc.epochs = 40;
    ltc.seed = 5;
    (void)train_lc(run.training.model, run.bundle.sequence, mask, lcfg, ltc);
    bool frozen = true;
    const auto after = run.training.model.parameters();
    for (std::size_t i = 0; i < after.size(); ++i) frozen &= *after[i] == before[i];
    report("[8a] LC training leaves the teacher bit-identical", frozen);

    // report determinism through the full experiment pipeline
    ExperimentConfig cfg;
    cfg.task = Task::Eval;
    cfg.dataset.tau = 30;
    cfg.dataset.uav.nodes = 8;
    cfg.dataset.uav.steps = 50;
    cfg.model.embed_dim = 4;
    cfg.model.koopman_dim = 3;
    cfg.model.kae_hidden = 6;
    cfg.model.kae_depth = 2;
    cfg.model.graph_decoder_hidden = 8;
    cfg.train.epochs = 20;
    cfg.train.linearity_length = 6;
    cfg.lc.epochs = 12;
    cfg.baseline.methods = {"tgs", "nni"};
    cfg.horizon = 8;
    cfg.seeds = {11};
    cfg.out_dir = "acceptance_determinism";
    const MetricsReport a = run_experiment(cfg);
    std::stringstream artifacts_a;
    for (const char* file : {"loss.csv", "sweep.csv", "mse_time.csv"}) {
        std::ifstream in(std::filesystem::path(cfg.out_dir) / file);
        artifacts_a << in.rdbuf();
    }
    const MetricsReport b = run_experiment(cfg);
    std::stringstream artifacts_b;
    for (const char* file : {"loss.csv", "sweep.csv", "mse_time.csv"}) {
        std::ifstream in(std::filesystem::path(cfg.out_dir) / file);
        artifacts_b << in.rdbuf();
    }
    report("[8b] identical (config, seed) reproduces the report bit-identically",
           a.canonical_json() == b.canonical_json() && artifacts_a.str() == artifacts_b.str());
    std::filesystem::remove_all(cfg.out_dir);

    const double elapsed = seconds_since(start);
    report("[8c] runtime < 5 min", elapsed < 300.0, fmt("(%.0f s)", elapsed));
}

}  // namespace

int main() {
    const auto start = Clock::now();
    std::printf("acceptance suite\n----------------\n");
    criterion_1();
    criterion_2();
    criterion_3();
    std::vector<SeedRun> runs;
    criteria_4_5_9(runs);
    criteria_6_7(runs);
    criterion_8(runs);
    std::printf("----------------\n%d clause(s) failed, total %.0f s\n", g_failures,
                seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
