#include "gkae/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gkae/adam.hpp"
#include "gkae/autodiff.hpp"
#include "gkae/error.hpp"
#include "gkae/layers.hpp"
#include "gkae/rng.hpp"

namespace gkae {

namespace {

Matrix matrix_power(const Matrix& a, int exponent) {
    Matrix out = Matrix::identity(a.rows());
    for (int i = 0; i < exponent; ++i) out = matmul(out, a);
    return out;
}

// M_t per step; Type-1 sequences share the single static operator.
std::vector<Matrix> smoothness_operators(const GraphSequence& seq, double epsilon, int beta) {
    const int t_len = seq.length();
    std::vector<Matrix> ops(t_len);
    auto build = [&](int t) {
        Matrix m = laplacian(seq.snapshots[t]);
        if (epsilon != 0.0)
            for (int i = 0; i < m.rows(); ++i) m(i, i) += epsilon;
        if (beta != 1) m = matrix_power(m, beta);
        return m;
    };
    if (seq.kind == SequenceKind::Type1 && t_len > 1) {
        const Matrix shared = build(1);
        for (int t = 1; t < t_len; ++t) ops[t] = shared;
    } else {
        for (int t = 1; t < t_len; ++t) ops[t] = build(t);
    }
    return ops;
}

double quadratic_form(const Matrix& m, const std::vector<double>& x) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (int j = 0; j < m.cols(); ++j) row += m(i, j) * x[j];
        s += x[i] * row;
    }
    return s;
}

struct TgsProblem {
    const SamplingMask& mask;
    const Matrix& observed;
    const std::vector<Matrix>& ops;
    double gamma;
    int n, t_len;

    double objective(const Matrix& x) const {
        double smooth = 0.0;
        std::vector<double> diff(n);
        for (int t = 1; t < t_len; ++t) {
            for (int i = 0; i < n; ++i) diff[i] = x(i, t) - x(i, t - 1);
            smooth += quadratic_form(ops[t], diff);
        }
        double fit = 0.0;
        for (int t = 0; t < t_len; ++t)
            for (int i = 0; i < n; ++i)
                if (mask.is_observed(i, t)) {
                    const double r = x(i, t) - observed(i, t);
                    fit += r * r;
                }
        return smooth + gamma * fit;
    }

    // Projected gradient: zero on the fixed prefix columns.
    Matrix gradient(const Matrix& x) const {
        Matrix g(n, t_len);
        std::vector<double> diff(n);
        for (int t = 1; t < t_len; ++t) {
            for (int i = 0; i < n; ++i) diff[i] = x(i, t) - x(i, t - 1);
            const Matrix& m = ops[t];
            for (int i = 0; i < n; ++i) {
                double row = 0.0;
                for (int j = 0; j < n; ++j) row += m(i, j) * diff[j];
                g(i, t) += 2.0 * row;
                g(i, t - 1) -= 2.0 * row;
            }
        }
        for (int t = 0; t < t_len; ++t)
            for (int i = 0; i < n; ++i)
                if (mask.is_observed(i, t)) g(i, t) += 2.0 * gamma * (x(i, t) - observed(i, t));
        for (int t = 0; t < mask.tau; ++t)
            for (int i = 0; i < n; ++i) g(i, t) = 0.0;
        return g;
    }
};

TgsResult run_tgs(const GraphSequence& seq, const Matrix& observed, const SamplingMask& mask,
                  const TgsConfig& cfg, double epsilon, int beta) {
    const int n = seq.node_count(), t_len = seq.length();
    if (observed.rows() != n || observed.cols() != t_len)
        throw DimensionMismatch("tgs_reconstruct: observed matrix must be N x T");
    if (mask.node_count() != n || mask.length() != t_len)
        throw DimensionMismatch("tgs_reconstruct: mask shape differs from sequence");

    const std::vector<Matrix> ops = smoothness_operators(seq, epsilon, beta);
    TgsProblem problem{mask, observed, ops, cfg.gamma, n, t_len};

    // start from the observed data with hidden entries at zero
    Matrix x(n, t_len);
    for (int t = 0; t < t_len; ++t)
        for (int i = 0; i < n; ++i) x(i, t) = mask.is_observed(i, t) ? observed(i, t) : 0.0;

    TgsResult result;
    double fx = problem.objective(x);
    result.objective_trace.push_back(fx);
    double step = 1.0;

    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        const Matrix g = problem.gradient(x);
        result.iterations = outer + 1;
        if (max_abs(g) < cfg.grad_tol) {
            result.converged = true;
            break;
        }
        const double gnorm_sq = dot(g, g);
        double alpha = std::min(step * 2.0, 1.0e3);
        bool accepted = false;
        for (int k = 0; k < cfg.max_backtrack; ++k) {
            Matrix candidate = x - scaled(g, alpha);
            const double fc = problem.objective(candidate);
            if (fc <= fx - cfg.armijo_c * alpha * gnorm_sq) {
                x = std::move(candidate);
                fx = fc;
                step = alpha;
                accepted = true;
                break;
            }
            alpha *= cfg.shrink;
        }
        if (!accepted) break;  // line search exhausted; best iterate stands
        result.objective_trace.push_back(fx);
    }

    result.estimate = std::move(x);
    result.objective = fx;
    return result;
}

}  // namespace

TgsResult tgs_reconstruct(const GraphSequence& seq, const Matrix& observed,
                          const SamplingMask& mask, const TgsConfig& cfg) {
    return run_tgs(seq, observed, mask, cfg, 0.0, 1);
}

TgsResult tgss_reconstruct(const GraphSequence& seq, const Matrix& observed,
                           const SamplingMask& mask, const TgssConfig& cfg) {
    if (cfg.sobolev_epsilon < 0.0 || cfg.sobolev_beta < 1)
        throw Error("tgss_reconstruct: epsilon must be >= 0 and beta >= 1");
    return run_tgs(seq, observed, mask, cfg, cfg.sobolev_epsilon, cfg.sobolev_beta);
}

namespace {

double coord_distance(const std::vector<Matrix>* coords, int t, int a, int b) {
    if (coords == nullptr || coords->empty()) return 0.0;
    const Matrix& c = coords->size() == 1 ? coords->front() : (*coords)[t];
    double s = 0.0;
    for (int d = 0; d < c.cols(); ++d) {
        const double diff = c(a, d) - c(b, d);
        s += diff * diff;
    }
    return s;
}

}  // namespace

Matrix nni_reconstruct(const GraphSequence& seq, const Matrix& observed, const SamplingMask& mask,
                       const std::vector<Matrix>* coords) {
    const int n = seq.node_count(), t_len = seq.length();
    if (observed.rows() != n || observed.cols() != t_len)
        throw DimensionMismatch("nni_reconstruct: observed matrix must be N x T");
    if (mask.node_count() != n || mask.length() != t_len)
        throw DimensionMismatch("nni_reconstruct: mask shape differs from sequence");

    Matrix out = observed;
    std::vector<std::vector<int>> adjacency(n);
    std::vector<int> hop(n);

    for (int t = 0; t < t_len; ++t) {
        bool any_hidden = false;
        for (int i = 0; i < n; ++i) any_hidden = any_hidden || !mask.is_observed(i, t);
        if (!any_hidden) continue;

        const GraphSnapshot& snap = seq.snapshots[t];
        for (auto& list : adjacency) list.clear();
        for (auto [l, m] : snap.edges) {
            adjacency[l].push_back(m);
            adjacency[m].push_back(l);
        }

        for (int node = 0; node < n; ++node) {
            if (mask.is_observed(node, t)) continue;

            std::fill(hop.begin(), hop.end(), -1);
            hop[node] = 0;
            std::queue<int> frontier;
            frontier.push(node);
            int found_level = -1;
            int best = -1;
            double best_dist = 0.0;
            while (!frontier.empty()) {
                const int u = frontier.front();
                frontier.pop();
                if (found_level >= 0 && hop[u] > found_level) break;
                if (u != node && mask.is_observed(u, t)) {
                    found_level = hop[u];
                    const double d = coord_distance(coords, t, node, u);
                    if (best < 0 || d < best_dist || (d == best_dist && u < best)) {
                        best = u;
                        best_dist = d;
                    }
                    continue;
                }
                for (int v : adjacency[u])
                    if (hop[v] < 0) {
                        hop[v] = hop[u] + 1;
                        frontier.push(v);
                    }
            }

            if (best >= 0) {
                out(node, t) = observed(best, t);
                continue;
            }
            // temporal fallback: nearest observed step of the same node
            int best_t = -1;
            for (int dt = 1; dt < t_len; ++dt) {
                if (t - dt >= 0 && mask.is_observed(node, t - dt)) {
                    best_t = t - dt;
                    break;
                }
                if (t + dt < t_len && mask.is_observed(node, t + dt)) {
                    best_t = t + dt;
                    break;
                }
            }
            if (best_t < 0)
                throw Unfillable("nni_reconstruct: node " + std::to_string(node) +
                                 " has no observed graph or temporal neighbor");
            out(node, t) = observed(node, best_t);
        }
    }
    return out;
}

namespace {

// Four graph-conv layers: two encode to `hidden`, two decode back to width 1.
struct GcnStack {
    std::vector<nn::GraphConvLayer> layers;
    double slope;

    static GcnStack init(const GcnaeConfig& cfg) {
        Rng rng(cfg.seed);
        GcnStack s;
        s.slope = cfg.leaky_slope;
        s.layers.push_back(nn::GraphConvLayer::glorot(1, cfg.hidden, rng));
        s.layers.push_back(nn::GraphConvLayer::glorot(cfg.hidden, cfg.hidden, rng));
        s.layers.push_back(nn::GraphConvLayer::glorot(cfg.hidden, cfg.hidden, rng));
        s.layers.push_back(nn::GraphConvLayer::glorot(cfg.hidden, 1, rng));
        return s;
    }

    std::vector<Matrix*> parameters() {
        std::vector<Matrix*> out;
        for (auto& l : layers) {
            out.push_back(&l.w_self);
            out.push_back(&l.w_neigh);
            out.push_back(&l.bias);
        }
        return out;
    }

    ad::Tensor forward(ad::Tape& tape, ad::ParamSet& params, ad::Tensor h,
                       const GraphSnapshot& g) const {
        for (std::size_t i = 0; i < layers.size(); ++i) {
            h = layers[i].forward(tape, params, h, g);
            if (i + 1 < layers.size()) h = ad::leaky_relu(h, slope);
        }
        return h;
    }

    Matrix apply(const GraphSnapshot& g, const std::vector<double>& signals) const {
        ad::Tape tape;
        ad::ParamSet frozen(false);
        return forward(tape, frozen, tape.constant(Matrix::column_vector(signals)), g).value();
    }
};

GcnStack train_gcn_autoencoder(const GraphSequence& seq, const Matrix& inputs,
                               const Matrix& targets, const Matrix* observed_mask, int t_begin,
                               int t_end, const GcnaeConfig& cfg,
                               std::vector<double>* loss_history) {
    GcnStack stack = GcnStack::init(cfg);
    std::vector<Matrix*> params = stack.parameters();
    ad::AdamState adam(ad::AdamConfig{.learning_rate = cfg.learning_rate});

    double total_weight = 0.0;
    if (observed_mask != nullptr) {
        for (int t = t_begin; t < t_end; ++t)
            for (int i = 0; i < inputs.rows(); ++i) total_weight += (*observed_mask)(i, t);
    } else {
        total_weight = static_cast<double>(inputs.rows()) * (t_end - t_begin);
    }
    if (total_weight <= 0.0) throw Error("gcnae: no observed entries to train on");

    ad::Tape tape;
    std::vector<double> column(inputs.rows());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        tape.clear();
        ad::ParamSet bindings(true);
        ad::Tensor loss = tape.constant(Matrix(1, 1, 0.0));
        for (int t = t_begin; t < t_end; ++t) {
            for (int i = 0; i < inputs.rows(); ++i) column[i] = inputs(i, t);
            ad::Tensor prediction =
                stack.forward(tape, bindings, tape.constant(Matrix::column_vector(column)), seq.snapshots[t]);
            for (int i = 0; i < inputs.rows(); ++i) column[i] = targets(i, t);
            ad::Tensor residual = ad::sub(prediction, tape.constant(Matrix::column_vector(column)));
            if (observed_mask != nullptr) {
                for (int i = 0; i < inputs.rows(); ++i) column[i] = (*observed_mask)(i, t);
                residual = ad::hadamard(residual, tape.constant(Matrix::column_vector(column)));
            }
            loss = ad::add(loss, ad::sum(ad::hadamard(residual, residual)));
        }
        loss = ad::scale(loss, 1.0 / total_weight);
        if (loss_history != nullptr) loss_history->push_back(loss.scalar());
        tape.backward(loss);
        std::vector<Matrix> grads;
        grads.reserve(params.size());
        for (Matrix* p : params) grads.push_back(bindings.gradient(*p));
        ad::adam_step(params, grads, adam);
    }
    return stack;
}

}  // namespace

GcnaeResult gcnae_reconstruct(const GraphSequence& seq, const Matrix& observed,
                              const SamplingMask& mask, const GcnaeConfig& cfg) {
    const int n = seq.node_count(), t_len = seq.length();
    if (observed.rows() != n || observed.cols() != t_len)
        throw DimensionMismatch("gcnae_reconstruct: observed matrix must be N x T");

    GcnaeResult result;
    GcnStack stack = train_gcn_autoencoder(seq, observed, observed, &mask.observed, 0, t_len, cfg,
                                           &result.loss_history);

    result.estimate = Matrix(n, t_len);
    std::vector<double> column(n);
    for (int t = 0; t < t_len; ++t) {
        for (int i = 0; i < n; ++i) column[i] = observed(i, t);
        const Matrix decoded = stack.apply(seq.snapshots[t], column);
        for (int i = 0; i < n; ++i) result.estimate(i, t) = decoded(i, 0);
    }
    return result;
}

Matrix persistence_predict(const GraphSequence& seq, int tau, int horizon) {
    if (tau < 1 || tau > seq.length()) throw DimensionMismatch("persistence_predict: bad tau");
    const int n = seq.node_count();
    Matrix out(n, horizon);
    for (int p = 0; p < horizon; ++p)
        for (int i = 0; i < n; ++i) out(i, p) = seq.snapshots[tau - 1].signals[i];
    return out;
}

Matrix gcnae_predict(const GraphSequence& seq, int tau, int horizon, const GcnaeConfig& cfg) {
    if (tau < 1 || tau + horizon > seq.length())
        throw DimensionMismatch("gcnae_predict: horizon exceeds known graph structure");
    const int n = seq.node_count();
    const Matrix x = signals_matrix(seq);
    GcnStack stack = train_gcn_autoencoder(seq, x, x, nullptr, 0, tau, cfg, nullptr);

    Matrix out(n, horizon);
    std::vector<double> state = seq.snapshots[tau - 1].signals;
    for (int p = 0; p < horizon; ++p) {
        const Matrix next = stack.apply(seq.snapshots[tau + p], state);
        for (int i = 0; i < n; ++i) {
            state[i] = next(i, 0);
            out(i, p) = state[i];
        }
    }
    return out;
}

}  // namespace gkae
