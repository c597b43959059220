#include "gkae/autodiff.hpp"

#include <cmath>
#include <string>

#include "gkae/error.hpp"

namespace gkae::ad {

namespace {

enum OpCode {
    kLeaf = 0,
    kMatmul,
    kAdd,
    kAddRowBroadcast,
    kSub,
    kHadamard,
    kScale,
    kTanh,
    kLeakyRelu,
    kMeanRows,
    kMse,
    kSum,
    kCosine,
    kTranspose,
    kSliceRows,
    kConcatRows,
};

void check_same_tape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.tape == nullptr || b.tape == nullptr || a.tape != b.tape)
        throw Error(std::string(op) + ": operands recorded on different tapes");
}

void check_finite(const Matrix& m, const char* op) {
    if (!m.all_finite()) throw NumericError(std::string(op) + ": produced a non-finite value");
}

}  // namespace

const Matrix& Tensor::value() const { return tape->value(id); }

double Tensor::scalar() const {
    const Matrix& v = value();
    if (v.rows() != 1 || v.cols() != 1) throw DimensionMismatch("Tensor::scalar: not 1x1");
    return v(0, 0);
}

Tensor Tape::constant(Matrix value) {
    check_finite(value, "constant");
    Node n;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Tensor{this, static_cast<int>(nodes_.size()) - 1};
}

Tensor Tape::parameter(Matrix value) {
    Tensor t = constant(std::move(value));
    nodes_[t.id].needs_grad = true;
    return t;
}

Matrix& Tape::grad_buffer(int id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
    return n.grad;
}

Matrix Tape::gradient(const Tensor& t) const {
    const Node& n = nodes_[t.id];
    if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
    return n.grad;
}

Tensor record_unary(Tape& tape, int op, Tensor a, Matrix value, double aux, const char* name) {
    check_finite(value, name);
    Tape::Node n;
    n.op = op;
    n.a = a.id;
    n.aux = aux;
    n.value = std::move(value);
    n.needs_grad = tape.nodes_[a.id].needs_grad;
    tape.nodes_.push_back(std::move(n));
    return Tensor{&tape, static_cast<int>(tape.nodes_.size()) - 1};
}

Tensor record_binary(Tape& tape, int op, Tensor a, Tensor b, Matrix value, double aux,
                     const char* name) {
    check_finite(value, name);
    Tape::Node n;
    n.op = op;
    n.a = a.id;
    n.b = b.id;
    n.aux = aux;
    n.value = std::move(value);
    n.needs_grad = tape.nodes_[a.id].needs_grad || tape.nodes_[b.id].needs_grad;
    tape.nodes_.push_back(std::move(n));
    return Tensor{&tape, static_cast<int>(tape.nodes_.size()) - 1};
}

Tensor record_slice(Tape& tape, Tensor a, int row0, Matrix value, const char* name) {
    check_finite(value, name);
    Tape::Node n;
    n.op = kSliceRows;
    n.a = a.id;
    n.row0 = row0;
    n.value = std::move(value);
    n.needs_grad = tape.nodes_[a.id].needs_grad;
    tape.nodes_.push_back(std::move(n));
    return Tensor{&tape, static_cast<int>(tape.nodes_.size()) - 1};
}

Tensor record_concat(Tape& tape, std::span<const Tensor> parts, Matrix value, const char* name) {
    check_finite(value, name);
    Tape::Node n;
    n.op = kConcatRows;
    n.value = std::move(value);
    for (const Tensor& p : parts) {
        n.parts.push_back(p.id);
        n.needs_grad = n.needs_grad || tape.nodes_[p.id].needs_grad;
    }
    tape.nodes_.push_back(std::move(n));
    return Tensor{&tape, static_cast<int>(tape.nodes_.size()) - 1};
}

Tensor matmul(Tensor a, Tensor b) {
    check_same_tape(a, b, "matmul");
    if (a.cols() != b.rows()) throw ShapeMismatch("matmul: inner dimensions differ");
    return record_binary(*a.tape, kMatmul, a, b, gkae::matmul(a.value(), b.value()), 0.0, "matmul");
}

Tensor add(Tensor a, Tensor b) {
    check_same_tape(a, b, "add");
    const Matrix& va = a.value();
    const Matrix& vb = b.value();
    if (va.same_shape(vb)) return record_binary(*a.tape, kAdd, a, b, va + vb, 0.0, "add");
    if (vb.rows() == 1 && vb.cols() == va.cols() && va.rows() > 1) {
        Matrix out = va;
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j) out(i, j) += vb(0, j);
        return record_binary(*a.tape, kAddRowBroadcast, a, b, std::move(out), 0.0, "add");
    }
    throw ShapeMismatch("add: shapes incompatible");
}

Tensor sub(Tensor a, Tensor b) {
    check_same_tape(a, b, "sub");
    if (!a.value().same_shape(b.value())) throw ShapeMismatch("sub: shapes differ");
    return record_binary(*a.tape, kSub, a, b, a.value() - b.value(), 0.0, "sub");
}

Tensor hadamard(Tensor a, Tensor b) {
    check_same_tape(a, b, "hadamard");
    if (!a.value().same_shape(b.value())) throw ShapeMismatch("hadamard: shapes differ");
    return record_binary(*a.tape, kHadamard, a, b, gkae::hadamard(a.value(), b.value()), 0.0,
                         "hadamard");
}

Tensor scale(Tensor a, double c) {
    return record_unary(*a.tape, kScale, a, scaled(a.value(), c), c, "scale");
}

Tensor tanh(Tensor a) {
    Matrix out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::tanh(out.data()[i]);
    return record_unary(*a.tape, kTanh, a, std::move(out), 0.0, "tanh");
}

Tensor leaky_relu(Tensor a, double slope) {
    Matrix out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out.data()[i] < 0.0) out.data()[i] *= slope;
    return record_unary(*a.tape, kLeakyRelu, a, std::move(out), slope, "leaky_relu");
}

Tensor mean_rows(Tensor a) {
    const Matrix& v = a.value();
    if (v.rows() < 1) throw ShapeMismatch("mean_rows: empty input");
    Matrix out(1, v.cols());
    for (int i = 0; i < v.rows(); ++i)
        for (int j = 0; j < v.cols(); ++j) out(0, j) += v(i, j);
    for (int j = 0; j < v.cols(); ++j) out(0, j) /= v.rows();
    return record_unary(*a.tape, kMeanRows, a, std::move(out), 0.0, "mean_rows");
}

Tensor mse(Tensor a, Tensor b) {
    check_same_tape(a, b, "mse");
    if (!a.value().same_shape(b.value())) throw ShapeMismatch("mse: shapes differ");
    const Matrix diff = a.value() - b.value();
    Matrix out(1, 1);
    out(0, 0) = dot(diff, diff) / static_cast<double>(diff.size());
    return record_binary(*a.tape, kMse, a, b, std::move(out), 0.0, "mse");
}

Tensor sum(Tensor a) {
    Matrix out(1, 1);
    for (std::size_t i = 0; i < a.value().size(); ++i) out(0, 0) += a.value().data()[i];
    return record_unary(*a.tape, kSum, a, std::move(out), 0.0, "sum");
}

Tensor cosine_similarity(Tensor a, Tensor b) {
    check_same_tape(a, b, "cosine_similarity");
    const Matrix& va = a.value();
    const Matrix& vb = b.value();
    if (!va.same_shape(vb) || (va.rows() != 1 && va.cols() != 1))
        throw ShapeMismatch("cosine_similarity: inputs must be equally shaped vectors");
    const double na = frobenius_norm(va), nb = frobenius_norm(vb);
    if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine_similarity: zero-norm input");
    Matrix out(1, 1);
    out(0, 0) = dot(va, vb) / (na * nb);
    return record_binary(*a.tape, kCosine, a, b, std::move(out), 0.0, "cosine_similarity");
}

Tensor transpose(Tensor a) {
    return record_unary(*a.tape, kTranspose, a, transposed(a.value()), 0.0, "transpose");
}

Tensor slice_rows(Tensor a, int row0, int count) {
    const Matrix& v = a.value();
    if (row0 < 0 || count < 0 || row0 + count > v.rows())
        throw ShapeMismatch("slice_rows: range out of bounds");
    Matrix out(count, v.cols());
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < v.cols(); ++j) out(i, j) = v(row0 + i, j);
    return record_slice(*a.tape, a, row0, std::move(out), "slice_rows");
}

Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeMismatch("concat_rows: no operands");
    Tape* tape = parts.front().tape;
    const int cols = parts.front().cols();
    int rows = 0;
    for (const Tensor& p : parts) {
        if (p.tape != tape) throw Error("concat_rows: operands recorded on different tapes");
        if (p.cols() != cols) throw ShapeMismatch("concat_rows: column counts differ");
        rows += p.rows();
    }
    Matrix out(rows, cols);
    int r = 0;
    for (const Tensor& p : parts) {
        const Matrix& v = p.value();
        for (int i = 0; i < v.rows(); ++i, ++r)
            for (int j = 0; j < cols; ++j) out(r, j) = v(i, j);
    }
    return record_concat(*tape, parts, std::move(out), "concat_rows");
}

Tensor detach(Tensor a) { return a.tape->constant(a.value()); }

void Tape::backward(const Tensor& loss) {
    const Node& top = nodes_[loss.id];
    if (top.value.rows() != 1 || top.value.cols() != 1)
        throw NotScalarLoss("backward: loss must be a 1x1 tensor");
    grad_buffer(loss.id)(0, 0) += 1.0;
    for (int id = loss.id; id >= 0; --id) {
        if (nodes_[id].needs_grad && !nodes_[id].grad.empty()) backprop_node(id);
    }
}

void Tape::backprop_node(int id) {
    Node& n = nodes_[id];
    const Matrix& g = n.grad;
    auto add_into = [&](int target, const Matrix& delta) {
        if (target < 0 || !nodes_[target].needs_grad) return;
        Matrix& buf = grad_buffer(target);
        for (std::size_t i = 0; i < buf.size(); ++i) buf.data()[i] += delta.data()[i];
    };

    switch (n.op) {
        case kLeaf:
            break;
        case kMatmul: {
            add_into(n.a, gkae::matmul(g, transposed(nodes_[n.b].value)));
            add_into(n.b, gkae::matmul(transposed(nodes_[n.a].value), g));
            break;
        }
        case kAdd:
            add_into(n.a, g);
            add_into(n.b, g);
            break;
        case kAddRowBroadcast: {
            add_into(n.a, g);
            if (n.b >= 0 && nodes_[n.b].needs_grad) {
                Matrix colsum(1, g.cols());
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < g.cols(); ++j) colsum(0, j) += g(i, j);
                add_into(n.b, colsum);
            }
            break;
        }
        case kSub:
            add_into(n.a, g);
            add_into(n.b, scaled(g, -1.0));
            break;
        case kHadamard:
            add_into(n.a, gkae::hadamard(g, nodes_[n.b].value));
            add_into(n.b, gkae::hadamard(g, nodes_[n.a].value));
            break;
        case kScale:
            add_into(n.a, scaled(g, n.aux));
            break;
        case kTanh: {
            Matrix d = g;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const double y = n.value.data()[i];
                d.data()[i] *= 1.0 - y * y;
            }
            add_into(n.a, d);
            break;
        }
        case kLeakyRelu: {
            Matrix d = g;
            const Matrix& x = nodes_[n.a].value;
            for (std::size_t i = 0; i < d.size(); ++i)
                if (x.data()[i] < 0.0) d.data()[i] *= n.aux;
            add_into(n.a, d);
            break;
        }
        case kMeanRows: {
            const Matrix& x = nodes_[n.a].value;
            Matrix d(x.rows(), x.cols());
            const double inv = 1.0 / x.rows();
            for (int i = 0; i < x.rows(); ++i)
                for (int j = 0; j < x.cols(); ++j) d(i, j) = g(0, j) * inv;
            add_into(n.a, d);
            break;
        }
        case kMse: {
            const Matrix& a = nodes_[n.a].value;
            const Matrix& b = nodes_[n.b].value;
            const double w = 2.0 * g(0, 0) / static_cast<double>(a.size());
            Matrix d = scaled(a - b, w);
            add_into(n.a, d);
            add_into(n.b, scaled(d, -1.0));
            break;
        }
        case kSum: {
            const Matrix& x = nodes_[n.a].value;
            add_into(n.a, Matrix(x.rows(), x.cols(), g(0, 0)));
            break;
        }
        case kCosine: {
            const Matrix& a = nodes_[n.a].value;
            const Matrix& b = nodes_[n.b].value;
            const double na = frobenius_norm(a), nb = frobenius_norm(b);
            const double c = n.value(0, 0), gs = g(0, 0);
            // d cos / d a = b / (|a||b|) - cos * a / |a|^2, symmetric in b
            add_into(n.a, scaled(scaled(b, 1.0 / (na * nb)) - scaled(a, c / (na * na)), gs));
            add_into(n.b, scaled(scaled(a, 1.0 / (na * nb)) - scaled(b, c / (nb * nb)), gs));
            break;
        }
        case kTranspose:
            add_into(n.a, transposed(g));
            break;
        case kSliceRows: {
            if (n.a >= 0 && nodes_[n.a].needs_grad) {
                Matrix& buf = grad_buffer(n.a);
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < g.cols(); ++j) buf(n.row0 + i, j) += g(i, j);
            }
            break;
        }
        case kConcatRows: {
            int r = 0;
            for (int part : n.parts) {
                const int pr = nodes_[part].value.rows();
                if (nodes_[part].needs_grad) {
                    Matrix& buf = grad_buffer(part);
                    for (int i = 0; i < pr; ++i)
                        for (int j = 0; j < g.cols(); ++j) buf(i, j) += g(r + i, j);
                }
                r += pr;
            }
            break;
        }
        default:
            throw Error("backward: unknown op");
    }
}

Tensor ParamSet::bind(Tape& tape, const Matrix& param) {
    auto it = bound_.find(&param);
    if (it != bound_.end()) return it->second;
    Tensor t = trainable_ ? tape.parameter(param) : tape.constant(param);
    bound_.emplace(&param, t);
    return t;
}

Matrix ParamSet::gradient(const Matrix& param) const {
    auto it = bound_.find(&param);
    if (it == bound_.end()) return Matrix(param.rows(), param.cols());
    return it->second.tape->gradient(it->second);
}

}  // namespace gkae::ad
