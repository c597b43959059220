#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "gkae/matrix.hpp"

namespace gkae::ad {

class Tape;

// Handle to a value recorded on a Tape. Copyable; the Tape owns the data.
struct Tensor {
    Tape* tape = nullptr;
    int id = -1;

    const Matrix& value() const;
    int rows() const { return value().rows(); }
    int cols() const { return value().cols(); }
    double scalar() const;  // value of a 1x1 tensor
};

// Reverse-mode recording over dense matrices. Operations append nodes in
// topological order; backward() walks them in reverse, accumulating
// gradients (sums when a tensor is consumed more than once). One tape is
// single-threaded; independent tapes may run concurrently.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Leaf that never receives a gradient.
    Tensor constant(Matrix value);
    // Leaf tracked for gradients.
    Tensor parameter(Matrix value);

    // Seeds d(loss)/d(loss) = 1 and propagates. Throws NotScalarLoss unless
    // loss is 1x1. Gradients of earlier backward calls on this tape are kept
    // and accumulated into.
    void backward(const Tensor& loss);

    const Matrix& value(int id) const { return nodes_[id].value; }
    // Gradient accumulated at a node; zeros when untouched.
    Matrix gradient(const Tensor& t) const;

    void clear() { nodes_.clear(); }
    std::size_t node_count() const { return nodes_.size(); }

private:
    friend struct Tensor;
    friend Tensor record_unary(Tape&, int op, Tensor, Matrix, double, const char*);
    friend Tensor record_binary(Tape&, int op, Tensor, Tensor, Matrix, double, const char*);
    friend Tensor record_slice(Tape&, Tensor, int row0, Matrix, const char*);
    friend Tensor record_concat(Tape&, std::span<const Tensor>, Matrix, const char*);

    struct Node {
        int op = 0;
        int a = -1;
        int b = -1;
        double aux = 0.0;        // scale factor or activation slope
        int row0 = 0;            // slice offset
        std::vector<int> parts;  // concat operands
        Matrix value;
        Matrix grad;
        bool needs_grad = false;
    };

    Matrix& grad_buffer(int id);
    void backprop_node(int id);

    std::vector<Node> nodes_;
};

// Forward operations. Each validates shapes (ShapeMismatch), records itself
// for the backward pass, and checks the result for non-finite values
// (NumericError naming the op).
Tensor matmul(Tensor a, Tensor b);
// Elementwise add; also accepts a 1 x C row vector as b against an R x C a
// (bias broadcast), with the gradient column-summed back.
Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor hadamard(Tensor a, Tensor b);
Tensor scale(Tensor a, double c);
Tensor tanh(Tensor a);
Tensor leaky_relu(Tensor a, double slope = 0.01);
// Mean over rows: R x C -> 1 x C.
Tensor mean_rows(Tensor a);
// Mean over all elements of (a - b)^2 -> 1 x 1.
Tensor mse(Tensor a, Tensor b);
Tensor sum(Tensor a);
// Cosine similarity of two equally shaped vectors -> 1 x 1. Throws
// ZeroVector when either input has zero norm.
Tensor cosine_similarity(Tensor a, Tensor b);
Tensor transpose(Tensor a);
// Copy of rows [row0, row0 + count).
Tensor slice_rows(Tensor a, int row0, int count);
// Vertical stack; operands must share a column count.
Tensor concat_rows(std::span<const Tensor> parts);
// Value copy that blocks gradient flow.
Tensor detach(Tensor a);

// Binds parameter matrices to tape leaves, one leaf per distinct matrix, so
// repeated layer applications accumulate into a single gradient. A frozen
// set binds everything as constants (inference / teacher models).
class ParamSet {
public:
    explicit ParamSet(bool trainable = true) : trainable_(trainable) {}

    Tensor bind(Tape& tape, const Matrix& param);
    // Gradient of a bound parameter after backward(); zeros when unbound.
    Matrix gradient(const Matrix& param) const;
    bool trainable() const { return trainable_; }

private:
    bool trainable_;
    std::unordered_map<const Matrix*, Tensor> bound_;
};

}  // namespace gkae::ad
