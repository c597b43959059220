#pragma once

#include <vector>

#include "gkae/graph.hpp"
#include "gkae/matrix.hpp"

namespace gkae {

// Eigendecomposition of a symmetric matrix: ascending eigenvalues and the
// matching orthonormal eigenvector columns.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;  // column l pairs with eigenvalues[l]
};

// Cyclic Jacobi rotations; iterates until the off-diagonal Frobenius norm
// drops below 1e-12 (sweep-capped). Throws NotSymmetric when the input
// deviates from symmetry by more than 1e-10.
Spectrum eigendecompose(const Matrix& symmetric);

// Graph Fourier transform U^T x and its inverse U xhat.
std::vector<double> gft(const Spectrum& spec, const std::vector<double>& x);
std::vector<double> igft(const Spectrum& spec, const std::vector<double>& xhat);

// Laplacian quadratic form x^T L x (spatial smoothness).
double smoothness_s2(const GraphSnapshot& g, const std::vector<double>& x);

// Sum over t = 1..T-1 of S2(x(t) - x(t-1)) on the Laplacian of snapshot t.
// X is N x T. Requires T >= 2.
double temporal_smoothness(const GraphSequence& seq, const Matrix& x);

}  // namespace gkae
