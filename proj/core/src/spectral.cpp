#include "gkae/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gkae/error.hpp"

namespace gkae {

namespace {

double off_diagonal_norm_sq(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return s;
}

}  // namespace

Spectrum eigendecompose(const Matrix& symmetric) {
    const int n = symmetric.rows();
    if (symmetric.cols() != n) throw DimensionMismatch("eigendecompose: matrix must be square");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::fabs(symmetric(i, j) - symmetric(j, i)) > 1e-10)
                throw NotSymmetric("eigendecompose: input is not symmetric within 1e-10");

    Matrix a = symmetric;
    Matrix v = Matrix::identity(n);
    constexpr double kTolSq = 1e-12 * 1e-12;
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm_sq(a) > kTolSq; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors = Matrix(n, n);
    for (int l = 0; l < n; ++l) {
        spec.eigenvalues[l] = a(order[l], order[l]);
        for (int i = 0; i < n; ++i) spec.eigenvectors(i, l) = v(i, order[l]);
    }
    return spec;
}

std::vector<double> gft(const Spectrum& spec, const std::vector<double>& x) {
    const int n = spec.eigenvectors.rows();
    if (static_cast<int>(x.size()) != n) throw DimensionMismatch("gft: signal length differs from N");
    std::vector<double> xhat(n, 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i) xhat[l] += spec.eigenvectors(i, l) * x[i];
    return xhat;
}

std::vector<double> igft(const Spectrum& spec, const std::vector<double>& xhat) {
    const int n = spec.eigenvectors.rows();
    if (static_cast<int>(xhat.size()) != n) throw DimensionMismatch("igft: signal length differs from N");
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) x[i] += spec.eigenvectors(i, l) * xhat[l];
    return x;
}

double smoothness_s2(const GraphSnapshot& g, const std::vector<double>& x) {
    const int n = g.node_count();
    if (static_cast<int>(x.size()) != n) throw DimensionMismatch("smoothness_s2: signal length differs from N");
    const Matrix lap = laplacian(g);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += lap(i, j) * x[j];
        s += x[i] * row;
    }
    return s;
}

double temporal_smoothness(const GraphSequence& seq, const Matrix& x) {
    const int n = seq.node_count(), t_len = seq.length();
    if (t_len < 2) throw DimensionMismatch("temporal_smoothness: needs at least two steps");
    if (x.rows() != n || x.cols() != t_len)
        throw DimensionMismatch("temporal_smoothness: X must be N x T");
    double total = 0.0;
    std::vector<double> diff(n);
    for (int t = 1; t < t_len; ++t) {
        for (int i = 0; i < n; ++i) diff[i] = x(i, t) - x(i, t - 1);
        total += smoothness_s2(seq.snapshots[t], diff);
    }
    return total;
}

}  // namespace gkae
