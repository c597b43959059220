#include "gkae/metrics.hpp"

#include <cmath>

#include "gkae/error.hpp"

namespace gkae {

double rmse_pred(const Matrix& truth, const Matrix& predicted) {
    if (!truth.same_shape(predicted)) throw DimensionMismatch("rmse_pred: shapes differ");
    if (truth.cols() == 0) throw DimensionMismatch("rmse_pred: no prediction steps");
    double total = 0.0;
    for (int p = 0; p < truth.cols(); ++p)
        for (int i = 0; i < truth.rows(); ++i) {
            const double e = truth(i, p) - predicted(i, p);
            total += e * e;
        }
    return std::sqrt(total / truth.cols());
}

double mae_pred(const Matrix& truth, const Matrix& predicted) {
    if (!truth.same_shape(predicted)) throw DimensionMismatch("mae_pred: shapes differ");
    if (truth.cols() == 0) throw DimensionMismatch("mae_pred: no prediction steps");
    double total = 0.0;
    for (int p = 0; p < truth.cols(); ++p)
        for (int i = 0; i < truth.rows(); ++i) total += std::fabs(truth(i, p) - predicted(i, p));
    return total / truth.cols();
}

double epsilon_recon(const Matrix& truth, const Matrix& estimate, const SamplingMask& mask,
                     ReconScope scope) {
    if (!truth.same_shape(estimate) || truth.rows() != mask.node_count() ||
        truth.cols() != mask.length())
        throw DimensionMismatch("epsilon_recon: shapes differ");
    const int t_len = mask.length(), tau = mask.tau;
    const int window = t_len - tau - 1;
    if (window <= 0) throw EmptyScope("epsilon_recon: empty test window");

    double total = 0.0;
    long long counted = 0;
    for (int t = tau; t < t_len; ++t)
        for (int i = 0; i < truth.rows(); ++i) {
            const bool hidden = !mask.is_observed(i, t);
            if ((scope == ReconScope::Masked) != hidden) continue;
            const double e = truth(i, t) - estimate(i, t);
            total += e * e;
            ++counted;
        }
    if (counted == 0) throw EmptyScope("epsilon_recon: scope selects no entries");
    return total / window;
}

}  // namespace gkae
