#pragma once

#include "gkae/lcrecon.hpp"
#include "gkae/matrix.hpp"

namespace gkae {

// Prediction errors over P steps (column per step); norms are per-step
// vector norms, not per-entry means:
//   RMSE = sqrt((1/P) sum_p ||x(p) - xhat(p)||^2)
//   MAE  = (1/P) sum_p ||x(p) - xhat(p)||_1
double rmse_pred(const Matrix& truth, const Matrix& predicted);
double mae_pred(const Matrix& truth, const Matrix& predicted);

enum class ReconScope { Masked, Observed };

// Mean reconstruction error over the test window,
//   (1 / (T - tau - 1)) * sum_{t >= tau} sum_{n in scope(t)} (x_n(t) - xbar_n(t))^2.
// The default scope scores the hidden entries; Observed scores the rest
// (used for masked-vs-unmasked comparisons). Throws EmptyScope when the
// scope selects nothing or the test window is empty.
double epsilon_recon(const Matrix& truth, const Matrix& estimate, const SamplingMask& mask,
                     ReconScope scope = ReconScope::Masked);

}  // namespace gkae
