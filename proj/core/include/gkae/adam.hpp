#pragma once

#include <span>
#include <vector>

#include "gkae/matrix.hpp"

namespace gkae::ad {

struct AdamConfig {
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with bias correction. Moment buffers are created on the first step
// and must keep matching shapes afterwards.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(AdamConfig cfg) : config(cfg) {}

    AdamConfig config;

    long long step_count() const { return t_; }

    void step(std::span<Matrix* const> params, std::span<const Matrix> grads);

private:
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    long long t_ = 0;
};

// In-place update of params from grads; increments the step count.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state);

}  // namespace gkae::ad
