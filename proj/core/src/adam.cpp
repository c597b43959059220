#include "gkae/adam.hpp"

#include <cmath>

#include "gkae/error.hpp"

namespace gkae::ad {

void AdamState::step(std::span<Matrix* const> params, std::span<const Matrix> grads) {
    if (params.size() != grads.size()) throw ShapeMismatch("adam_step: params/grads count differs");
    if (m_.empty()) {
        for (const Matrix* p : params) {
            m_.emplace_back(p->rows(), p->cols());
            v_.emplace_back(p->rows(), p->cols());
        }
    }
    if (m_.size() != params.size()) throw ShapeMismatch("adam_step: parameter count changed");

    ++t_;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t_));

    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        const Matrix& g = grads[k];
        if (!p.same_shape(g) || !p.same_shape(m_[k]))
            throw ShapeMismatch("adam_step: gradient shape differs from parameter");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g.data()[i];
            double& m = m_[k].data()[i];
            double& v = v_[k].data()[i];
            m = config.beta1 * m + (1.0 - config.beta1) * gi;
            v = config.beta2 * v + (1.0 - config.beta2) * gi * gi;
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p.data()[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        }
    }
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state) {
    state.step(params, grads);
}

}  // namespace gkae::ad
