#include <cmath>

#include "gainprint/model.hpp"

namespace gainprint::model {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamConfig& cfg) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
        throw DomainError("adam_step: parameter, gradient and state sizes differ");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace gainprint::model
