#include "ldem/optim.hpp"

#include <cmath>

#include "ldem/error.hpp"

namespace ldem {

void adam_step(AdamState& state, std::span<double> parameters, std::span<const double> gradients,
               double learning_rate) {
    if (parameters.size() != gradients.size() || state.m.size() != parameters.size())
        throw InputError("adam_step: parameter, gradient and moment sizes differ");
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        const double g = gradients[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        parameters[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

double clip_gradients(std::span<double> gradients, double threshold) {
    if (!(threshold > 0.0)) throw InputError("clip threshold must be positive");
    double ss = 0.0;
    for (double g : gradients) ss += g * g;
    const double norm = std::sqrt(ss);
    if (norm > threshold) {
        const double scale = threshold / norm;
        for (double& g : gradients) g *= scale;
    }
    return norm;
}

}  // namespace ldem
