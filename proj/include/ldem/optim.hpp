#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ldem {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t parameter_count = 0) : m(parameter_count, 0.0), v(parameter_count, 0.0) {}
};

// One bias-corrected Adam update, in place.
void adam_step(AdamState& state, std::span<double> parameters, std::span<const double> gradients,
               double learning_rate);

// Rescales to `threshold` when the global L2 norm exceeds it. Returns the norm before clipping.
double clip_gradients(std::span<double> gradients, double threshold);

}  // namespace ldem
