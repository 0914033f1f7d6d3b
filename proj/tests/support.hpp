#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ldem/autodiff.hpp"
#include "ldem/geometry.hpp"

namespace ldem::test {

// Central differences of f at x with step h.
inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::vector<double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Reverse-mode gradient of a tape-valued function.
inline std::vector<double> tape_gradient(const std::function<ad::Var(std::span<const ad::Var>)>& f,
                                         std::span<const double> x) {
    ad::Tape tape;
    const auto vars = ad::variables(tape, x);
    const ad::Var y = f(vars);
    return tape.gradient(y, vars);
}

// max |a - b| / max |b|, the norm-wise relative error.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0.0 ? num / den : num;
}

// Reference grid coordinates jittered by up to `amount` grid spacings.
inline std::vector<double> jittered(std::span<const Vec2> vertices, int n, double amount, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-amount / (n - 1), amount / (n - 1));
    std::vector<double> c;
    for (const auto& v : vertices) {
        c.push_back(v[0] + u(rng));
        c.push_back(v[1] + u(rng));
    }
    return c;
}

inline std::vector<double> jittered(std::span<const Vec3> vertices, int n, double amount, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-amount / (n - 1), amount / (n - 1));
    std::vector<double> c;
    for (const auto& v : vertices)
        for (int k = 0; k < 3; ++k) c.push_back(v[static_cast<std::size_t>(k)] + u(rng));
    return c;
}

inline std::vector<double> random_values(std::size_t count, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(count);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace ldem::test
