#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldem/autodiff.hpp"
#include "ldem/geometry.hpp"

namespace ldem {

struct ModelShape {
    int dimension = 2;           // 2 or 3 output coordinates per vertex
    int grid_n = 0;              // vertices per side of the output grid
    std::size_t input = 0;       // population vector length
    std::size_t bottleneck = 1;  // B
    std::size_t kernel = 1;      // 1D convolution length K

    std::size_t output() const noexcept;
    std::size_t parameter_count() const noexcept;
    bool operator==(const ModelShape&) const = default;
};

ModelShape shape_for(const TriGrid2D& grid, std::size_t bottleneck = 1, std::size_t kernel = 1);
ModelShape shape_for(const TetGrid3D& grid, std::size_t bottleneck = 1, std::size_t kernel = 1);

// Bottleneck network y = W2 * relu(conv1d(sigmoid(W1 x + b1))) + b2.
//
// Parameters are stored flat in the order W1 (B x I, row-major), b1 (B),
// kernel (K), W2 (O x B, row-major), b2 (O).
class TransformModel {
public:
    TransformModel() = default;
    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation from `seed`.
    TransformModel(const ModelShape& shape, std::uint64_t seed);
    TransformModel(const ModelShape& shape, std::vector<double> parameters);

    const ModelShape& shape() const noexcept { return shape_; }
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    struct Blocks {
        std::size_t w1, b1, kernel, w2, b2, end;
    };
    Blocks blocks() const noexcept;

    // Flat output coordinates (length O) for `population`.
    std::vector<double> forward(std::span<const double> population) const;

    template <ad::Scalar T>
    std::vector<T> forward_with(std::span<const T> params, std::span<const double> population) const;

private:
    void check_input(std::span<const double> population) const;

    ModelShape shape_;
    std::vector<double> params_;
};

template <ad::Scalar T>
std::vector<T> TransformModel::forward_with(std::span<const T> p, std::span<const double> x) const {
    check_input(x);
    const Blocks b = blocks();
    const std::size_t B = shape_.bottleneck;
    std::vector<T> z;
    z.reserve(B);
    for (std::size_t r = 0; r < B; ++r)
        z.push_back(ad::sigmoid(ad::dot(p.subspan(b.w1 + r * shape_.input, shape_.input), x) + p[b.b1 + r]));
    auto conv = ad::conv1d(std::span<const T>(z), p.subspan(b.kernel, shape_.kernel));
    for (auto& v : conv) v = ad::relu(v);
    auto y = ad::matvec(p.subspan(b.w2, shape_.output() * B), std::span<const T>(conv));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = y[i] + p[b.b2 + i];
    return y;
}

// Output coordinates held at fixed values (e.g. boundary constraints).
struct CoordinateConstraints {
    std::vector<std::pair<std::size_t, double>> fixed;

    bool empty() const noexcept { return fixed.empty(); }

    template <ad::Scalar T>
    void apply(std::vector<T>& coords) const {
        for (const auto& [index, value] : fixed) coords[index] = ad::lift(coords[index], value);
    }
};

enum class BoundaryMode {
    free,         // every vertex moves freely
    pin_corners,  // the four corners stay put
    slide,        // boundary vertices slide along their side; the image stays the unit square
};

BoundaryMode parse_boundary_mode(const std::string& name);
std::string to_string(BoundaryMode mode);
CoordinateConstraints boundary_constraints(const TriGrid2D& grid, BoundaryMode mode);

// Flat little-endian checkpoint: "LDEM", u32 version, u32 dimension, u32 grid_n,
// u64 input, u64 bottleneck, u64 kernel, u64 output, u64 parameter count, f64 parameters.
void save_checkpoint(std::ostream& out, const TransformModel& model);
TransformModel load_checkpoint(std::istream& in);
void save_checkpoint_file(const std::string& path, const TransformModel& model);
TransformModel load_checkpoint_file(const std::string& path);

}  // namespace ldem
