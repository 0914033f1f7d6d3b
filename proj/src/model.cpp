#include "ldem/model.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "ldem/error.hpp"

namespace ldem {

std::size_t ModelShape::output() const noexcept {
    std::size_t vertices = 1;
    for (int d = 0; d < dimension; ++d) vertices *= static_cast<std::size_t>(grid_n);
    return vertices * static_cast<std::size_t>(dimension);
}

std::size_t ModelShape::parameter_count() const noexcept {
    return bottleneck * input + bottleneck + kernel + output() * bottleneck + output();
}

ModelShape shape_for(const TriGrid2D& grid, std::size_t bottleneck, std::size_t kernel) {
    return {2, grid.n, grid.face_count(), bottleneck, kernel};
}

ModelShape shape_for(const TetGrid3D& grid, std::size_t bottleneck, std::size_t kernel) {
    return {3, grid.n, grid.cell_count(), bottleneck, kernel};
}

namespace {

void validate(const ModelShape& s) {
    if (s.dimension != 2 && s.dimension != 3) throw InputError("model dimension must be 2 or 3");
    if (s.grid_n < 2) throw InvalidResolution("model grid resolution must be at least 2");
    if (s.input == 0 || s.bottleneck == 0 || s.kernel == 0) throw InputError("model sizes must be positive");
}

}  // namespace

TransformModel::TransformModel(const ModelShape& shape, std::uint64_t seed) : shape_(shape) {
    validate(shape_);
    params_.resize(shape_.parameter_count());
    std::mt19937_64 rng(seed);
    const Blocks b = blocks();
    auto fill = [&](std::size_t begin, std::size_t end, double fan_in) {
        const double bound = 1.0 / std::sqrt(fan_in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = begin; i < end; ++i) params_[i] = dist(rng);
    };
    fill(b.w1, b.b1, static_cast<double>(shape_.input));
    fill(b.b1, b.kernel, static_cast<double>(shape_.input));
    fill(b.kernel, b.w2, static_cast<double>(shape_.kernel));
    fill(b.w2, b.b2, static_cast<double>(shape_.bottleneck));
    fill(b.b2, b.end, static_cast<double>(shape_.bottleneck));
}

TransformModel::TransformModel(const ModelShape& shape, std::vector<double> parameters)
    : shape_(shape), params_(std::move(parameters)) {
    validate(shape_);
    if (params_.size() != shape_.parameter_count())
        throw InputError("parameter count " + std::to_string(params_.size()) + " does not match shape (" +
                         std::to_string(shape_.parameter_count()) + ")");
}

TransformModel::Blocks TransformModel::blocks() const noexcept {
    Blocks b{};
    b.w1 = 0;
    b.b1 = b.w1 + shape_.bottleneck * shape_.input;
    b.kernel = b.b1 + shape_.bottleneck;
    b.w2 = b.kernel + shape_.kernel;
    b.b2 = b.w2 + shape_.output() * shape_.bottleneck;
    b.end = b.b2 + shape_.output();
    return b;
}

void TransformModel::check_input(std::span<const double> population) const {
    if (population.size() != shape_.input)
        throw InputError("population length " + std::to_string(population.size()) + " does not match model input " +
                         std::to_string(shape_.input));
}

std::vector<double> TransformModel::forward(std::span<const double> population) const {
    return forward_with(std::span<const double>(params_), population);
}

BoundaryMode parse_boundary_mode(const std::string& name) {
    if (name == "free") return BoundaryMode::free;
    if (name == "pin_corners") return BoundaryMode::pin_corners;
    if (name == "slide") return BoundaryMode::slide;
    throw InputError("unknown boundary mode '" + name + "'");
}

std::string to_string(BoundaryMode mode) {
    switch (mode) {
        case BoundaryMode::free: return "free";
        case BoundaryMode::pin_corners: return "pin_corners";
        case BoundaryMode::slide: return "slide";
    }
    return "free";
}

CoordinateConstraints boundary_constraints(const TriGrid2D& grid, BoundaryMode mode) {
    CoordinateConstraints c;
    if (mode == BoundaryMode::free) return c;
    const int n = grid.n;
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const bool left = col == 0, right = col == n - 1, bottom = row == 0, top = row == n - 1;
            const bool corner = (left || right) && (bottom || top);
            const std::size_t v = static_cast<std::size_t>(grid.index(col, row));
            const Vec2& ref = grid.reference_vertices[v];
            if (mode == BoundaryMode::pin_corners) {
                if (corner) {
                    c.fixed.emplace_back(2 * v, ref[0]);
                    c.fixed.emplace_back(2 * v + 1, ref[1]);
                }
                continue;
            }
            if (left || right) c.fixed.emplace_back(2 * v, ref[0]);
            if (bottom || top) c.fixed.emplace_back(2 * v + 1, ref[1]);
        }
    }
    return c;
}

namespace {

constexpr std::array<char, 4> magic = {'L', 'D', 'E', 'M'};
constexpr std::uint32_t checkpoint_version = 1;

template <typename U>
void put_le(std::ostream& out, U value) {
    std::array<char, sizeof(U)> bytes;
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
    std::array<unsigned char, sizeof(U)> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw InputError("truncated checkpoint");
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
    return value;
}

}  // namespace

void save_checkpoint(std::ostream& out, const TransformModel& model) {
    const auto& s = model.shape();
    out.write(magic.data(), magic.size());
    put_le<std::uint32_t>(out, checkpoint_version);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.dimension));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid_n));
    put_le<std::uint64_t>(out, s.input);
    put_le<std::uint64_t>(out, s.bottleneck);
    put_le<std::uint64_t>(out, s.kernel);
    put_le<std::uint64_t>(out, s.output());
    put_le<std::uint64_t>(out, model.parameters().size());
    for (double p : model.parameters()) {
        std::uint64_t bits;
        std::memcpy(&bits, &p, sizeof bits);
        put_le<std::uint64_t>(out, bits);
    }
}

TransformModel load_checkpoint(std::istream& in) {
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    if (!in || head != magic) throw InputError("not an LDEM checkpoint");
    const auto version = get_le<std::uint32_t>(in);
    if (version != checkpoint_version) throw InputError("unsupported checkpoint version " + std::to_string(version));
    ModelShape s;
    s.dimension = static_cast<int>(get_le<std::uint32_t>(in));
    s.grid_n = static_cast<int>(get_le<std::uint32_t>(in));
    s.input = get_le<std::uint64_t>(in);
    s.bottleneck = get_le<std::uint64_t>(in);
    s.kernel = get_le<std::uint64_t>(in);
    const auto output = get_le<std::uint64_t>(in);
    const auto count = get_le<std::uint64_t>(in);
    validate(s);
    if (output != s.output() || count != s.parameter_count()) throw InputError("checkpoint header is inconsistent");
    std::vector<double> params(count);
    for (auto& p : params) {
        const auto bits = get_le<std::uint64_t>(in);
        std::memcpy(&p, &bits, sizeof p);
    }
    return TransformModel(s, std::move(params));
}

void save_checkpoint_file(const std::string& path, const TransformModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    save_checkpoint(out, model);
}

TransformModel load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return load_checkpoint(in);
}

}  // namespace ldem
