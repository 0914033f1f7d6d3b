#include "ldem/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ldem/error.hpp"

namespace ldem {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

bool BinaryMask::at(const Vec2& c) const {
    if (width <= 0 || height <= 0) return false;
    const int col = std::clamp(static_cast<int>(std::floor(c[0] * width)), 0, width - 1);
    const int row = std::clamp(static_cast<int>(std::floor((1.0 - c[1]) * height)), 0, height - 1);
    return bits[static_cast<std::size_t>(row) * width + col] != 0;
}

namespace {

// Next whitespace-separated token, skipping '#' comments (P2 headers and bodies).
std::string pgm_token(std::istream& in) {
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return tok;
    }
    throw InputError("truncated PGM stream");
}

int pgm_int(std::istream& in) {
    const std::string tok = pgm_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw InputError("malformed PGM integer '" + tok + "'");
        return v;
    } catch (const std::logic_error&) {
        throw InputError("malformed PGM integer '" + tok + "'");
    }
}

}  // namespace

BinaryMask read_pgm(std::istream& in) {
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") throw InputError("unsupported PGM magic '" + magic + "'");
    BinaryMask mask;
    mask.width = pgm_int(in);
    mask.height = pgm_int(in);
    const int maxval = pgm_int(in);
    if (mask.width <= 0 || mask.height <= 0) throw InputError("PGM dimensions must be positive");
    if (maxval <= 0 || maxval > 65535) throw InputError("PGM maxval out of range");
    const std::size_t count = static_cast<std::size_t>(mask.width) * mask.height;
    mask.bits.resize(count);
    const double threshold = 0.5 * maxval;
    if (magic == "P2") {
        for (std::size_t i = 0; i < count; ++i) {
            const int v = pgm_int(in);
            if (v < 0 || v > maxval) throw InputError("PGM sample out of range");
            mask.bits[i] = v >= threshold ? 1 : 0;
        }
    } else {
        in.get();  // single whitespace after maxval
        const int bytes = maxval < 256 ? 1 : 2;
        for (std::size_t i = 0; i < count; ++i) {
            int v = 0;
            for (int b = 0; b < bytes; ++b) {
                const int ch = in.get();
                if (ch == EOF) throw InputError("truncated P5 raster");
                v = (v << 8) | ch;
            }
            mask.bits[i] = v >= threshold ? 1 : 0;
        }
    }
    return mask;
}

BinaryMask read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open mask " + path);
    return read_pgm(in);
}

void write_pgm(std::ostream& out, const BinaryMask& mask) {
    out << "P2\n" << mask.width << ' ' << mask.height << "\n1\n";
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            if (c) out << ' ';
            out << static_cast<int>(mask.bits[static_cast<std::size_t>(r) * mask.width + c]);
        }
        out << '\n';
    }
}

BinaryMask default_cu_mask() {
    constexpr int size = 64;
    BinaryMask mask{size, size, std::vector<std::uint8_t>(size * size, 0)};
    auto set = [&](int r, int c) { mask.bits[static_cast<std::size_t>(r) * size + c] = 1; };
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double x = c + 0.5;
            const double y = r + 0.5;
            // "C": annulus around (17, 32) open towards +x.
            {
                const double dx = x - 17.0, dy = y - 32.0;
                const double d = std::hypot(dx, dy);
                const bool opening = dx > 0 && std::abs(dy) < dx * 0.9;
                if (d >= 7.0 && d <= 14.0 && !opening) set(r, c);
            }
            // "U": two bars joined by a lower half annulus around (47, 36).
            {
                const bool bars = y >= 18.0 && y <= 36.0 && ((x >= 37.0 && x <= 43.0) || (x >= 51.0 && x <= 57.0));
                const double dx = x - 47.0, dy = y - 36.0;
                const double d = std::hypot(dx, dy);
                const bool bowl = dy >= 0.0 && d >= 4.0 && d <= 10.0;
                if (bars || bowl) set(r, c);
            }
        }
    }
    return mask;
}

double basic_sinusoidal_2d(const Vec2& c) { return 2.0 + std::sin(two_pi * c[0]) * std::cos(two_pi * c[1]); }

double complex_sinusoidal_2d(const Vec2& c) {
    if (!(c[1] > 0.0)) throw DomainError("complex_sinusoidal_2d requires c_y > 0");
    return 2.0 + std::sin(std::exp(c[0]) * two_pi) * std::cos(std::log(c[1]) * std::numbers::pi);
}

double ring_2d(const Vec2& c, double radius, double thickness) {
    const double d = std::hypot(c[0] - 0.5, c[1] - 0.5);
    return std::exp(-(d - radius) * (d - radius) / (2.0 * thickness * thickness));
}

double localized_peaks_2d(const Vec2& c, double base_value, std::span<const Rect> rects, double peak) {
    for (const auto& r : rects)
        if (r.contains(c)) return peak;
    return base_value;
}

double blend_step(double x, double center, double width) { return 1.0 / (1.0 + std::exp(-(x - center) / width)); }

double blended_quadrants_2d(const Vec2& c) {
    const double sx = blend_step(c[0], 0.5, 0.02);
    const double sy = blend_step(c[1], 0.5, 0.02);
    return 1.0 * (1.0 - sx) * sy + 2.5 * sx * sy + 3.0 * (1.0 - sx) * (1.0 - sy) + 4.0 * sx * (1.0 - sy);
}

double pattern_mask_2d(const Vec2& c, const BinaryMask& mask, double base, double delta) {
    return mask.at(c) ? base + delta : base;
}

double extreme_2d(const Vec2& c, const std::optional<Rect>& rect, double high, double low) {
    return rect && rect->contains(c) ? high : low;
}

double basic_sinusoidal_3d(const Vec3& c) {
    return 1.2 + std::sin(two_pi * c[0]) * std::cos(two_pi * c[1]) * std::sin(two_pi * c[2]);
}

double complex_sinusoidal_3d(const Vec3& c) {
    constexpr double eps = 1e-5;
    if (!(c[1] + eps > 0.0)) throw DomainError("complex_sinusoidal_3d requires c_y + 1e-5 > 0");
    return 1.2 + std::sin(std::exp(c[0]) * two_pi) * std::cos(std::log(c[1] + eps) * std::numbers::pi) *
                     std::sin(two_pi * c[2]);
}

double spherical_shell_3d(const Vec3& c, const Vec3& center, double radius, double thickness) {
    const double d = std::sqrt((c[0] - center[0]) * (c[0] - center[0]) + (c[1] - center[1]) * (c[1] - center[1]) +
                               (c[2] - center[2]) * (c[2] - center[2]));
    return std::exp(-(d - radius) * (d - radius) / (2.0 * thickness * thickness));
}

double blended_octants_3d(const Vec3& c) {
    const double sx = blend_step(c[0], 0.5, 0.02);
    const double sy = blend_step(c[1], 0.5, 0.02);
    const double sz = blend_step(c[2], 0.5, 0.02);
    double total = 0.0;
    for (int octant = 0; octant < 8; ++octant) {
        const double wx = (octant & 1) ? sx : 1.0 - sx;
        const double wy = (octant & 2) ? sy : 1.0 - sy;
        const double wz = (octant & 4) ? sz : 1.0 - sz;
        total += (octant + 1) * wx * wy * wz;
    }
    return total;
}

const std::vector<std::string>& generator_names_2d() {
    static const std::vector<std::string> names = {"basic_sinusoidal", "complex_sinusoidal", "ring",
                                                   "localized_peaks",  "blended_quadrants",  "cu_pattern",
                                                   "extreme",          "uniform"};
    return names;
}

const std::vector<std::string>& generator_names_3d() {
    static const std::vector<std::string> names = {"basic_sinusoidal_3d", "complex_sinusoidal_3d", "spherical_shell",
                                                   "blended_octants", "uniform"};
    return names;
}

bool is_generator_2d(const std::string& name) {
    const auto& n = generator_names_2d();
    return std::find(n.begin(), n.end(), name) != n.end();
}

bool is_generator_3d(const std::string& name) {
    const auto& n = generator_names_3d();
    return std::find(n.begin(), n.end(), name) != n.end();
}

double evaluate_2d(const std::string& name, const Vec2& c, const FieldParams& p) {
    if (name == "basic_sinusoidal") return basic_sinusoidal_2d(c);
    if (name == "complex_sinusoidal") return complex_sinusoidal_2d(c);
    if (name == "ring") return ring_2d(c, p.ring_radius, p.ring_thickness);
    if (name == "localized_peaks") return localized_peaks_2d(c, basic_sinusoidal_2d(c), p.peak_rects, p.peak_value);
    if (name == "blended_quadrants") return blended_quadrants_2d(c);
    if (name == "cu_pattern") return pattern_mask_2d(c, p.mask, p.pattern_base, p.pattern_delta);
    if (name == "extreme") return extreme_2d(c, p.extreme_rect, p.extreme_high, p.extreme_low);
    if (name == "uniform") return p.uniform_value;
    throw InputError("unknown 2D generator '" + name + "'");
}

double evaluate_3d(const std::string& name, const Vec3& c, const FieldParams& p) {
    if (name == "basic_sinusoidal_3d") return basic_sinusoidal_3d(c);
    if (name == "complex_sinusoidal_3d") return complex_sinusoidal_3d(c);
    if (name == "spherical_shell") return spherical_shell_3d(c, p.shell_center, p.shell_radius, p.shell_thickness);
    if (name == "blended_octants") return blended_octants_3d(c);
    if (name == "uniform") return p.uniform_value;
    throw InputError("unknown 3D generator '" + name + "'");
}

namespace {

std::vector<std::pair<std::string, double>> describe(const std::string& name, const FieldParams& p) {
    if (name == "ring") return {{"R", p.ring_radius}, {"T", p.ring_thickness}};
    if (name == "localized_peaks") return {{"P_peak", p.peak_value}, {"rects", static_cast<double>(p.peak_rects.size())}};
    if (name == "cu_pattern") return {{"rho_base", p.pattern_base}, {"delta_pattern", p.pattern_delta}};
    if (name == "extreme") return {{"high", p.extreme_high}, {"low", p.extreme_low}};
    if (name == "spherical_shell") return {{"R", p.shell_radius}, {"T", p.shell_thickness}};
    if (name == "uniform") return {{"value", p.uniform_value}};
    return {};
}

void check_positive(const PopulationField& f) {
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (!(f.values[i] > 0.0) || !std::isfinite(f.values[i]))
            throw DomainError("generator '" + f.generator + "' produced non-positive population at element " +
                              std::to_string(i));
}

}  // namespace

PopulationField make_population(const std::string& name, const TriGrid2D& grid, const FieldParams& params) {
    PopulationField f{{}, name, describe(name, params)};
    f.values.reserve(grid.face_count());
    for (const auto& c : face_centroids(grid)) f.values.push_back(evaluate_2d(name, c, params));
    check_positive(f);
    return f;
}

PopulationField make_population(const std::string& name, const TetGrid3D& grid, const FieldParams& params) {
    PopulationField f{{}, name, describe(name, params)};
    f.values.reserve(grid.cell_count());
    for (const auto& c : cell_centroids(grid)) f.values.push_back(evaluate_3d(name, c, params));
    check_positive(f);
    return f;
}

}  // namespace ldem
