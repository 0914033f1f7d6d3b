#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldem/geometry.hpp"

namespace ldem {

// Closed axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    bool contains(const Vec2& c) const noexcept {
        return c[0] >= x_min && c[0] <= x_max && c[1] >= y_min && c[1] <= y_max;
    }
};

// Binary raster over [0,1]^2. Row 0 is the top edge (y = 1), as in PGM.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    bool at(const Vec2& c) const;
    bool operator==(const BinaryMask&) const = default;
};

BinaryMask read_pgm(std::istream& in);  // P2 or P5, thresholded at half of maxval
BinaryMask read_pgm_file(const std::string& path);
void write_pgm(std::ostream& out, const BinaryMask& mask);  // P2
// 64x64 stencil of the letters "CU".
BinaryMask default_cu_mask();

double basic_sinusoidal_2d(const Vec2& c);
double complex_sinusoidal_2d(const Vec2& c);
double ring_2d(const Vec2& c, double radius, double thickness);
double localized_peaks_2d(const Vec2& c, double base_value, std::span<const Rect> rects, double peak);
double blend_step(double x, double center, double width);
double blended_quadrants_2d(const Vec2& c);
double pattern_mask_2d(const Vec2& c, const BinaryMask& mask, double base, double delta);
double extreme_2d(const Vec2& c, const std::optional<Rect>& rect, double high, double low);

double basic_sinusoidal_3d(const Vec3& c);
double complex_sinusoidal_3d(const Vec3& c);
double spherical_shell_3d(const Vec3& c, const Vec3& center, double radius, double thickness);
double blended_octants_3d(const Vec3& c);

// Documented defaults for parameters the experiments leave open.
struct FieldParams {
    double ring_radius = 0.25;
    double ring_thickness = 0.05;
    std::vector<Rect> peak_rects = {{0.1, 0.3, 0.6, 0.9}, {0.6, 0.9, 0.1, 0.3}};
    double peak_value = 4.0;
    std::optional<Rect> extreme_rect = Rect{0.3, 0.7, 0.4, 0.6};
    double extreme_high = 10.0;
    double extreme_low = 0.5;
    BinaryMask mask = default_cu_mask();
    double pattern_base = 1.0;
    double pattern_delta = 1.0;
    Vec3 shell_center = {0.5, 0.5, 0.5};
    double shell_radius = 0.3;
    double shell_thickness = 0.07;
    double uniform_value = 1.0;
};

struct PopulationField {
    std::vector<double> values;
    std::string generator;
    std::vector<std::pair<std::string, double>> parameters;
};

const std::vector<std::string>& generator_names_2d();
const std::vector<std::string>& generator_names_3d();
bool is_generator_2d(const std::string& name);
bool is_generator_3d(const std::string& name);

double evaluate_2d(const std::string& name, const Vec2& c, const FieldParams& params = {});
double evaluate_3d(const std::string& name, const Vec3& c, const FieldParams& params = {});

// Generator evaluated at every reference face / cell centroid.
PopulationField make_population(const std::string& name, const TriGrid2D& grid, const FieldParams& params = {});
PopulationField make_population(const std::string& name, const TetGrid3D& grid, const FieldParams& params = {});

}  // namespace ldem
