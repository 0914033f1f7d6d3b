#pragma once

#include <span>
#include <string>
#include <vector>

#include "ldem/geometry.hpp"
#include "ldem/metrics.hpp"

namespace ldem {

// Eulerian diffusion cartogram: density on an m x m node raster over the unit
// square, vertices advected through the raster velocity -grad(rho)/rho.
struct DiffusionState {
    int m = 0;
    double h = 0.0;
    double dt = 0.0;
    long iteration = 0;
    std::vector<double> rho;  // row-major, x fastest
    std::vector<Vec2> positions;
    bool stability_warned = false;

    double total_mass() const;  // trapezoid-weighted sum of rho
    double uniformity() const;  // std / mean of the raster values
};

// Largest stable step of the explicit 5-point scheme, h^2 / 4.
double stability_bound(int m);

// Face populations splatted to nodes with the bilinear weights of each face
// centroid: rho_node = sum(w p) / sum(w area).
std::vector<double> rasterize_population(const TriGrid2D& grid, std::span<const double> populations, int m);

DiffusionState make_diffusion_state(const TriGrid2D& grid, std::span<const double> populations, int m, double dt);

// Raster velocity at node (i, j): -grad(rho)/rho by central differences with
// mirrored ghosts (zero normal component on the boundary).
Vec2 node_velocity(const DiffusionState& state, int i, int j);

// One explicit step: vertices move with the current velocity field, then the
// raster diffuses. Warns once per state when dt exceeds the stability bound.
void diffusion_step(DiffusionState& state);

struct DiffusionConfig {
    int raster = 0;                // 0: use the mesh resolution
    double dt = 0.0;               // absolute step; 0: step_factor x stability bound
    double step_factor = 0.5;
    double tolerance = 1e-4;       // stop when raster std/mean drops below
    long max_iterations = 100000;
    double divergence_bound = 10.0;
    int histogram_bins = 50;
};

// "default" (0.5 x bound), "large_step" (1 x bound) or "reduced" (dt = 5e-5).
DiffusionConfig diffusion_preset(const std::string& name);
const std::vector<std::string>& diffusion_preset_names();

struct DiffusionResult {
    std::vector<Vec2> positions;
    QualityReport report;
    long iterations = 0;
    bool converged = false;
    double dt = 0.0;
    double final_uniformity = 0.0;
};

// Throws DivergenceError when any coordinate leaves [-bound, bound] or the
// raster loses positivity; throws DomainError on non-positive populations.
DiffusionResult run_diffusion(const TriGrid2D& grid, std::span<const double> populations,
                              const DiffusionConfig& config = {});

}  // namespace ldem
