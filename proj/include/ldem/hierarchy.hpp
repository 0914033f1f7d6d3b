#pragma once

#include <span>
#include <vector>

#include "ldem/geometry.hpp"

namespace ldem {

// Mean of the dense values whose centroids lie strictly within `radius` of
// each coarse centroid. An empty neighbourhood falls back to the nearest
// dense centroid and emits a warning.
std::vector<double> aggregate_population(std::span<const Vec2> dense_centroids, std::span<const double> dense_values,
                                         std::span<const Vec2> coarse_centroids, double radius);

// Coarse-grid aggregation with the default radius 1 / D_coarse.
std::vector<double> aggregate_to_coarse(const TriGrid2D& dense, std::span<const double> dense_values,
                                        const TriGrid2D& coarse);

// Piecewise-bilinear interpolation of a per-node field given on an n x n
// unit-square grid (row-major, x fastest), evaluated at `queries`. Each
// component is interpolated independently; queries are clamped to [0,1]^2.
std::vector<Vec2> bilinear_transfer(int coarse_n, std::span<const Vec2> coarse_field, std::span<const Vec2> queries);
double bilinear_sample(int n, std::span<const double> nodal, const Vec2& q);

}  // namespace ldem
