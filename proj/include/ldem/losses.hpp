#pragma once

// Training objectives. Every loss is a template over ad::Scalar so the same
// code runs on plain doubles (evaluation, metrics) and on a tape (training).
//
// Coordinates are flat: (x0, y0, x1, y1, ...) in 2D, (x0, y0, z0, ...) in 3D,
// with vertices in row-major order, x fastest. Regulariser groups follow
// that indexing: the x-groups of a 2D grid are its rows traversed in +x, the
// y-groups its columns traversed in +y.

#include <span>
#include <vector>

#include "ldem/autodiff.hpp"
#include "ldem/error.hpp"
#include "ldem/geometry.hpp"

namespace ldem {

struct LossWeights {
    double density = 1.0;
    double slope = 1.0;
    double distance = 1.0;
};

inline constexpr double slope_epsilon = 1e-8;

template <ad::Scalar T>
std::vector<T> face_area_terms(std::span<const T> coords, std::span<const Tri> faces) {
    std::vector<T> areas;
    areas.reserve(faces.size());
    for (const auto& f : faces) {
        const std::size_t a = 2 * static_cast<std::size_t>(f[0]);
        const std::size_t b = 2 * static_cast<std::size_t>(f[1]);
        const std::size_t c = 2 * static_cast<std::size_t>(f[2]);
        areas.push_back(ad::tri_area(coords[a], coords[a + 1], coords[b], coords[b + 1], coords[c], coords[c + 1]));
    }
    return areas;
}

template <ad::Scalar T>
std::vector<T> cell_volume_terms(std::span<const T> coords, std::span<const Tet> cells) {
    std::vector<T> volumes;
    volumes.reserve(cells.size());
    std::array<T, 12> p;
    for (const auto& cell : cells) {
        for (std::size_t v = 0; v < 4; ++v)
            for (std::size_t d = 0; d < 3; ++d) p[3 * v + d] = coords[3 * static_cast<std::size_t>(cell[v]) + d];
        volumes.push_back(ad::tet_volume(std::span<const T, 12>(p)));
    }
    return volumes;
}

// std(rho) / mean(rho) with rho_i = population_i / measure_i.
template <ad::Scalar T>
T density_uniformity(std::span<const double> populations, std::span<const T> measures,
                     ad::StdConvention conv = ad::StdConvention::population) {
    if (populations.size() != measures.size() || populations.empty())
        throw InputError("population and measure counts differ");
    std::vector<T> rho;
    rho.reserve(measures.size());
    for (std::size_t i = 0; i < measures.size(); ++i) rho.push_back(populations[i] / measures[i]);
    const std::span<const T> r(rho);
    return ad::stddev(r, conv) / ad::mean(r);
}

template <ad::Scalar T>
T density_loss_2d(std::span<const double> populations, std::span<const T> coords, std::span<const Tri> faces,
                  ad::StdConvention conv = ad::StdConvention::population) {
    const auto areas = face_area_terms(coords, faces);
    return density_uniformity(populations, std::span<const T>(areas), conv);
}

template <ad::Scalar T>
T density_loss_3d(std::span<const double> populations, std::span<const T> coords, std::span<const Tet> cells,
                  ad::StdConvention conv = ad::StdConvention::population) {
    const auto volumes = cell_volume_terms(coords, cells);
    return density_uniformity(populations, std::span<const T>(volumes), conv);
}

namespace detail {

// Sum over j of |q_{j+1} - q_j| where q_j is a per-segment quantity along
// one group of `n` vertices; `vertex(j)` gives the flat offset of point j.
template <ad::Scalar T, typename Offset, typename SegmentTerm>
T group_variation(std::span<const T> coords, int n, Offset vertex, SegmentTerm term, std::vector<T>& scratch) {
    scratch.clear();
    for (int j = 0; j + 1 < n; ++j) scratch.push_back(term(coords, vertex(j), vertex(j + 1)));
    std::vector<T> diffs;
    diffs.reserve(scratch.size());
    for (std::size_t j = 0; j + 1 < scratch.size(); ++j) diffs.push_back(ad::abs(scratch[j + 1] - scratch[j]));
    if (diffs.empty()) return ad::lift(coords[0], 0.0);
    return ad::sum(std::span<const T>(diffs));
}

}  // namespace detail

template <ad::Scalar T>
T slope_loss(std::span<const T> coords, int n) {
    if (coords.size() != 2 * static_cast<std::size_t>(n) * n) throw InputError("slope_loss: size mismatch");
    // Along x: dy / (dx + eps). Along y: dx / (dy + eps).
    auto slope_x = [](std::span<const T> c, std::size_t a, std::size_t b) {
        return (c[b + 1] - c[a + 1]) / (c[b] - c[a] + slope_epsilon);
    };
    auto slope_y = [](std::span<const T> c, std::size_t a, std::size_t b) {
        return (c[b] - c[a]) / (c[b + 1] - c[a + 1] + slope_epsilon);
    };
    std::vector<T> scratch;
    std::vector<T> groups;
    groups.reserve(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto row = [&](int j) { return 2 * (static_cast<std::size_t>(i) * n + j); };
        auto col = [&](int j) { return 2 * (static_cast<std::size_t>(j) * n + i); };
        groups.push_back(detail::group_variation(coords, n, row, slope_x, scratch));
        groups.push_back(detail::group_variation(coords, n, col, slope_y, scratch));
    }
    return ad::sum(std::span<const T>(groups)) / static_cast<double>(n);
}

template <ad::Scalar T>
T distance_loss_2d(std::span<const T> coords, int n) {
    if (coords.size() != 2 * static_cast<std::size_t>(n) * n)
        throw InputError("distance_loss_2d: size mismatch");
    auto sq_len = [](std::span<const T> c, std::size_t a, std::size_t b) {
        return ad::square(c[b] - c[a]) + ad::square(c[b + 1] - c[a + 1]);
    };
    std::vector<T> scratch;
    std::vector<T> groups;
    groups.reserve(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto row = [&](int j) { return 2 * (static_cast<std::size_t>(i) * n + j); };
        auto col = [&](int j) { return 2 * (static_cast<std::size_t>(j) * n + i); };
        groups.push_back(detail::group_variation(coords, n, row, sq_len, scratch));
        groups.push_back(detail::group_variation(coords, n, col, sq_len, scratch));
    }
    return ad::sum(std::span<const T>(groups)) / static_cast<double>(n);
}

// 3D analogue over the n^2 lines along each axis, normalised by the number
// of lines per axis so that it reduces to the 2D scaling (1/n per group set).
template <ad::Scalar T>
T distance_loss_3d(std::span<const T> coords, int n) {
    const std::size_t nn = static_cast<std::size_t>(n);
    if (coords.size() != 3 * nn * nn * nn) throw InputError("distance_loss_3d: size mismatch");
    auto sq_len = [](std::span<const T> c, std::size_t a, std::size_t b) {
        return ad::square(c[b] - c[a]) + ad::square(c[b + 1] - c[a + 1]) + ad::square(c[b + 2] - c[a + 2]);
    };
    std::vector<T> scratch;
    std::vector<T> groups;
    groups.reserve(3 * nn * nn);
    for (std::size_t p = 0; p < nn; ++p) {
        for (std::size_t q = 0; q < nn; ++q) {
            auto along_x = [&](int j) { return 3 * ((q * nn + p) * nn + static_cast<std::size_t>(j)); };
            auto along_y = [&](int j) { return 3 * ((q * nn + static_cast<std::size_t>(j)) * nn + p); };
            auto along_z = [&](int j) { return 3 * ((static_cast<std::size_t>(j) * nn + q) * nn + p); };
            groups.push_back(detail::group_variation(coords, n, along_x, sq_len, scratch));
            groups.push_back(detail::group_variation(coords, n, along_y, sq_len, scratch));
            groups.push_back(detail::group_variation(coords, n, along_z, sq_len, scratch));
        }
    }
    return ad::sum(std::span<const T>(groups)) / static_cast<double>(nn * nn);
}

template <ad::Scalar T>
T total_loss_2d(std::span<const double> populations, std::span<const T> coords, const TriGrid2D& grid,
                const LossWeights& w, ad::StdConvention conv = ad::StdConvention::population) {
    T total = ad::lift(coords[0], 0.0);
    if (w.density != 0.0) total = total + w.density * density_loss_2d(populations, coords, std::span(grid.faces), conv);
    if (w.slope != 0.0) total = total + w.slope * slope_loss(coords, grid.n);
    if (w.distance != 0.0) total = total + w.distance * distance_loss_2d(coords, grid.n);
    return total;
}

// The 3D objective has no slope term; `w.slope` is ignored.
template <ad::Scalar T>
T total_loss_3d(std::span<const double> populations, std::span<const T> coords, const TetGrid3D& grid,
                const LossWeights& w, ad::StdConvention conv = ad::StdConvention::population) {
    T total = ad::lift(coords[0], 0.0);
    if (w.density != 0.0) total = total + w.density * density_loss_3d(populations, coords, std::span(grid.cells), conv);
    if (w.distance != 0.0) total = total + w.distance * distance_loss_3d(coords, grid.n);
    return total;
}

}  // namespace ldem
