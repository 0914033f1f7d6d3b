#include "ldem/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldem/error.hpp"
#include "ldem/log.hpp"

namespace ldem {

namespace {

// Uniform bucket grid over [0,1]^2 with cell size >= radius, so a radius
// query touches at most the 3x3 block around the query's bucket.
struct Buckets {
    int cells = 1;
    std::vector<std::vector<int>> items;

    Buckets(std::span<const Vec2> points, double radius) {
        cells = std::max(1, std::min(1024, static_cast<int>(std::floor(1.0 / radius))));
        items.resize(static_cast<std::size_t>(cells) * cells);
        for (std::size_t i = 0; i < points.size(); ++i) items[slot(points[i])].push_back(static_cast<int>(i));
    }
    int coord(double v) const { return std::clamp(static_cast<int>(std::floor(v * cells)), 0, cells - 1); }
    std::size_t slot(const Vec2& p) const { return static_cast<std::size_t>(coord(p[1])) * cells + coord(p[0]); }
};

}  // namespace

std::vector<double> aggregate_population(std::span<const Vec2> dense_centroids, std::span<const double> dense_values,
                                         std::span<const Vec2> coarse_centroids, double radius) {
    if (!(radius > 0.0)) throw InputError("aggregation radius must be positive");
    if (dense_centroids.size() != dense_values.size()) throw InputError("dense centroid/value count mismatch");
    if (dense_centroids.empty()) throw InputError("no dense values to aggregate");
    const Buckets buckets(dense_centroids, radius);
    const double r2 = radius * radius;
    std::vector<double> out;
    out.reserve(coarse_centroids.size());
    for (std::size_t i = 0; i < coarse_centroids.size(); ++i) {
        const Vec2& c = coarse_centroids[i];
        const int bx = buckets.coord(c[0]), by = buckets.coord(c[1]);
        double total = 0.0;
        long count = 0;
        for (int y = std::max(0, by - 1); y <= std::min(buckets.cells - 1, by + 1); ++y) {
            for (int x = std::max(0, bx - 1); x <= std::min(buckets.cells - 1, bx + 1); ++x) {
                for (int j : buckets.items[static_cast<std::size_t>(y) * buckets.cells + x]) {
                    const double dx = dense_centroids[j][0] - c[0], dy = dense_centroids[j][1] - c[1];
                    if (dx * dx + dy * dy < r2) {
                        total += dense_values[j];
                        ++count;
                    }
                }
            }
        }
        if (count > 0) {
            out.push_back(total / static_cast<double>(count));
            continue;
        }
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < dense_centroids.size(); ++j) {
            const double dx = dense_centroids[j][0] - c[0], dy = dense_centroids[j][1] - c[1];
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                nearest = j;
            }
        }
        warn("coarse element " + std::to_string(i) + " has no dense centroid within radius " + std::to_string(radius) +
             "; using nearest dense value");
        out.push_back(dense_values[nearest]);
    }
    return out;
}

std::vector<double> aggregate_to_coarse(const TriGrid2D& dense, std::span<const double> dense_values,
                                        const TriGrid2D& coarse) {
    if (coarse.n >= dense.n) throw InvalidResolution("coarse resolution must be below the dense resolution");
    return aggregate_population(face_centroids(dense), dense_values, face_centroids(coarse), 1.0 / coarse.n);
}

double bilinear_sample(int n, std::span<const double> nodal, const Vec2& q) {
    const double scale = n - 1;
    const double x = std::clamp(q[0], 0.0, 1.0) * scale;
    const double y = std::clamp(q[1], 0.0, 1.0) * scale;
    const int i = std::clamp(static_cast<int>(std::floor(x)), 0, n - 2);
    const int j = std::clamp(static_cast<int>(std::floor(y)), 0, n - 2);
    const double tx = x - i, ty = y - j;
    const std::size_t k = static_cast<std::size_t>(j) * n + i;
    return (1 - tx) * (1 - ty) * nodal[k] + tx * (1 - ty) * nodal[k + 1] + (1 - tx) * ty * nodal[k + n] +
           tx * ty * nodal[k + n + 1];
}

std::vector<Vec2> bilinear_transfer(int coarse_n, std::span<const Vec2> coarse_field, std::span<const Vec2> queries) {
    if (coarse_n < 2) throw InvalidResolution("coarse resolution must be at least 2");
    if (coarse_field.size() != static_cast<std::size_t>(coarse_n) * coarse_n)
        throw InputError("coarse field size does not match resolution");
    std::vector<double> fx(coarse_field.size()), fy(coarse_field.size());
    for (std::size_t i = 0; i < coarse_field.size(); ++i) {
        fx[i] = coarse_field[i][0];
        fy[i] = coarse_field[i][1];
    }
    std::vector<Vec2> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back({bilinear_sample(coarse_n, fx, q), bilinear_sample(coarse_n, fy, q)});
    return out;
}

}  // namespace ldem
