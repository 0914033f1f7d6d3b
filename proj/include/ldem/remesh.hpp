#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ldem/geometry.hpp"
#include "ldem/pipeline.hpp"

namespace ldem {

// Simply connected open triangle surface. `boundary` is the single boundary
// loop in the direction of the face orientation.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> faces;
    std::vector<int> boundary;
};

// Checks edge-manifoldness, consistent orientation and a single boundary loop;
// fills `boundary`. Throws InputError with the offending edge or vertex.
SurfaceMesh make_surface_mesh(std::vector<Vec3> vertices, std::vector<Tri> faces);

// Uniform-weight Tutte embedding onto the unit square. Boundary vertices are
// placed by arc length with corners at the quarter marks (ear vertices, which
// belong to a single face, are snapped to corners). Throws if the result is
// not fold-over-free.
std::vector<Vec2> tutte_embed(const SurfaceMesh& mesh);

struct PointLocation {
    int face = -1;
    std::array<double, 3> bary{};
    bool inside = true;  // false: projected onto the nearest face
};

// Point location in a planar triangulation by a walk seeded from a bucket
// grid. Queries outside the mesh are projected to the nearest face and
// flagged with inside = false.
class PlanarLocator {
public:
    PlanarLocator(std::span<const Vec2> vertices, std::span<const Tri> faces);

    PointLocation locate(const Vec2& q) const;
    std::size_t walk_fallbacks() const noexcept { return fallbacks_; }

private:
    std::array<double, 3> barycentric(int face, const Vec2& q) const;
    PointLocation project(const Vec2& q) const;
    int bucket_of(const Vec2& q) const;

    std::vector<Vec2> vertices_;
    std::vector<Tri> faces_;
    std::vector<std::array<int, 3>> neighbours_;  // across the edge opposite each corner
    Vec2 lo_{}, hi_{};
    int buckets_ = 1;
    std::vector<std::vector<int>> bucket_faces_;
    mutable std::size_t fallbacks_ = 0;
};

// Warns once with the number of projected queries.
std::vector<PointLocation> inverse_map(std::span<const Vec2> vertices, std::span<const Tri> faces,
                                       std::span<const Vec2> queries);

// Per-face barycentric interpolation of vertex attributes.
Vec3 interpolate(std::span<const Vec3> values, const Tri& face, const std::array<double, 3>& bary);
Vec2 interpolate(std::span<const Vec2> values, const Tri& face, const std::array<double, 3>& bary);

struct RemeshConfig {
    int resolution = 30;  // output grid m
    Pipeline2DConfig ldem;

    RemeshConfig() { ldem.boundary = BoundaryMode::slide; }
};

struct RemeshResult {
    SurfaceMesh mesh;                     // remeshed surface, 2(m-1)^2 faces
    std::vector<Vec2> tutte;              // g: original vertices in the square
    std::vector<Vec2> parameter;          // output vertices pulled back into the g domain
    std::vector<double> grid_population;  // population on the LDEM dense grid faces
    Pipeline2DResult ldem;
    long flipped_parameter_faces = 0;
    long degenerate_faces = 0;
    std::size_t projected_queries = 0;
};

// Population given per original face; each LDEM grid face takes the value of
// the original face containing its centroid under g.
RemeshResult remesh_surface(const SurfaceMesh& mesh, std::span<const double> face_population,
                            const RemeshConfig& config = {});
// Population given as a function on the parameter square.
RemeshResult remesh_surface(const SurfaceMesh& mesh, const std::function<double(const Vec2&)>& population,
                            const RemeshConfig& config = {});

// Analytic test surfaces over an n x n grid.
SurfaceMesh hemisphere_mesh(int n);  // unit disk lifted onto z = sqrt(1 - r^2)
SurfaceMesh peaks_mesh(int n);       // MATLAB-style peaks height field over [-3, 3]^2, scaled by 1/6

double triangle_area_3d(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace ldem
