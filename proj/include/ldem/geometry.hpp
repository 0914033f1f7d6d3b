#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ldem {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Tri = std::array<int, 3>;
using Tet = std::array<int, 4>;

// Regular triangulation of the unit square with n vertices per side.
// Vertex (col, row) has index row * n + col and position (col, row) / (n - 1).
struct TriGrid2D {
    int n = 0;
    std::vector<Vec2> vertices;
    std::vector<Tri> faces;
    std::vector<Vec2> reference_vertices;

    std::size_t vertex_count() const noexcept { return vertices.size(); }
    std::size_t face_count() const noexcept { return faces.size(); }
    int index(int col, int row) const noexcept { return row * n + col; }
};

// Kuhn-subdivided unit cube, n vertices per side, x fastest then y then z.
struct TetGrid3D {
    int n = 0;
    std::vector<Vec3> vertices;
    std::vector<Tet> cells;
    std::vector<Vec3> reference_vertices;

    std::size_t vertex_count() const noexcept { return vertices.size(); }
    std::size_t cell_count() const noexcept { return cells.size(); }
    int index(int i, int j, int k) const noexcept { return (k * n + j) * n + i; }
};

TriGrid2D make_grid_2d(int n);
TetGrid3D make_grid_3d(int n);

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) noexcept;
double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) noexcept;

Vec2 centroid(const Tri& face, std::span<const Vec2> positions);
Vec3 centroid(const Tet& cell, std::span<const Vec3> positions);

std::vector<Vec2> face_centroids(const TriGrid2D& grid);
std::vector<Vec3> cell_centroids(const TetGrid3D& grid);

std::vector<double> face_areas(std::span<const Vec2> positions, std::span<const Tri> faces);
std::vector<double> cell_volumes(std::span<const Vec3> positions, std::span<const Tet> cells);

// Flattened (x0, y0, x1, y1, ...) coordinates and the inverse.
std::vector<double> flatten(std::span<const Vec2> points);
std::vector<double> flatten(std::span<const Vec3> points);
std::vector<Vec2> unflatten2(std::span<const double> coords);
std::vector<Vec3> unflatten3(std::span<const double> coords);

// Triangles bounding the tetrahedralization (each listed once, outward facing).
std::vector<Tri> boundary_faces(std::span<const Tet> cells);

void write_obj(std::ostream& out, std::span<const Vec2> vertices, std::span<const Tri> faces);
void write_obj(std::ostream& out, std::span<const Vec3> vertices, std::span<const Tri> faces);
void write_obj_file(const std::string& path, std::span<const Vec2> vertices, std::span<const Tri> faces);
void write_obj_file(const std::string& path, std::span<const Vec3> vertices, std::span<const Tri> faces);
// One 0-based "a b c d" line per cell.
void write_element_file(const std::string& path, std::span<const Tet> cells);

struct ObjMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> faces;
};
// Reads v/f records; polygons with more than three vertices are fanned.
ObjMesh read_obj(std::istream& in);
ObjMesh read_obj_file(const std::string& path);

}  // namespace ldem
