#include "ldem/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "ldem/error.hpp"

namespace ldem {

TriGrid2D make_grid_2d(int n) {
    if (n < 2) throw InvalidResolution("grid resolution must be at least 2, got " + std::to_string(n));
    TriGrid2D g;
    g.n = n;
    const double h = 1.0 / (n - 1);
    g.vertices.reserve(static_cast<std::size_t>(n) * n);
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) g.vertices.push_back({col * h, row * h});
    // Pin the far edge to exactly 1.
    for (int i = 0; i < n; ++i) {
        g.vertices[g.index(n - 1, i)][0] = 1.0;
        g.vertices[g.index(i, n - 1)][1] = 1.0;
    }
    g.faces.reserve(2 * static_cast<std::size_t>(n - 1) * (n - 1));
    for (int row = 0; row + 1 < n; ++row) {
        for (int col = 0; col + 1 < n; ++col) {
            const int k = g.index(col, row);
            g.faces.push_back({k, k + 1, k + n});
            g.faces.push_back({k + 1, k + n + 1, k + n});
        }
    }
    g.reference_vertices = g.vertices;
    return g;
}

TetGrid3D make_grid_3d(int n) {
    if (n < 2) throw InvalidResolution("grid resolution must be at least 2, got " + std::to_string(n));
    TetGrid3D g;
    g.n = n;
    const double h = 1.0 / (n - 1);
    auto coord = [&](int i) { return i == n - 1 ? 1.0 : i * h; };
    g.vertices.reserve(static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) g.vertices.push_back({coord(i), coord(j), coord(k)});

    // Kuhn subdivision: one tet per axis permutation, all sharing the main diagonal.
    static constexpr std::array<std::array<int, 3>, 6> perms = {{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
    }};
    const std::array<int, 3> stride = {1, n, n * n};
    g.cells.reserve(6 * static_cast<std::size_t>(n - 1) * (n - 1) * (n - 1));
    for (int k = 0; k + 1 < n; ++k) {
        for (int j = 0; j + 1 < n; ++j) {
            for (int i = 0; i + 1 < n; ++i) {
                const int base = g.index(i, j, k);
                for (const auto& p : perms) {
                    Tet t{base, base + stride[p[0]], base + stride[p[0]] + stride[p[1]],
                          base + stride[0] + stride[1] + stride[2]};
                    if (signed_volume(g.vertices[t[0]], g.vertices[t[1]], g.vertices[t[2]], g.vertices[t[3]]) < 0)
                        std::swap(t[2], t[3]);
                    g.cells.push_back(t);
                }
            }
        }
    }
    g.reference_vertices = g.vertices;
    return g;
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) noexcept {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) noexcept {
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    const double wx = d[0] - a[0], wy = d[1] - a[1], wz = d[2] - a[2];
    return (ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)) / 6.0;
}

namespace {

template <std::size_t K, typename P>
P mean_of(const std::array<int, K>& element, std::span<const P> positions) {
    P c{};
    for (int idx : element) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= positions.size())
            throw InputError("element references vertex " + std::to_string(idx) + " out of range [0, " +
                             std::to_string(positions.size()) + ")");
        for (std::size_t d = 0; d < c.size(); ++d) c[d] += positions[idx][d];
    }
    for (auto& v : c) v /= static_cast<double>(K);
    return c;
}

}  // namespace

Vec2 centroid(const Tri& face, std::span<const Vec2> positions) { return mean_of(face, positions); }
Vec3 centroid(const Tet& cell, std::span<const Vec3> positions) { return mean_of(cell, positions); }

std::vector<Vec2> face_centroids(const TriGrid2D& grid) {
    std::vector<Vec2> out;
    out.reserve(grid.faces.size());
    for (const auto& f : grid.faces) out.push_back(centroid(f, grid.reference_vertices));
    return out;
}

std::vector<Vec3> cell_centroids(const TetGrid3D& grid) {
    std::vector<Vec3> out;
    out.reserve(grid.cells.size());
    for (const auto& c : grid.cells) out.push_back(centroid(c, grid.reference_vertices));
    return out;
}

std::vector<double> face_areas(std::span<const Vec2> positions, std::span<const Tri> faces) {
    std::vector<double> out;
    out.reserve(faces.size());
    for (const auto& f : faces) out.push_back(signed_area(positions[f[0]], positions[f[1]], positions[f[2]]));
    return out;
}

std::vector<double> cell_volumes(std::span<const Vec3> positions, std::span<const Tet> cells) {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& c : cells)
        out.push_back(signed_volume(positions[c[0]], positions[c[1]], positions[c[2]], positions[c[3]]));
    return out;
}

std::vector<double> flatten(std::span<const Vec2> points) {
    std::vector<double> out;
    out.reserve(points.size() * 2);
    for (const auto& p : points) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<double> flatten(std::span<const Vec3> points) {
    std::vector<double> out;
    out.reserve(points.size() * 3);
    for (const auto& p : points) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<Vec2> unflatten2(std::span<const double> coords) {
    if (coords.size() % 2 != 0) throw InputError("coordinate count is not a multiple of 2");
    std::vector<Vec2> out(coords.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {coords[2 * i], coords[2 * i + 1]};
    return out;
}

std::vector<Vec3> unflatten3(std::span<const double> coords) {
    if (coords.size() % 3 != 0) throw InputError("coordinate count is not a multiple of 3");
    std::vector<Vec3> out(coords.size() / 3);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]};
    return out;
}

std::vector<Tri> boundary_faces(std::span<const Tet> cells) {
    // Outward faces of a positively oriented tet (a, b, c, d).
    std::map<std::array<int, 3>, std::pair<Tri, int>> seen;
    for (const auto& t : cells) {
        const std::array<Tri, 4> faces = {{{t[0], t[2], t[1]}, {t[0], t[1], t[3]}, {t[0], t[3], t[2]}, {t[1], t[2], t[3]}}};
        for (const auto& f : faces) {
            std::array<int, 3> key = f;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = seen.try_emplace(key, f, 0);
            ++it->second.second;
        }
    }
    std::vector<Tri> out;
    for (const auto& [key, entry] : seen)
        if (entry.second == 1) out.push_back(entry.first);
    return out;
}

namespace {

template <typename P>
void write_obj_impl(std::ostream& out, std::span<const P> vertices, std::span<const Tri> faces) {
    out << std::setprecision(17);
    for (const auto& v : vertices) {
        out << 'v';
        for (double c : v) out << ' ' << c;
        if constexpr (std::tuple_size_v<P> == 2) out << " 0";
        out << '\n';
    }
    for (const auto& f : faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

template <typename P>
void write_obj_file_impl(const std::string& path, std::span<const P> vertices, std::span<const Tri> faces) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    write_obj_impl(out, vertices, faces);
}

}  // namespace

void write_obj(std::ostream& out, std::span<const Vec2> vertices, std::span<const Tri> faces) {
    write_obj_impl(out, vertices, faces);
}
void write_obj(std::ostream& out, std::span<const Vec3> vertices, std::span<const Tri> faces) {
    write_obj_impl(out, vertices, faces);
}
void write_obj_file(const std::string& path, std::span<const Vec2> vertices, std::span<const Tri> faces) {
    write_obj_file_impl(path, vertices, faces);
}
void write_obj_file(const std::string& path, std::span<const Vec3> vertices, std::span<const Tri> faces) {
    write_obj_file_impl(path, vertices, faces);
}

void write_element_file(const std::string& path, std::span<const Tet> cells) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    for (const auto& c : cells) out << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
}

ObjMesh read_obj(std::istream& in) {
    ObjMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v{};
            if (!(ls >> v[0] >> v[1])) throw InputError("malformed vertex on OBJ line " + std::to_string(line_no));
            if (!(ls >> v[2])) v[2] = 0.0;
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // "i", "i/t", "i/t/n", "i//n"
                const int raw = std::stoi(tok.substr(0, tok.find('/')));
                const int resolved = raw < 0 ? static_cast<int>(mesh.vertices.size()) + raw : raw - 1;
                idx.push_back(resolved);
            }
            if (idx.size() < 3) throw InputError("face with fewer than 3 vertices on OBJ line " + std::to_string(line_no));
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    for (const auto& f : mesh.faces)
        for (int i : f)
            if (i < 0 || static_cast<std::size_t>(i) >= mesh.vertices.size())
                throw InputError("OBJ face references missing vertex " + std::to_string(i + 1));
    return mesh;
}

ObjMesh read_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_obj(in);
}

}  // namespace ldem
