#include "ldem/remesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "ldem/error.hpp"
#include "ldem/log.hpp"

namespace ldem {

namespace {

constexpr double inside_tolerance = 1e-12;

std::string edge_name(int a, int b) {
    std::ostringstream os;
    os << "(" << a << ", " << b << ")";
    return os.str();
}

Vec2 square_point(double t) {
    t = std::fmod(t, 4.0);
    if (t < 0.0) t += 4.0;
    if (t < 1.0) return {t, 0.0};
    if (t < 2.0) return {1.0, t - 1.0};
    if (t < 3.0) return {3.0 - t, 1.0};
    return {0.0, 4.0 - t};
}

double distance3(const Vec3& a, const Vec3& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

Vec2 closest_on_segment(const Vec2& q, const Vec2& a, const Vec2& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return {a[0] + t * dx, a[1] + t * dy};
}

double dist2(const Vec2& a, const Vec2& b) {
    return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
}

}  // namespace

double triangle_area_3d(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const Vec3 w{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    return 0.5 * std::hypot(w[0], w[1], w[2]);
}

SurfaceMesh make_surface_mesh(std::vector<Vec3> vertices, std::vector<Tri> faces) {
    const int nv = static_cast<int>(vertices.size());
    if (faces.empty()) throw InputError("surface has no faces");
    std::map<std::pair<int, int>, int> directed;
    std::vector<int> uses(vertices.size(), 0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& t = faces[f];
        for (int i = 0; i < 3; ++i) {
            if (t[i] < 0 || t[i] >= nv) throw InputError("face " + std::to_string(f) + " has an out-of-range vertex");
            ++uses[static_cast<std::size_t>(t[i])];
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw InputError("face " + std::to_string(f) + " repeats a vertex");
        for (int i = 0; i < 3; ++i) {
            const auto e = std::make_pair(t[i], t[(i + 1) % 3]);
            if (!directed.emplace(e, static_cast<int>(f)).second)
                throw InputError("edge " + edge_name(e.first, e.second) +
                                 " appears twice with the same direction (non-manifold or inconsistently oriented)");
        }
    }
    for (int v = 0; v < nv; ++v)
        if (uses[static_cast<std::size_t>(v)] == 0) throw InputError("vertex " + std::to_string(v) + " is not used");

    std::map<int, int> next;
    std::size_t boundary_edges = 0;
    for (const auto& [e, f] : directed) {
        if (directed.count({e.second, e.first})) continue;
        ++boundary_edges;
        if (!next.emplace(e.first, e.second).second)
            throw InputError("boundary is not manifold at vertex " + std::to_string(e.first));
    }
    if (boundary_edges == 0) throw InputError("surface is closed; an open surface with one boundary loop is required");

    std::vector<int> loop;
    const int start = next.begin()->first;
    int cur = start;
    do {
        loop.push_back(cur);
        const auto it = next.find(cur);
        if (it == next.end()) throw InputError("boundary loop is broken at vertex " + std::to_string(cur));
        cur = it->second;
        if (loop.size() > boundary_edges) throw InputError("boundary loop does not close");
    } while (cur != start);
    if (loop.size() != boundary_edges)
        throw InputError("surface has " + std::to_string(boundary_edges - loop.size()) +
                         " boundary edges outside the first loop; exactly one boundary loop is required");

    // connectivity through shared edges
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& [e, f] : directed) adj[static_cast<std::size_t>(e.first)].push_back(e.second);
    std::vector<char> seen(vertices.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                stack.push_back(w);
            }
    }
    if (reached != vertices.size()) throw InputError("surface is not connected");

    return {std::move(vertices), std::move(faces), std::move(loop)};
}

std::vector<Vec2> tutte_embed(const SurfaceMesh& mesh) {
    const std::size_t nv = mesh.vertices.size();
    const std::size_t nb = mesh.boundary.size();
    if (nb < 3) throw InputError("boundary loop needs at least three vertices");

    std::vector<int> incident(nv, 0);
    for (const auto& t : mesh.faces)
        for (int v : t) ++incident[static_cast<std::size_t>(v)];

    std::vector<int> loop = mesh.boundary;
    if (nb >= 4) {
        const auto ear = std::find_if(loop.begin(), loop.end(),
                                      [&](int v) { return incident[static_cast<std::size_t>(v)] == 1; });
        if (ear != loop.end()) std::rotate(loop.begin(), ear, loop.end());
    }
    std::vector<double> s(nb + 1, 0.0);
    for (std::size_t k = 0; k < nb; ++k)
        s[k + 1] = s[k] + distance3(mesh.vertices[static_cast<std::size_t>(loop[k])],
                                    mesh.vertices[static_cast<std::size_t>(loop[(k + 1) % nb])]);
    const double perimeter = s[nb];
    if (!(perimeter > 0.0)) throw DomainError("boundary loop has zero length");

    std::vector<Vec2> uv(nv, Vec2{0.0, 0.0});
    std::vector<char> on_boundary(nv, 0);
    for (int v : loop) on_boundary[static_cast<std::size_t>(v)] = 1;

    if (nb < 4) {
        for (std::size_t k = 0; k < nb; ++k) uv[static_cast<std::size_t>(loop[k])] = square_point(4.0 * s[k] / perimeter);
    } else {
        std::array<std::size_t, 5> corner{0, 0, 0, 0, nb};
        for (std::size_t c = 1; c < 4; ++c) {
            const double target = perimeter * static_cast<double>(c) / 4.0;
            const std::size_t lo = corner[c - 1] + 1, hi = nb - (4 - c);
            std::size_t best = lo, best_ear = nb;
            for (std::size_t k = lo; k <= hi; ++k) {
                if (std::abs(s[k] - target) < std::abs(s[best] - target)) best = k;
                if (incident[static_cast<std::size_t>(loop[k])] == 1 && std::abs(s[k] - target) <= perimeter / 8.0 &&
                    (best_ear == nb || std::abs(s[k] - target) < std::abs(s[best_ear] - target)))
                    best_ear = k;
            }
            corner[c] = best_ear != nb ? best_ear : best;
        }
        for (std::size_t c = 0; c < 4; ++c) {
            const double a = s[corner[c]], b = s[corner[c + 1]];
            for (std::size_t k = corner[c]; k < corner[c + 1]; ++k)
                uv[static_cast<std::size_t>(loop[k])] = square_point(static_cast<double>(c) + (s[k] - a) / (b - a));
        }
    }

    std::vector<int> interior_index(nv, -1);
    int ni = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (!on_boundary[v]) interior_index[v] = ni++;
    if (ni > 0) {
        std::vector<std::vector<int>> nbrs(nv);
        for (const auto& t : mesh.faces)
            for (int i = 0; i < 3; ++i) {
                nbrs[static_cast<std::size_t>(t[i])].push_back(t[(i + 1) % 3]);
                nbrs[static_cast<std::size_t>(t[(i + 1) % 3])].push_back(t[i]);
            }
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, 2);
        for (std::size_t v = 0; v < nv; ++v) {
            if (on_boundary[v]) continue;
            auto& nb_v = nbrs[v];
            std::sort(nb_v.begin(), nb_v.end());
            nb_v.erase(std::unique(nb_v.begin(), nb_v.end()), nb_v.end());
            const int row = interior_index[v];
            trip.emplace_back(row, row, static_cast<double>(nb_v.size()));
            for (int w : nb_v) {
                const int col = interior_index[static_cast<std::size_t>(w)];
                if (col >= 0) {
                    trip.emplace_back(row, col, -1.0);
                } else {
                    rhs(row, 0) += uv[static_cast<std::size_t>(w)][0];
                    rhs(row, 1) += uv[static_cast<std::size_t>(w)][1];
                }
            }
        }
        Eigen::SparseMatrix<double> A(ni, ni);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
        if (solver.info() != Eigen::Success) throw DomainError("Tutte system is singular");
        const Eigen::MatrixXd x = solver.solve(rhs);
        if (solver.info() != Eigen::Success) throw DomainError("Tutte solve failed");
        const double residual = (A * x - rhs).cwiseAbs().maxCoeff();
        if (!(residual < 1e-10)) throw DomainError("Tutte solve residual " + std::to_string(residual) + " too large");
        for (std::size_t v = 0; v < nv; ++v)
            if (interior_index[v] >= 0) uv[v] = {x(interior_index[v], 0), x(interior_index[v], 1)};
    }

    long bad = 0;
    std::size_t first_bad = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& t = mesh.faces[f];
        if (!(signed_area(uv[static_cast<std::size_t>(t[0])], uv[static_cast<std::size_t>(t[1])],
                          uv[static_cast<std::size_t>(t[2])]) > 0.0)) {
            if (bad++ == 0) first_bad = f;
        }
    }
    if (bad > 0)
        throw DomainError("Tutte embedding has " + std::to_string(bad) + " non-positive faces (first: face " +
                          std::to_string(first_bad) + ")");
    return uv;
}

PlanarLocator::PlanarLocator(std::span<const Vec2> vertices, std::span<const Tri> faces)
    : vertices_(vertices.begin(), vertices.end()), faces_(faces.begin(), faces.end()) {
    if (faces_.empty()) throw InputError("cannot locate points in an empty mesh");
    neighbours_.assign(faces_.size(), {-1, -1, -1});
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // edge -> (face, corner)
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& t = faces_[f];
        for (int i = 0; i < 3; ++i) {
            const int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
            const auto key = std::minmax(a, b);
            const auto it = edges.find(key);
            if (it == edges.end()) {
                edges.emplace(key, std::make_pair(static_cast<int>(f), i));
            } else {
                neighbours_[f][static_cast<std::size_t>(i)] = it->second.first;
                neighbours_[static_cast<std::size_t>(it->second.first)][static_cast<std::size_t>(it->second.second)] =
                    static_cast<int>(f);
            }
        }
    }
    lo_ = vertices_[0];
    hi_ = vertices_[0];
    for (const auto& v : vertices_)
        for (int k = 0; k < 2; ++k) {
            lo_[k] = std::min(lo_[k], v[k]);
            hi_[k] = std::max(hi_[k], v[k]);
        }
    buckets_ = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(faces_.size()) / 2.0))));
    bucket_faces_.assign(static_cast<std::size_t>(buckets_ * buckets_), {});
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        Vec2 flo = vertices_[static_cast<std::size_t>(faces_[f][0])], fhi = flo;
        for (int i = 1; i < 3; ++i)
            for (int k = 0; k < 2; ++k) {
                flo[k] = std::min(flo[k], vertices_[static_cast<std::size_t>(faces_[f][i])][k]);
                fhi[k] = std::max(fhi[k], vertices_[static_cast<std::size_t>(faces_[f][i])][k]);
            }
        const int b0 = bucket_of(flo), b1 = bucket_of(fhi);
        for (int by = b0 / buckets_; by <= b1 / buckets_; ++by)
            for (int bx = b0 % buckets_; bx <= b1 % buckets_; ++bx)
                bucket_faces_[static_cast<std::size_t>(by * buckets_ + bx)].push_back(static_cast<int>(f));
    }
}

int PlanarLocator::bucket_of(const Vec2& q) const {
    auto cell = [&](int k) {
        const double span = hi_[k] - lo_[k];
        const double t = span > 0.0 ? (q[k] - lo_[k]) / span : 0.0;
        return std::clamp(static_cast<int>(t * buckets_), 0, buckets_ - 1);
    };
    return cell(1) * buckets_ + cell(0);
}

std::array<double, 3> PlanarLocator::barycentric(int face, const Vec2& q) const {
    const auto& t = faces_[static_cast<std::size_t>(face)];
    const Vec2& a = vertices_[static_cast<std::size_t>(t[0])];
    const Vec2& b = vertices_[static_cast<std::size_t>(t[1])];
    const Vec2& c = vertices_[static_cast<std::size_t>(t[2])];
    const double area = signed_area(a, b, c);
    return {signed_area(q, b, c) / area, signed_area(a, q, c) / area, signed_area(a, b, q) / area};
}

PointLocation PlanarLocator::project(const Vec2& q) const {
    PointLocation best;
    best.inside = false;
    double best_d = std::numeric_limits<double>::infinity();
    Vec2 best_p{};
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& t = faces_[f];
        for (int i = 0; i < 3; ++i) {
            const Vec2 p = closest_on_segment(q, vertices_[static_cast<std::size_t>(t[i])],
                                              vertices_[static_cast<std::size_t>(t[(i + 1) % 3])]);
            const double d = dist2(p, q);
            if (d < best_d) {
                best_d = d;
                best_p = p;
                best.face = static_cast<int>(f);
            }
        }
    }
    auto bary = barycentric(best.face, best_p);
    double sum = 0.0;
    for (double& w : bary) sum += (w = std::max(w, 0.0));
    for (double& w : bary) w /= sum;
    best.bary = bary;
    return best;
}

PointLocation PlanarLocator::locate(const Vec2& q) const {
    const auto& seeds = bucket_faces_[static_cast<std::size_t>(bucket_of(q))];
    int cur = seeds.empty() ? 0 : seeds.front();
    for (std::size_t step = 0; step <= faces_.size(); ++step) {
        const auto bary = barycentric(cur, q);
        const auto worst = std::min_element(bary.begin(), bary.end());
        if (*worst >= -inside_tolerance) return {cur, bary, true};
        const int nxt = neighbours_[static_cast<std::size_t>(cur)][static_cast<std::size_t>(worst - bary.begin())];
        if (nxt < 0) break;
        cur = nxt;
    }
    ++fallbacks_;
    auto scan = [&](auto&& candidates) -> PointLocation {
        PointLocation best{-1, {}, true};
        double best_min = -inside_tolerance;
        for (int f : candidates) {
            const auto bary = barycentric(f, q);
            const double mn = *std::min_element(bary.begin(), bary.end());
            if (mn >= best_min) {
                best_min = mn;
                best = {f, bary, true};
            }
        }
        return best;
    };
    PointLocation hit = scan(seeds);
    if (hit.face >= 0) return hit;
    std::vector<int> all(faces_.size());
    for (std::size_t f = 0; f < all.size(); ++f) all[f] = static_cast<int>(f);
    hit = scan(all);
    if (hit.face >= 0) return hit;
    return project(q);
}

std::vector<PointLocation> inverse_map(std::span<const Vec2> vertices, std::span<const Tri> faces,
                                       std::span<const Vec2> queries) {
    const PlanarLocator locator(vertices, faces);
    std::vector<PointLocation> out;
    out.reserve(queries.size());
    std::size_t outside = 0;
    for (const auto& q : queries) {
        out.push_back(locator.locate(q));
        if (!out.back().inside) ++outside;
    }
    if (outside > 0) warn(std::to_string(outside) + " queries outside the mesh were projected to the nearest face");
    return out;
}

Vec3 interpolate(std::span<const Vec3> values, const Tri& face, const std::array<double, 3>& bary) {
    Vec3 r{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r[k] += bary[i] * values[static_cast<std::size_t>(face[i])][k];
    return r;
}

Vec2 interpolate(std::span<const Vec2> values, const Tri& face, const std::array<double, 3>& bary) {
    Vec2 r{0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 2; ++k) r[k] += bary[i] * values[static_cast<std::size_t>(face[i])][k];
    return r;
}

namespace {

RemeshResult remesh_with(const SurfaceMesh& mesh, std::vector<Vec2> uv,
                         const std::function<double(const Vec2&)>& population, const RemeshConfig& config) {
    if (config.resolution < 2) throw InvalidResolution("output resolution must be at least 2");
    RemeshResult r;
    r.tutte = std::move(uv);

    TriGrid2D dense = make_grid_2d(config.ldem.d_dense);
    r.grid_population.reserve(dense.faces.size());
    for (const auto& c : face_centroids(dense)) {
        const double p = population(c);
        if (!(p > 0.0)) throw DomainError("remesh population must be positive");
        r.grid_population.push_back(p);
    }
    r.ldem = run_pipeline_2d(r.grid_population, config.ldem);
    if (r.ldem.report.foldovers > 0)
        warn("LDEM map has " + std::to_string(r.ldem.report.foldovers) + " fold-overs; inverse is not unique");

    const TriGrid2D out = make_grid_2d(config.resolution);
    const PlanarLocator f_inv(r.ldem.dense_grid.vertices, r.ldem.dense_grid.faces);
    const PlanarLocator g_inv(r.tutte, mesh.faces);
    std::vector<Vec3> positions;
    positions.reserve(out.vertices.size());
    r.parameter.reserve(out.vertices.size());
    for (const auto& q : out.vertices) {
        const PointLocation a = f_inv.locate(q);
        const Vec2 p = interpolate(std::span<const Vec2>(r.ldem.dense_grid.reference_vertices),
                                   r.ldem.dense_grid.faces[static_cast<std::size_t>(a.face)], a.bary);
        const PointLocation b = g_inv.locate(p);
        if (!a.inside) ++r.projected_queries;
        if (!b.inside) ++r.projected_queries;
        r.parameter.push_back(p);
        positions.push_back(
            interpolate(std::span<const Vec3>(mesh.vertices), mesh.faces[static_cast<std::size_t>(b.face)], b.bary));
    }
    if (r.projected_queries > 0)
        warn(std::to_string(r.projected_queries) + " remesh queries fell outside and were projected");

    for (const auto& t : out.faces) {
        const auto i = [&](int k) { return static_cast<std::size_t>(t[static_cast<std::size_t>(k)]); };
        if (!(signed_area(r.parameter[i(0)], r.parameter[i(1)], r.parameter[i(2)]) > 0.0)) ++r.flipped_parameter_faces;
        if (!(triangle_area_3d(positions[i(0)], positions[i(1)], positions[i(2)]) > 1e-14)) ++r.degenerate_faces;
    }
    r.mesh = make_surface_mesh(std::move(positions), out.faces);
    return r;
}

}  // namespace

RemeshResult remesh_surface(const SurfaceMesh& mesh, std::span<const double> face_population,
                            const RemeshConfig& config) {
    if (face_population.size() != mesh.faces.size())
        throw InputError("population count " + std::to_string(face_population.size()) + " does not match face count " +
                         std::to_string(mesh.faces.size()));
    auto uv = tutte_embed(mesh);
    const PlanarLocator g_inv(uv, mesh.faces);
    const std::vector<double> pop(face_population.begin(), face_population.end());
    return remesh_with(mesh, std::move(uv),
                       [&](const Vec2& c) { return pop[static_cast<std::size_t>(g_inv.locate(c).face)]; }, config);
}

RemeshResult remesh_surface(const SurfaceMesh& mesh, const std::function<double(const Vec2&)>& population,
                            const RemeshConfig& config) {
    return remesh_with(mesh, tutte_embed(mesh), population, config);
}

SurfaceMesh hemisphere_mesh(int n) {
    TriGrid2D grid = make_grid_2d(n);
    std::vector<Vec3> v;
    v.reserve(grid.vertices.size());
    for (const auto& p : grid.vertices) {
        const double u = 2.0 * p[0] - 1.0, w = 2.0 * p[1] - 1.0;
        const double x = u * std::sqrt(1.0 - w * w / 2.0), y = w * std::sqrt(1.0 - u * u / 2.0);
        v.push_back({x, y, std::sqrt(std::max(0.0, 1.0 - x * x - y * y))});
    }
    return make_surface_mesh(std::move(v), grid.faces);
}

SurfaceMesh peaks_mesh(int n) {
    TriGrid2D grid = make_grid_2d(n);
    std::vector<Vec3> v;
    v.reserve(grid.vertices.size());
    for (const auto& p : grid.vertices) {
        const double x = 6.0 * p[0] - 3.0, y = 6.0 * p[1] - 3.0;
        const double z = 3.0 * (1 - x) * (1 - x) * std::exp(-x * x - (y + 1) * (y + 1)) -
                         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y) -
                         std::exp(-(x + 1) * (x + 1) - y * y) / 3.0;
        v.push_back({x / 6.0, y / 6.0, z / 6.0});
    }
    return make_surface_mesh(std::move(v), grid.faces);
}

}  // namespace ldem
