#include "ldem/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "ldem/error.hpp"
#include "ldem/log.hpp"

namespace ldem {

namespace {

struct Cell {
    int i0, j0;
    double tx, ty;
};

Cell locate(int m, const Vec2& q) {
    const double s = static_cast<double>(m - 1);
    const double x = std::clamp(q[0], 0.0, 1.0) * s;
    const double y = std::clamp(q[1], 0.0, 1.0) * s;
    const int i0 = std::min(static_cast<int>(x), m - 2);
    const int j0 = std::min(static_cast<int>(y), m - 2);
    return {i0, j0, x - i0, y - j0};
}

double trapezoid_weight(int m, int i, int j) {
    const double wx = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == m - 1) ? 0.5 : 1.0;
    return wx * wy;
}

int mirror(int k, int m) {
    if (k < 0) return -k;
    if (k >= m) return 2 * (m - 1) - k;
    return k;
}

}  // namespace

double DiffusionState::total_mass() const {
    double s = 0.0;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) s += trapezoid_weight(m, i, j) * rho[static_cast<std::size_t>(j * m + i)];
    return s * h * h;
}

double DiffusionState::uniformity() const {
    double mean = 0.0;
    for (double r : rho) mean += r;
    mean /= static_cast<double>(rho.size());
    double var = 0.0;
    for (double r : rho) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rho.size());
    return std::sqrt(var) / mean;
}

double stability_bound(int m) {
    const double h = 1.0 / (m - 1);
    return h * h / 4.0;
}

std::vector<double> rasterize_population(const TriGrid2D& grid, std::span<const double> populations, int m) {
    if (m < 2) throw InvalidResolution("raster resolution must be at least 2");
    if (populations.size() != grid.faces.size()) throw InputError("population count does not match face count");
    std::vector<double> mass(static_cast<std::size_t>(m * m), 0.0), area(mass.size(), 0.0);
    const auto& v = grid.reference_vertices;
    for (std::size_t f = 0; f < grid.faces.size(); ++f) {
        const auto& t = grid.faces[f];
        const Vec2 c{(v[t[0]][0] + v[t[1]][0] + v[t[2]][0]) / 3.0, (v[t[0]][1] + v[t[1]][1] + v[t[2]][1]) / 3.0};
        const double a = std::abs(signed_area(v[t[0]], v[t[1]], v[t[2]]));
        const Cell cell = locate(m, c);
        const double w[4] = {(1 - cell.tx) * (1 - cell.ty), cell.tx * (1 - cell.ty), (1 - cell.tx) * cell.ty,
                             cell.tx * cell.ty};
        const int idx[4] = {cell.j0 * m + cell.i0, cell.j0 * m + cell.i0 + 1, (cell.j0 + 1) * m + cell.i0,
                            (cell.j0 + 1) * m + cell.i0 + 1};
        for (int k = 0; k < 4; ++k) {
            mass[static_cast<std::size_t>(idx[k])] += w[k] * populations[f];
            area[static_cast<std::size_t>(idx[k])] += w[k] * a;
        }
    }
    std::vector<double> rho(mass.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (area[k] <= 0.0) throw InputError("raster node receives no face; raster finer than the mesh");
        rho[k] = mass[k] / area[k];
    }
    return rho;
}

DiffusionState make_diffusion_state(const TriGrid2D& grid, std::span<const double> populations, int m, double dt) {
    if (!(dt > 0.0)) throw InputError("time step must be positive");
    for (double p : populations)
        if (!(p > 0.0)) throw DomainError("diffusion requires strictly positive populations");
    DiffusionState s;
    s.m = m;
    s.h = 1.0 / (m - 1);
    s.dt = dt;
    s.rho = rasterize_population(grid, populations, m);
    s.positions = grid.vertices;
    return s;
}

Vec2 node_velocity(const DiffusionState& s, int i, int j) {
    const int m = s.m;
    auto at = [&](int a, int b) { return s.rho[static_cast<std::size_t>(mirror(b, m) * m + mirror(a, m))]; };
    const double r = at(i, j);
    const double gx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * s.h);
    const double gy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * s.h);
    return {-gx / r, -gy / r};
}

void diffusion_step(DiffusionState& s) {
    const int m = s.m;
    if (s.dt > stability_bound(m) && !s.stability_warned) {
        std::ostringstream os;
        os << "diffusion time step " << s.dt << " exceeds the explicit stability bound " << stability_bound(m);
        warn(os.str());
        s.stability_warned = true;
    }
    std::vector<Vec2> vel(static_cast<std::size_t>(m * m));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) vel[static_cast<std::size_t>(j * m + i)] = node_velocity(s, i, j);
    for (auto& p : s.positions) {
        const Cell c = locate(m, p);
        const Vec2& a = vel[static_cast<std::size_t>(c.j0 * m + c.i0)];
        const Vec2& b = vel[static_cast<std::size_t>(c.j0 * m + c.i0 + 1)];
        const Vec2& d = vel[static_cast<std::size_t>((c.j0 + 1) * m + c.i0)];
        const Vec2& e = vel[static_cast<std::size_t>((c.j0 + 1) * m + c.i0 + 1)];
        for (int k = 0; k < 2; ++k) {
            const double u = (1 - c.tx) * (1 - c.ty) * a[k] + c.tx * (1 - c.ty) * b[k] + (1 - c.tx) * c.ty * d[k] +
                             c.tx * c.ty * e[k];
            p[k] += s.dt * u;
        }
    }
    const double r = s.dt / (s.h * s.h);
    std::vector<double> next(s.rho.size());
    auto at = [&](int a, int b) { return s.rho[static_cast<std::size_t>(mirror(b, m) * m + mirror(a, m))]; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            next[static_cast<std::size_t>(j * m + i)] =
                at(i, j) + r * (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j));
    s.rho = std::move(next);
    ++s.iteration;
}

DiffusionConfig diffusion_preset(const std::string& name) {
    DiffusionConfig c;
    if (name == "default") return c;
    if (name == "large_step") {
        c.step_factor = 1.0;
        return c;
    }
    if (name == "reduced") {
        c.dt = 5e-5;
        return c;
    }
    throw InputError("unknown diffusion preset '" + name + "'");
}

const std::vector<std::string>& diffusion_preset_names() {
    static const std::vector<std::string> names = {"default", "large_step", "reduced"};
    return names;
}

DiffusionResult run_diffusion(const TriGrid2D& grid, std::span<const double> populations,
                              const DiffusionConfig& config) {
    const int m = config.raster > 0 ? config.raster : grid.n;
    const double dt = config.dt > 0.0 ? config.dt : config.step_factor * stability_bound(m);
    DiffusionState s = make_diffusion_state(grid, populations, m, dt);
    bool converged = s.uniformity() < config.tolerance;
    while (!converged && s.iteration < config.max_iterations) {
        diffusion_step(s);
        for (std::size_t k = 0; k < s.positions.size(); ++k) {
            const auto& p = s.positions[k];
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || std::abs(p[0]) > config.divergence_bound ||
                std::abs(p[1]) > config.divergence_bound) {
                std::ostringstream os;
                os << "diffusion diverged at iteration " << s.iteration << ": vertex " << k << " at (" << p[0] << ", "
                   << p[1] << "), dt " << dt << ", raster std/mean " << s.uniformity();
                throw DivergenceError(os.str());
            }
        }
        const auto low = std::min_element(s.rho.begin(), s.rho.end());
        if (!(*low > 0.0) || !std::isfinite(s.uniformity())) {
            std::ostringstream os;
            os << "diffusion diverged at iteration " << s.iteration << ": raster node "
               << std::distance(s.rho.begin(), low) << " has density " << *low << ", dt " << dt;
            throw DivergenceError(os.str());
        }
        converged = s.uniformity() < config.tolerance;
    }
    DiffusionResult out;
    out.report = quality_report_2d(grid.reference_vertices, s.positions, grid.faces, populations,
                                   config.histogram_bins);
    out.positions = std::move(s.positions);
    out.iterations = s.iteration;
    out.converged = converged;
    out.dt = dt;
    out.final_uniformity = s.uniformity();
    return out;
}

}  // namespace ldem
