#include "ldem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldem/error.hpp"
#include "ldem/losses.hpp"

namespace ldem {

std::vector<std::complex<double>> beltrami_per_face(std::span<const Vec2> reference, std::span<const Vec2> deformed,
                                                    std::span<const Tri> faces) {
    if (reference.size() != deformed.size()) throw InputError("reference and deformed vertex counts differ");
    std::vector<std::complex<double>> mu;
    mu.reserve(faces.size());
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Tri& f = faces[fi];
        const Vec2 &p0 = reference[f[0]], &p1 = reference[f[1]], &p2 = reference[f[2]];
        const Vec2 &q0 = deformed[f[0]], &q1 = deformed[f[1]], &q2 = deformed[f[2]];
        // Reference edge matrix E = [p1 - p0, p2 - p0]; J = D E^{-1} = D adj(E) / det(E).
        // mu is a ratio, so the adjugate is used directly: identity maps give exactly 0.
        const double e00 = p1[0] - p0[0], e01 = p2[0] - p0[0];
        const double e10 = p1[1] - p0[1], e11 = p2[1] - p0[1];
        const double det = e00 * e11 - e01 * e10;
        if (std::abs(det) < 1e-300) throw DomainError("degenerate reference face " + std::to_string(fi));
        const double a00 = e11, a01 = -e01, a10 = -e10, a11 = e00;
        const double d00 = q1[0] - q0[0], d01 = q2[0] - q0[0];
        const double d10 = q1[1] - q0[1], d11 = q2[1] - q0[1];
        const double j00 = d00 * a00 + d01 * a10, j01 = d00 * a01 + d01 * a11;
        const double j10 = d10 * a00 + d11 * a10, j11 = d10 * a01 + d11 * a11;
        const std::complex<double> fz(0.5 * (j00 + j11), 0.5 * (j10 - j01));
        const std::complex<double> fzbar(0.5 * (j00 - j11), 0.5 * (j10 + j01));
        if (std::abs(fz) < 1e-14 * std::abs(det))
            mu.emplace_back(std::numeric_limits<double>::infinity(), 0.0);
        else
            mu.push_back(fzbar / fz);
    }
    return mu;
}

double de_error(std::span<const double> populations, std::span<const double> measures, ad::StdConvention conv) {
    return density_uniformity(populations, measures, conv);
}

Histogram density_histogram(std::span<const double> populations, std::span<const double> initial_measures,
                            std::span<const double> final_measures, int bins) {
    if (bins < 1) throw InputError("histogram needs at least one bin");
    auto normalised = [&](std::span<const double> measures) {
        std::vector<double> rho(measures.size());
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = populations[i] / measures[i];
        const double m = ad::mean(std::span<const double>(rho));
        for (double& r : rho) r /= m;
        return rho;
    };
    const auto a = normalised(initial_measures);
    const auto b = normalised(final_measures);
    double hi = 2.0;
    for (double v : a)
        if (std::isfinite(v)) hi = std::max(hi, v);
    for (double v : b)
        if (std::isfinite(v)) hi = std::max(hi, v);
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int k = 0; k <= bins; ++k) h.edges[k] = hi * k / bins;
    auto count = [&](const std::vector<double>& vals) {
        std::vector<long> c(static_cast<std::size_t>(bins), 0);
        for (double v : vals) {
            // Values outside [0, hi] (negative densities of inverted elements) go to the end bins.
            int k = std::isfinite(v) ? static_cast<int>(std::floor(v / hi * bins)) : bins - 1;
            c[static_cast<std::size_t>(std::clamp(k, 0, bins - 1))] += 1;
        }
        return c;
    };
    h.initial = count(a);
    h.final = count(b);
    return h;
}

QualityReport quality_report_2d(std::span<const Vec2> reference, std::span<const Vec2> deformed,
                                std::span<const Tri> faces, std::span<const double> populations, int bins,
                                ad::StdConvention conv) {
    if (populations.size() != faces.size()) throw InputError("population count does not match face count");
    QualityReport r;
    r.dimension = 2;
    const auto mu = beltrami_per_face(reference, deformed, faces);
    r.bc_abs.reserve(mu.size());
    double total = 0.0;
    for (const auto& m : mu) {
        const double a = std::abs(m);
        r.bc_abs.push_back(a);
        total += a;
        r.bc_max = std::max(r.bc_max, a);
    }
    r.bc_mean = faces.empty() ? 0.0 : total / static_cast<double>(faces.size());
    const auto initial = face_areas(reference, faces);
    const auto final = face_areas(deformed, faces);
    for (double a : final)
        if (!(a > 0.0)) ++r.foldovers;
    r.de_error = de_error(populations, final, conv);
    r.densities.resize(final.size());
    for (std::size_t i = 0; i < final.size(); ++i) r.densities[i] = populations[i] / final[i];
    r.histogram = density_histogram(populations, initial, final, bins);
    return r;
}

QualityReport quality_report_3d(std::span<const Vec3> reference, std::span<const Vec3> deformed,
                                std::span<const Tet> cells, std::span<const double> populations, int bins,
                                ad::StdConvention conv) {
    if (populations.size() != cells.size()) throw InputError("population count does not match cell count");
    QualityReport r;
    r.dimension = 3;
    r.bc_mean = std::numeric_limits<double>::quiet_NaN();
    r.bc_max = std::numeric_limits<double>::quiet_NaN();
    const auto initial = cell_volumes(reference, cells);
    const auto final = cell_volumes(deformed, cells);
    for (double v : final)
        if (!(v > 0.0)) ++r.foldovers;
    r.de_error = de_error(populations, final, conv);
    r.densities.resize(final.size());
    for (std::size_t i = 0; i < final.size(); ++i) r.densities[i] = populations[i] / final[i];
    r.histogram = density_histogram(populations, initial, final, bins);
    return r;
}

BijectivityResult bijectivity_check(const QualityReport& report) {
    std::ostringstream msg;
    if (report.dimension == 3) {
        const bool ok = report.foldovers == 0;
        msg << (ok ? "all cell volumes positive" : std::to_string(report.foldovers) + " inverted or degenerate cells");
        return {ok, msg.str()};
    }
    const bool ok = report.bc_max < 1.0 && report.foldovers == 0;
    msg << "BC-max " << report.bc_max << (report.bc_max < 1.0 ? " < 1" : " >= 1") << ", " << report.foldovers
        << " fold-overs";
    return {ok, msg.str()};
}

}  // namespace ldem
