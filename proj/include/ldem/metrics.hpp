#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ldem/autodiff.hpp"
#include "ldem/geometry.hpp"

namespace ldem {

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<long> initial;
    std::vector<long> final;
};

struct QualityReport {
    int dimension = 2;
    std::vector<double> bc_abs;     // per-face |mu| (2D only)
    std::vector<double> densities;  // final per-element density
    double bc_mean = 0.0;
    double bc_max = 0.0;
    double de_error = 0.0;
    long foldovers = 0;  // elements with non-positive signed measure
    Histogram histogram;
};

// Beltrami coefficient of the per-face affine map from reference to deformed
// positions. Faces with |f_z| < 1e-14 get mu = +inf.
std::vector<std::complex<double>> beltrami_per_face(std::span<const Vec2> reference, std::span<const Vec2> deformed,
                                                    std::span<const Tri> faces);

// std(rho) / mean(rho), rho = population / measure. Same formula as the density loss.
double de_error(std::span<const double> populations, std::span<const double> measures,
                ad::StdConvention conv = ad::StdConvention::population);

// Histograms of rho / mean(rho) for the initial and final measures over
// shared uniform edges on [0, max(2, observed max)].
Histogram density_histogram(std::span<const double> populations, std::span<const double> initial_measures,
                            std::span<const double> final_measures, int bins = 50);

QualityReport quality_report_2d(std::span<const Vec2> reference, std::span<const Vec2> deformed,
                                std::span<const Tri> faces, std::span<const double> populations, int bins = 50,
                                ad::StdConvention conv = ad::StdConvention::population);
QualityReport quality_report_3d(std::span<const Vec3> reference, std::span<const Vec3> deformed,
                                std::span<const Tet> cells, std::span<const double> populations, int bins = 50,
                                ad::StdConvention conv = ad::StdConvention::population);

struct BijectivityResult {
    bool bijective = false;
    std::string diagnostics;
};

// 2D: BC-max < 1 and no fold-overs. 3D: every signed volume positive.
BijectivityResult bijectivity_check(const QualityReport& report);

}  // namespace ldem
