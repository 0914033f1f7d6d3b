#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldem/geometry.hpp"
#include "ldem/metrics.hpp"
#include "ldem/model.hpp"
#include "ldem/training.hpp"

namespace ldem {

struct Pipeline2DConfig {
    int d_coarse = 16;
    int d_dense = 51;
    TrainingSchedule coarse{1e-2, 800, 3e-3, 5000, 500, 1e-4, 150, 1.0, 0};
    TrainingSchedule dense{1e-2, 800, 2e-4, 300, 0, 1e-4, 0, 1.0, 0};
    std::optional<double> coarse_density_weight;  // defaults to d_coarse
    std::optional<double> dense_density_weight;   // defaults to d_dense
    double slope_weight = 1.0;
    double distance_weight = 10.0;
    std::uint64_t seed = 0;
    BoundaryMode boundary = BoundaryMode::free;
    ad::StdConvention std_convention = ad::StdConvention::population;
    std::size_t bottleneck = 1;
    std::size_t kernel = 1;
    int histogram_bins = 50;

    LossWeights coarse_weights() const;
    LossWeights dense_weights() const;
};

struct Pipeline2DResult {
    TriGrid2D coarse_grid;  // vertices hold the coarse model output
    TriGrid2D dense_grid;   // vertices hold the final dense output
    std::vector<double> coarse_population;
    std::vector<double> dense_population;
    std::vector<Vec2> transferred;  // coarse map interpolated onto the dense nodes
    InitResult coarse_init;
    FinetuneResult coarse_train;
    InitResult dense_init;
    FinetuneResult dense_train;
    QualityReport coarse_report;
    QualityReport report;
    TransformModel coarse_model;
    TransformModel dense_model;
};

// Aggregation, coarse init + training, bilinear transfer, dense init +
// fine-tuning, metrics. `dense_population` has one value per dense face.
Pipeline2DResult run_pipeline_2d(std::span<const double> dense_population, const Pipeline2DConfig& config);

struct Pipeline3DConfig {
    int d_coarse = 16;
    TrainingSchedule schedule{1e-2, 1500, 1e-4, 5000, 200, 1e-4, 150, 1.0, 0};
    double density_weight = 1.0;
    double distance_weight = 1.0;
    std::uint64_t seed = 0;
    ad::StdConvention std_convention = ad::StdConvention::population;
    std::size_t bottleneck = 1;
    std::size_t kernel = 1;
    int histogram_bins = 50;
};

struct Pipeline3DResult {
    TetGrid3D grid;  // vertices hold the model output
    std::vector<double> population;
    InitResult init;
    FinetuneResult train;
    QualityReport report;
    double initial_de_error = 0.0;
    TransformModel model;
};

// Coarse-only volumetric run: identity init, then the 3D objective.
Pipeline3DResult run_pipeline_3d(std::span<const double> population, const Pipeline3DConfig& config);

}  // namespace ldem
