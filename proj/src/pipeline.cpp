#include "ldem/pipeline.hpp"

#include "ldem/error.hpp"
#include "ldem/hierarchy.hpp"

namespace ldem {

LossWeights Pipeline2DConfig::coarse_weights() const {
    return {coarse_density_weight.value_or(static_cast<double>(d_coarse)), slope_weight, distance_weight};
}

LossWeights Pipeline2DConfig::dense_weights() const {
    return {dense_density_weight.value_or(static_cast<double>(d_dense)), slope_weight, distance_weight};
}

namespace {

// Independent, reproducible seeds for the two models.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Pipeline2DResult run_pipeline_2d(std::span<const double> dense_population, const Pipeline2DConfig& config) {
    if (config.d_coarse < 2 || config.d_dense < 2) throw InvalidResolution("grid resolutions must be at least 2");
    if (config.d_coarse >= config.d_dense) throw InvalidResolution("d_coarse must be smaller than d_dense");
    Pipeline2DResult r;
    r.coarse_grid = make_grid_2d(config.d_coarse);
    r.dense_grid = make_grid_2d(config.d_dense);
    if (dense_population.size() != r.dense_grid.face_count())
        throw InputError("dense population has " + std::to_string(dense_population.size()) + " values, expected " +
                         std::to_string(r.dense_grid.face_count()));
    r.dense_population.assign(dense_population.begin(), dense_population.end());
    r.coarse_population = aggregate_to_coarse(r.dense_grid, r.dense_population, r.coarse_grid);

    // Coarse stage.
    const auto coarse_constraints = boundary_constraints(r.coarse_grid, config.boundary);
    r.coarse_model = TransformModel(shape_for(r.coarse_grid, config.bottleneck, config.kernel),
                                    derive_seed(config.seed, 0));
    const auto coarse_identity = flatten(std::span<const Vec2>(r.coarse_grid.reference_vertices));
    r.coarse_init = init_phase(r.coarse_model, r.coarse_population, coarse_identity, config.coarse, coarse_constraints);
    r.coarse_train = finetune_phase(
        r.coarse_model, r.coarse_population,
        objective_2d(r.coarse_grid, r.coarse_population, config.coarse_weights(), config.std_convention),
        config.coarse, coarse_constraints);
    r.coarse_grid.vertices = unflatten2(predict(r.coarse_model, r.coarse_population, coarse_constraints));
    r.coarse_report = quality_report_2d(r.coarse_grid.reference_vertices, r.coarse_grid.vertices,
                                        r.coarse_grid.faces, r.coarse_population, config.histogram_bins,
                                        config.std_convention);

    // Coarse-to-dense transfer.
    r.transferred = bilinear_transfer(config.d_coarse, r.coarse_grid.vertices, r.dense_grid.reference_vertices);

    // Dense stage.
    const auto dense_constraints = boundary_constraints(r.dense_grid, config.boundary);
    r.dense_model = TransformModel(shape_for(r.dense_grid, config.bottleneck, config.kernel),
                                   derive_seed(config.seed, 1));
    const auto dense_target = flatten(std::span<const Vec2>(r.transferred));
    r.dense_init = init_phase(r.dense_model, r.dense_population, dense_target, config.dense, dense_constraints);
    r.dense_train = finetune_phase(
        r.dense_model, r.dense_population,
        objective_2d(r.dense_grid, r.dense_population, config.dense_weights(), config.std_convention), config.dense,
        dense_constraints);
    r.dense_grid.vertices = unflatten2(predict(r.dense_model, r.dense_population, dense_constraints));
    r.report = quality_report_2d(r.dense_grid.reference_vertices, r.dense_grid.vertices, r.dense_grid.faces,
                                 r.dense_population, config.histogram_bins, config.std_convention);
    return r;
}

Pipeline3DResult run_pipeline_3d(std::span<const double> population, const Pipeline3DConfig& config) {
    Pipeline3DResult r;
    r.grid = make_grid_3d(config.d_coarse);
    if (population.size() != r.grid.cell_count())
        throw InputError("population has " + std::to_string(population.size()) + " values, expected " +
                         std::to_string(r.grid.cell_count()));
    r.population.assign(population.begin(), population.end());
    r.initial_de_error = de_error(r.population, cell_volumes(r.grid.reference_vertices, r.grid.cells),
                                  config.std_convention);
    r.model = TransformModel(shape_for(r.grid, config.bottleneck, config.kernel), derive_seed(config.seed, 0));
    const auto identity = flatten(std::span<const Vec3>(r.grid.reference_vertices));
    r.init = init_phase(r.model, r.population, identity, config.schedule);
    const LossWeights weights{config.density_weight, 0.0, config.distance_weight};
    r.train = finetune_phase(r.model, r.population,
                             objective_3d(r.grid, r.population, weights, config.std_convention), config.schedule);
    r.grid.vertices = unflatten3(predict(r.model, r.population));
    r.report = quality_report_3d(r.grid.reference_vertices, r.grid.vertices, r.grid.cells, r.population,
                                 config.histogram_bins, config.std_convention);
    return r;
}

}  // namespace ldem
