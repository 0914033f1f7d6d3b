#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ldem/autodiff.hpp"
#include "ldem/geometry.hpp"
#include "ldem/losses.hpp"
#include "ldem/model.hpp"

namespace ldem {

struct TrainingSchedule {
    double init_learning_rate = 1e-2;
    long init_epochs = 800;
    double train_learning_rate = 3e-3;
    long max_epochs = 5000;
    long patience = 500;  // 0 disables early stopping
    double min_delta = 1e-4;
    long warmup = 150;  // epochs during which early stopping is disabled
    double clip = 1.0;
    std::uint64_t seed = 0;
};

struct InitResult {
    double initial_mse = 0.0;
    double final_mse = 0.0;
    long epochs = 0;
};

struct FinetuneResult {
    std::vector<double> loss_trace;  // loss evaluated at the start of each epoch
    double best_loss = 0.0;
    long best_epoch = -1;
    long epochs_run = 0;
    bool stopped_early = false;
};

// Maps flat output coordinates to a scalar training loss on the tape.
using Objective = std::function<ad::Var(std::span<const ad::Var>)>;

Objective objective_2d(const TriGrid2D& grid, std::span<const double> populations, const LossWeights& weights,
                       ad::StdConvention conv = ad::StdConvention::population);
Objective objective_3d(const TetGrid3D& grid, std::span<const double> populations, const LossWeights& weights,
                       ad::StdConvention conv = ad::StdConvention::population);

double mse(std::span<const double> predicted, std::span<const double> target);

// Fits the model output to `target` with Adam on the mean squared error over
// all coordinates. Keeps the lowest-MSE parameters seen, so the returned
// model never has a higher MSE than the starting one.
InitResult init_phase(TransformModel& model, std::span<const double> population, std::span<const double> target,
                      const TrainingSchedule& schedule, const CoordinateConstraints& constraints = {});

// Adam on `objective` with global-norm gradient clipping and early stopping
// (best loss not improved by min_delta for `patience` epochs after warm-up).
// The model is left holding the best-loss parameters seen.
FinetuneResult finetune_phase(TransformModel& model, std::span<const double> population, const Objective& objective,
                              const TrainingSchedule& schedule, const CoordinateConstraints& constraints = {});

// Model output with constraints applied.
std::vector<double> predict(const TransformModel& model, std::span<const double> population,
                            const CoordinateConstraints& constraints = {});

}  // namespace ldem
