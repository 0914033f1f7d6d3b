#include "ldem/training.hpp"

#include <cmath>
#include <limits>

#include "ldem/error.hpp"
#include "ldem/optim.hpp"

namespace ldem {

Objective objective_2d(const TriGrid2D& grid, std::span<const double> populations, const LossWeights& weights,
                       ad::StdConvention conv) {
    if (populations.size() != grid.face_count()) throw InputError("population count does not match face count");
    return [&grid, populations, weights, conv](std::span<const ad::Var> coords) {
        return total_loss_2d(populations, coords, grid, weights, conv);
    };
}

Objective objective_3d(const TetGrid3D& grid, std::span<const double> populations, const LossWeights& weights,
                       ad::StdConvention conv) {
    if (populations.size() != grid.cell_count()) throw InputError("population count does not match cell count");
    return [&grid, populations, weights, conv](std::span<const ad::Var> coords) {
        return total_loss_3d(populations, coords, grid, weights, conv);
    };
}

double mse(std::span<const double> predicted, std::span<const double> target) {
    if (predicted.size() != target.size() || predicted.empty()) throw InputError("mse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) s += (predicted[i] - target[i]) * (predicted[i] - target[i]);
    return s / static_cast<double>(predicted.size());
}

std::vector<double> predict(const TransformModel& model, std::span<const double> population,
                            const CoordinateConstraints& constraints) {
    auto y = model.forward(population);
    constraints.apply(y);
    return y;
}

namespace {

// Runs one forward/backward pass on `tape` and returns (loss, gradient).
template <typename LossFn>
std::pair<double, std::vector<double>> evaluate(ad::Tape& tape, const TransformModel& model,
                                                std::span<const double> population,
                                                const CoordinateConstraints& constraints, LossFn&& loss_fn) {
    tape.clear();
    const auto params = ad::variables(tape, model.parameters());
    auto y = model.forward_with(std::span<const ad::Var>(params), population);
    constraints.apply(y);
    const ad::Var loss = loss_fn(std::span<const ad::Var>(y));
    return {loss.value(), tape.gradient(loss, params)};
}

bool all_finite(std::span<const double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

InitResult init_phase(TransformModel& model, std::span<const double> population, std::span<const double> target,
                      const TrainingSchedule& schedule, const CoordinateConstraints& constraints) {
    if (target.size() != model.shape().output()) throw InputError("init target length does not match model output");
    InitResult result;
    result.initial_mse = mse(predict(model, population, constraints), target);
    double best = result.initial_mse;
    std::vector<double> best_params(model.parameters().begin(), model.parameters().end());

    ad::Tape tape;
    AdamState adam(model.parameters().size());
    const double inv_count = 1.0 / static_cast<double>(target.size());
    auto mse_loss = [&](std::span<const ad::Var> y) {
        std::vector<ad::Var> sq;
        sq.reserve(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) sq.push_back(ad::square(y[i] - target[i]));
        return ad::sum(std::span<const ad::Var>(sq)) * inv_count;
    };
    for (long epoch = 0; epoch < schedule.init_epochs; ++epoch) {
        auto [loss, grad] = evaluate(tape, model, population, constraints, mse_loss);
        if (!std::isfinite(loss) || !all_finite(grad)) throw TrainingError("non-finite loss in init phase", epoch);
        if (loss < best) {
            best = loss;
            best_params.assign(model.parameters().begin(), model.parameters().end());
        }
        clip_gradients(grad, schedule.clip);
        adam_step(adam, model.parameters(), grad, schedule.init_learning_rate);
        result.epochs = epoch + 1;
    }
    const double last = mse(predict(model, population, constraints), target);
    if (!std::isfinite(last)) throw TrainingError("non-finite loss in init phase", schedule.init_epochs);
    if (last > best) std::copy(best_params.begin(), best_params.end(), model.parameters().begin());
    result.final_mse = std::min(last, best);
    return result;
}

FinetuneResult finetune_phase(TransformModel& model, std::span<const double> population, const Objective& objective,
                              const TrainingSchedule& schedule, const CoordinateConstraints& constraints) {
    FinetuneResult result;
    result.best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> best_params(model.parameters().begin(), model.parameters().end());
    double monitor_best = std::numeric_limits<double>::infinity();
    long stale = 0;

    ad::Tape tape;
    AdamState adam(model.parameters().size());
    result.loss_trace.reserve(static_cast<std::size_t>(std::max(0L, schedule.max_epochs)));
    for (long epoch = 0; epoch < schedule.max_epochs; ++epoch) {
        auto [loss, grad] = evaluate(tape, model, population, constraints, objective);
        if (!std::isfinite(loss) || !all_finite(grad)) throw TrainingError("non-finite loss in fine-tune phase", epoch);
        result.loss_trace.push_back(loss);
        result.epochs_run = epoch + 1;
        if (loss < result.best_loss) {
            result.best_loss = loss;
            result.best_epoch = epoch;
            best_params.assign(model.parameters().begin(), model.parameters().end());
        }
        if (epoch == 0 || loss < monitor_best - schedule.min_delta) {
            monitor_best = std::min(monitor_best, loss);
            stale = 0;
        } else if (epoch >= schedule.warmup) {
            ++stale;
        }
        if (schedule.patience > 0 && epoch >= schedule.warmup && stale >= schedule.patience) {
            result.stopped_early = true;
            break;
        }
        clip_gradients(grad, schedule.clip);
        adam_step(adam, model.parameters(), grad, schedule.train_learning_rate);
    }
    if (result.best_epoch >= 0) std::copy(best_params.begin(), best_params.end(), model.parameters().begin());
    return result;
}

}  // namespace ldem
