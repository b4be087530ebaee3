#include "featlearn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "featlearn/rng.hpp"

namespace featlearn::trainer {

using epls::Gradients;
using epls::Inhibitor;
using epls::SparseTarget;
using network::Nonlinearity;

namespace {

constexpr double kRateEpsilon = 1e-8;
constexpr uint64_t kShuffleStream = 0x5f75666c65ULL;  // distinct from init draws
constexpr uint64_t kPatchStream = 0x70617463ULL;

void resolve_schedule(const TrainSchedule& schedule, const LayerSpec& layer, int* max_epochs,
                      int* batch0) {
    if (schedule.total_patches < 1)
        throw DataError("invalid-schedule", "total patch count must be positive");
    if (schedule.min_epochs < 1)
        throw DataError("invalid-schedule", "min epochs must be positive");
    *max_epochs = schedule.max_epochs > 0 ? schedule.max_epochs
                                          : std::max(schedule.min_epochs, layer.outputs);
    if (schedule.min_epochs > *max_epochs)
        throw DataError("invalid-schedule", "min epochs exceeds max epochs");
    const int n = schedule.total_patches;
    int b = schedule.initial_batch > 0
                ? schedule.initial_batch
                : static_cast<int>(std::lround(static_cast<double>(n) / layer.outputs));
    *batch0 = std::clamp(b, 1, n);
    if (schedule.stop_threshold <= 0.0 || schedule.learning_rate <= 0.0 ||
        schedule.ema_decay <= 0.0 || schedule.ema_decay >= 1.0 || schedule.init_std <= 0.0)
        throw DataError("invalid-schedule", "schedule constants out of range");
}

/// Forward pass for a row range of the (shuffled) patch set.
void forward_batch(const PatchMatrix& patches, const std::vector<int>& order, int begin, int end,
                   const FilterBank& params, Nonlinearity kind, Matrix* inputs, Matrix* preacts,
                   Matrix* outputs) {
    const int rows = end - begin;
    const int dim = patches.cols;
    const int n_h = params.outputs();
    *inputs = Matrix(rows, dim);
    *preacts = Matrix(rows, n_h);
    *outputs = Matrix(rows, n_h);
    for (int i = 0; i < rows; ++i) {
        const double* src = patches.row(order[begin + i]);
        std::memcpy(inputs->row(i), src, sizeof(double) * dim);
        double* z = preacts->row(i);
        double* h = outputs->row(i);
        for (int k = 0; k < n_h; ++k) {
            const double* w = params.weights.row(k);
            double acc = params.biases[k];
            for (int j = 0; j < dim; ++j) acc += w[j] * src[j];
            z[k] = acc;
            h[k] = network::apply_scalar(acc, kind);
        }
    }
}

}  // namespace

FilterBank init_params(const LayerSpec& layer, int input_dim, const TrainSchedule& schedule) {
    if (input_dim < 1)
        throw DataError("invalid-argument", "input dimensionality must be positive");
    FilterBank bank;
    bank.receptive_field = layer.receptive_field;
    bank.weights = Matrix(layer.outputs, input_dim);
    bank.biases.assign(static_cast<size_t>(layer.outputs), 0.0);
    Rng rng(schedule.seed);
    for (double& w : bank.weights.data) w = schedule.init_std * rng.gaussian();
    for (double& b : bank.biases) b = schedule.init_std * rng.gaussian();
    return bank;
}

namespace {

double update_params(double* params, const double* grads, double* g_ema, double* v_ema, size_t n,
                     double rho, double eta0) {
    double rate_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        g_ema[i] = rho * g_ema[i] + (1.0 - rho) * g;
        v_ema[i] = rho * v_ema[i] + (1.0 - rho) * g * g;
        double rate = eta0 * (g_ema[i] * g_ema[i]) / (v_ema[i] + kRateEpsilon);
        rate = std::clamp(rate, 0.0, eta0);
        params[i] -= rate * g;
        rate_sum += rate;
    }
    return rate_sum;
}

}  // namespace

double sgd_update(FilterBank& params, const Gradients& grads, SgdState& state,
                  const TrainSchedule& schedule) {
    const size_t nw = params.weights.data.size();
    const size_t nb = params.biases.size();
    if (grads.weights.data.size() != nw || grads.biases.size() != nb)
        throw DataError("dimension-mismatch", "gradient shape does not match parameters");
    if (state.weight_g.empty()) {
        state.weight_g.assign(nw, 0.0);
        state.weight_v.assign(nw, 0.0);
        state.bias_g.assign(nb, 0.0);
        state.bias_v.assign(nb, 0.0);
    }
    double rate_sum = update_params(params.weights.data.data(), grads.weights.data.data(),
                                    state.weight_g.data(), state.weight_v.data(), nw,
                                    schedule.ema_decay, schedule.learning_rate);
    rate_sum += update_params(params.biases.data(), grads.biases.data(), state.bias_g.data(),
                              state.bias_v.data(), nb, schedule.ema_decay, schedule.learning_rate);
    return rate_sum / static_cast<double>(nw + nb);
}

std::pair<FilterBank, std::vector<EpochReport>> pretrain_layer(const PatchMatrix& patches,
                                                               const LayerSpec& layer,
                                                               const TrainSchedule& schedule) {
    if (patches.rows != schedule.total_patches)
        throw DataError("invalid-schedule", "patch matrix row count must equal the schedule budget");
    if (layer.receptive_field >= 1 && patches.cols % (layer.receptive_field * layer.receptive_field) != 0)
        throw DataError("patch-dim-mismatch",
                        "patch dimensionality " + std::to_string(patches.cols) +
                            " is not r*r*channels for r = " + std::to_string(layer.receptive_field));
    int max_epochs = 0, batch_size = 0;
    resolve_schedule(schedule, layer, &max_epochs, &batch_size);

    const int n = patches.rows;
    const int n_h = layer.outputs;
    const Nonlinearity kind = layer.train_nonlinearity;

    FilterBank params = init_params(layer, patches.cols, schedule);
    SgdState state;
    Inhibitor inhibitor(n_h, n);
    Rng shuffle_rng(derive_seed(schedule.seed, kShuffleStream));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochReport> reports;
    Matrix inputs, preacts, outputs;
    double prev_error = 0.0;

    for (int epoch = 1; epoch <= max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        inhibitor.reset();

        double error_sum = 0.0;
        double rate_sum = 0.0;
        int updates = 0;
        for (int begin = 0; begin < n; begin += batch_size) {
            const int end = std::min(begin + batch_size, n);
            forward_batch(patches, order, begin, end, params, kind, &inputs, &preacts, &outputs);
            SparseTarget target = epls::build_target(outputs, inhibitor, kind);
            error_sum += epls::epls_loss(outputs, target);
            const Gradients grads = epls::loss_gradient(inputs, preacts, outputs, target, kind);
            rate_sum += sgd_update(params, grads, state, schedule);
            ++updates;
        }
        if (!std::isfinite(error_sum))
            throw NumericError("training-diverged", "epoch error is not finite");

        EpochReport report;
        report.epoch = epoch;
        report.mean_error = error_sum / n;
        report.batch_size = batch_size;
        report.mean_rate = updates > 0 ? rate_sum / updates : 0.0;
        report.selections = inhibitor.counts();
        reports.push_back(std::move(report));

        const double error = reports.back().mean_error;
        if (epoch > 1) {
            if (epoch >= schedule.min_epochs && prev_error > 0.0 &&
                (prev_error - error) / prev_error < schedule.stop_threshold)
                break;
            if (error > prev_error) batch_size = std::min(batch_size * 2, n);
        }
        prev_error = error;
    }
    return {std::move(params), std::move(reports)};
}

std::vector<FilterBank> pretrain_network(const std::vector<FeatureMap>& images,
                                         const ArchitectureSpec& arch,
                                         const std::vector<TrainSchedule>& schedules,
                                         double normalize_eps,
                                         std::vector<std::vector<EpochReport>>* reports) {
    network::validate_architecture(arch);
    if (images.empty())
        throw DataError("empty-input", "no training images");
    if (schedules.size() != arch.layers.size())
        throw DataError("invalid-schedule", "one schedule per layer is required");

    std::vector<FilterBank> banks;
    std::vector<FeatureMap> maps = images;
    for (size_t l = 0; l < arch.layers.size(); ++l) {
        const LayerSpec& spec = arch.layers[l];
        const std::string name = "layer " + std::to_string(l + 1);
        for (const FeatureMap& map : maps)
            if (map.rows < spec.receptive_field || map.cols < spec.receptive_field)
                throw DataError("shape-mismatch",
                                name + ": receptive field " + std::to_string(spec.receptive_field) +
                                    " exceeds feature map " + std::to_string(map.rows) + "x" +
                                    std::to_string(map.cols));

        PatchMatrix patches = imageio::extract_patches(
            maps, spec.receptive_field, schedules[l].total_patches,
            derive_seed(schedules[l].seed, kPatchStream + l));
        if (l == 0) patches = imageio::normalize_patches(patches, normalize_eps);

        auto [bank, layer_reports] = pretrain_layer(patches, spec, schedules[l]);
        banks.push_back(std::move(bank));
        if (reports) reports->push_back(std::move(layer_reports));

        if (l + 1 < arch.layers.size())
            for (FeatureMap& map : maps) map = network::forward_layer(map, banks.back(), spec);
    }
    return banks;
}

}  // namespace featlearn::trainer
