#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "featlearn/core.hpp"
#include "featlearn/epls.hpp"
#include "featlearn/imageio.hpp"
#include "featlearn/network.hpp"

namespace featlearn::trainer {

using network::ArchitectureSpec;
using network::FilterBank;
using network::LayerSpec;

/// Schedule for pre-training one layer.
///
/// Defaults follow the standard recipe: at least 20 epochs, at most as many
/// epochs as the layer has outputs (raised to min_epochs when the layer is
/// narrow), an initial mini-batch of round(N/N_h) patches, and stopping once
/// the relative error decrease falls below stop_threshold.
struct TrainSchedule {
    int total_patches = 0;        // N, patches per epoch
    int min_epochs = 20;
    int max_epochs = 0;           // 0 = default max(min_epochs, layer outputs)
    double stop_threshold = 1e-3; // relative improvement below this stops
    int initial_batch = 0;        // 0 = default round(N/N_h), clamped to [1, N]
    double learning_rate = 1e-2;  // eta0
    double ema_decay = 0.95;      // rho for the per-parameter gradient EMAs
    double init_std = 1e-4;       // weight/bias init: N(0, init_std^2)
    uint64_t seed = 0;
};

struct EpochReport {
    int epoch = 0;                // 1-based
    double mean_error = 0.0;      // epls_loss per patch over the epoch
    int batch_size = 0;           // mini-batch size used this epoch
    double mean_rate = 0.0;       // mean effective learning rate over all updates
    std::vector<int64_t> selections;  // selections per output this epoch
};

/// Weights and biases drawn i.i.d. from N(0, init_std^2), deterministic per seed.
FilterBank init_params(const LayerSpec& layer, int input_dim, const TrainSchedule& schedule);

/// Per-parameter EMA state for the adaptive learning rates.
struct SgdState {
    std::vector<double> weight_g, weight_v;  // outputs*dim
    std::vector<double> bias_g, bias_v;      // outputs
};

/// Adaptive per-parameter SGD step. For each parameter with gradient g:
///   g_ema <- rho g_ema + (1-rho) g
///   v_ema <- rho v_ema + (1-rho) g^2
///   rate  <- eta0 * g_ema^2 / (v_ema + 1e-8), clamped to [0, eta0]
///   theta <- theta - rate * g
/// Returns the mean effective rate over all parameters.
double sgd_update(FilterBank& params, const epls::Gradients& grads, SgdState& state,
                  const TrainSchedule& schedule);

/// Trains one layer on a fixed patch set with EPLS targets and mini-batch SGD.
/// Per epoch: shuffle patches, reset the inhibitor, then per mini-batch run
/// forward -> build_target -> loss_gradient -> sgd_update. Stops after
/// min_epochs once the relative error improvement drops below the threshold;
/// the mini-batch size doubles (capped at N) whenever the epoch error rose.
std::pair<FilterBank, std::vector<EpochReport>> pretrain_layer(const PatchMatrix& patches,
                                                               const LayerSpec& layer,
                                                               const TrainSchedule& schedule);

/// Greedy layer-wise pre-training: per layer, sample patches from the current
/// map set (contrast/brightness-normalized for the first layer), train with
/// EPLS, then push every map through the trained layer to feed the next one.
std::vector<FilterBank> pretrain_network(const std::vector<FeatureMap>& images,
                                         const ArchitectureSpec& arch,
                                         const std::vector<TrainSchedule>& schedules,
                                         double normalize_eps = imageio::kDefaultNormalizeEps,
                                         std::vector<std::vector<EpochReport>>* reports = nullptr);

}  // namespace featlearn::trainer
