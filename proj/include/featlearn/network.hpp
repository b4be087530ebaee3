#pragma once

#include <string>
#include <vector>

#include "featlearn/core.hpp"

namespace featlearn::network {

enum class Nonlinearity { logistic, identity, rectifier };

Nonlinearity nonlinearity_from_string(const std::string& name);
std::string to_string(Nonlinearity kind);

/// One layer's learned parameters: outputs() filters of length dim() = r*r*input_channels,
/// plus one bias per filter. Weight rows use the PatchMatrix vectorization order.
struct FilterBank {
    int receptive_field = 0;
    Matrix weights;               // outputs x dim, row-major
    std::vector<double> biases;   // outputs

    int outputs() const { return weights.rows; }
    int dim() const { return weights.cols; }
};

struct LayerSpec {
    int outputs = 0;
    int receptive_field = 0;
    int stride = 1;
    Nonlinearity train_nonlinearity = Nonlinearity::logistic;
    Nonlinearity encoder = Nonlinearity::logistic;
    int pool = 0;                 // 0 = none, else max-pooling window side P >= 2
    bool polarity_split = false;  // topmost layer only
};

struct ArchitectureSpec {
    int input_channels = 0;
    std::vector<LayerSpec> layers;
};

/// Throws DataError naming the offending layer if shapes do not chain or
/// polarity split appears below the topmost layer.
void validate_architecture(const ArchitectureSpec& arch);

/// Output channel count of layer index l (doubled by polarity split).
int layer_output_channels(const LayerSpec& spec);

/// Valid (no padding) multi-channel cross-correlation, pre-activation only:
/// out(y,x,k) = window(y*stride, x*stride) . W_k + b_k.
FeatureMap convolve_valid(const FeatureMap& input, const FilterBank& filters, int stride);

double apply_scalar(double x, Nonlinearity kind);
FeatureMap apply_nonlinearity(FeatureMap map, Nonlinearity kind);

/// Non-overlapping P x P max pooling per channel; partial trailing windows
/// are kept, so output dims are ceil(R/P) x ceil(C/P).
FeatureMap max_pool(const FeatureMap& map, int pool_side);

/// Sums each channel over the four spatial quadrants (split at floor(R/2),
/// floor(C/2); odd trailing row/col go to the lower/right quadrants).
/// Result is ordered quadrant-major (TL, TR, BL, BR), channel fastest.
std::vector<double> quadrant_sum_pool(const FeatureMap& map);

/// Encodes responses to W and -W (same bias) as separate channel blocks:
/// concat(pool(sigma(x * W + b)), pool(sigma(x * -W + b))).
FeatureMap polarity_split(const FeatureMap& input, const FilterBank& filters, const LayerSpec& spec);

/// Per-channel bilinear interpolation with half-pixel-center alignment;
/// source coordinate = (t + 0.5) * src / target - 0.5, clamped.
FeatureMap bilinear_upsample(const FeatureMap& map, int rows_target, int cols_target);

/// conv (stride) -> encoder nonlinearity -> optional polarity split -> optional max pool.
FeatureMap forward_layer(const FeatureMap& input, const FilterBank& filters, const LayerSpec& spec);

/// Sequential forward pass over all layers; returns the topmost feature map.
FeatureMap extract_feature_map(const FeatureMap& image, const ArchitectureSpec& arch,
                               const std::vector<FilterBank>& params);

/// Pixel pipeline: forward pass, then bilinear upsample of the top map back
/// to the input dimensions so every pixel has a feature vector.
FeatureMap extract_features_pixel(const FeatureMap& image, const ArchitectureSpec& arch,
                                  const std::vector<FilterBank>& params);

/// Scene pipeline: forward pass, then quadrant sum pooling of the top map
/// into a single vector of length 4 * top channels.
std::vector<double> extract_features_scene(const FeatureMap& image, const ArchitectureSpec& arch,
                                           const std::vector<FilterBank>& params);

}  // namespace featlearn::network
