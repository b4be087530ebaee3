#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "featlearn/core.hpp"

namespace featlearn::imageio {

/// Raster file format: one ASCII header line "ERSF1 <rows> <cols> <bands>\n"
/// followed by rows*cols*bands little-endian float32 values in
/// (row, col, channel) order, channel fastest.
FeatureMap read_raster(const std::string& path);
void write_raster(const FeatureMap& map, const std::string& path);

/// Label file format: "ERSL1 <rows> <cols>\n" then rows*cols little-endian uint16.
LabelMap read_labels(const std::string& path);
void write_labels(const LabelMap& labels, const std::string& path);

/// Fixed 16-entry palette for rendered maps; index 0 (background) is black.
extern const std::array<std::array<uint8_t, 3>, 16> kPalette;

/// Renders a label map as a binary PPM (P6), one pixel per cell.
void render_map(const LabelMap& labels, const std::string& path);

/// Renders one channel of a map as a grayscale PPM, min/max stretched.
void render_channel(const FeatureMap& map, int channel, const std::string& path);

/// Draws n patches of side r uniformly with replacement over all valid
/// (map, top-left) positions. Rows follow the PatchMatrix vectorization order.
PatchMatrix extract_patches(const std::vector<FeatureMap>& maps, int r, int n, uint64_t seed);

inline constexpr double kDefaultNormalizeEps = 1e-2;

/// Per-row contrast/brightness normalization: x <- (x - mean(x)) / (std(x) + eps),
/// population std. eps keeps constant rows finite.
PatchMatrix normalize_patches(const PatchMatrix& patches, double eps = kDefaultNormalizeEps);

enum class TexturePattern { hstripes, vstripes, checker };

struct SynthClass {
    enum class Kind { spectral, texture } kind = Kind::spectral;
    std::vector<double> signature;            // spectral only, length = channels
    TexturePattern pattern = TexturePattern::hstripes;  // texture only
    int period = 2;                           // texture stripe/cell width in pixels
};

/// Generator parameters for synthetic multi-band scenes. All texture classes
/// share the same signature pair (texture_a, texture_b) so their per-pixel
/// value distributions are identical by construction; they differ only in
/// the 2-D arrangement of the two signatures.
struct SynthSpec {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    double noise_sigma = 0.0;
    std::vector<SynthClass> classes;          // one region per class, in order
    std::vector<double> texture_a;
    std::vector<double> texture_b;
};

/// One labeled region of the generated scene.
struct Region {
    int label = 0;
    int row0 = 0, col0 = 0;
    int rows = 0, cols = 0;
};

struct SynthDataset {
    FeatureMap image;
    LabelMap labels;
    std::vector<Region> layout;
};

/// Generates an image tiled into K vertical strips, one labeled region per
/// class, deterministic per seed. Noise is i.i.d. Gaussian per value.
SynthDataset synth_dataset(const SynthSpec& spec, uint64_t seed);

}  // namespace featlearn::imageio
