#include "featlearn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace featlearn::network {

Nonlinearity nonlinearity_from_string(const std::string& name) {
    if (name == "logistic") return Nonlinearity::logistic;
    if (name == "identity") return Nonlinearity::identity;
    if (name == "rectifier") return Nonlinearity::rectifier;
    throw ConfigError("unknown-nonlinearity", "unknown nonlinearity '" + name + "'");
}

std::string to_string(Nonlinearity kind) {
    switch (kind) {
        case Nonlinearity::logistic: return "logistic";
        case Nonlinearity::identity: return "identity";
        case Nonlinearity::rectifier: return "rectifier";
    }
    return "?";
}

int layer_output_channels(const LayerSpec& spec) {
    return spec.polarity_split ? 2 * spec.outputs : spec.outputs;
}

void validate_architecture(const ArchitectureSpec& arch) {
    if (arch.input_channels < 1)
        throw DataError("invalid-architecture", "input channel count must be positive");
    if (arch.layers.empty())
        throw DataError("invalid-architecture", "architecture has no layers");
    for (size_t l = 0; l < arch.layers.size(); ++l) {
        const LayerSpec& spec = arch.layers[l];
        const std::string name = "layer " + std::to_string(l + 1);
        if (spec.outputs < 1 || spec.receptive_field < 1 || spec.stride < 1)
            throw DataError("invalid-architecture", name + ": outputs, receptive field and stride must be positive");
        if (spec.pool != 0 && spec.pool < 2)
            throw DataError("invalid-architecture", name + ": pooling size must be >= 2");
        if (spec.polarity_split && l + 1 != arch.layers.size())
            throw DataError("invalid-architecture", name + ": polarity split is only permitted on the topmost layer");
    }
}

FeatureMap convolve_valid(const FeatureMap& input, const FilterBank& filters, int stride) {
    const int r = filters.receptive_field;
    if (stride < 1)
        throw DataError("invalid-argument", "stride must be positive");
    if (input.rows < r || input.cols < r)
        throw DataError("receptive-field-too-large",
                        "receptive field " + std::to_string(r) + " exceeds input " +
                            std::to_string(input.rows) + "x" + std::to_string(input.cols));
    if (filters.dim() != r * r * input.channels)
        throw DataError("channel-mismatch",
                        "filter dimensionality " + std::to_string(filters.dim()) + " != " +
                            std::to_string(r) + "x" + std::to_string(r) + "x" +
                            std::to_string(input.channels));

    const int out_rows = (input.rows - r) / stride + 1;
    const int out_cols = (input.cols - r) / stride + 1;
    const int n_h = filters.outputs();
    const int d = filters.dim();
    const int run = r * input.channels;  // contiguous doubles per window row

    FeatureMap out(out_rows, out_cols, n_h);
    std::vector<double> window(d);
    for (int oy = 0; oy < out_rows; ++oy) {
        for (int ox = 0; ox < out_cols; ++ox) {
            const int top = oy * stride;
            const int left = ox * stride;
            for (int pr = 0; pr < r; ++pr)
                std::memcpy(window.data() + static_cast<size_t>(pr) * run,
                            &input.values[input.index(top + pr, left, 0)], sizeof(double) * run);
            double* dst = &out.values[out.index(oy, ox, 0)];
            for (int k = 0; k < n_h; ++k) {
                const double* w = filters.weights.row(k);
                double acc = filters.biases[k];
                for (int j = 0; j < d; ++j) acc += w[j] * window[j];
                dst[k] = acc;
            }
        }
    }
    return out;
}

double apply_scalar(double x, Nonlinearity kind) {
    switch (kind) {
        case Nonlinearity::logistic: return 1.0 / (1.0 + std::exp(-x));
        case Nonlinearity::identity: return x;
        case Nonlinearity::rectifier: return x > 0.0 ? x : 0.0;
    }
    return x;
}

FeatureMap apply_nonlinearity(FeatureMap map, Nonlinearity kind) {
    if (kind == Nonlinearity::identity) return map;
    for (double& v : map.values) v = apply_scalar(v, kind);
    return map;
}

FeatureMap max_pool(const FeatureMap& map, int pool_side) {
    if (pool_side < 2)
        throw DataError("invalid-argument", "pooling size must be >= 2");
    const int out_rows = (map.rows + pool_side - 1) / pool_side;
    const int out_cols = (map.cols + pool_side - 1) / pool_side;
    FeatureMap out(out_rows, out_cols, map.channels);
    for (int oy = 0; oy < out_rows; ++oy) {
        const int r0 = oy * pool_side;
        const int r1 = std::min(r0 + pool_side, map.rows);
        for (int ox = 0; ox < out_cols; ++ox) {
            const int c0 = ox * pool_side;
            const int c1 = std::min(c0 + pool_side, map.cols);
            for (int ch = 0; ch < map.channels; ++ch) {
                double best = map.at(r0, c0, ch);
                for (int r = r0; r < r1; ++r)
                    for (int c = c0; c < c1; ++c) best = std::max(best, map.at(r, c, ch));
                out.at(oy, ox, ch) = best;
            }
        }
    }
    return out;
}

std::vector<double> quadrant_sum_pool(const FeatureMap& map) {
    if (map.rows < 2 || map.cols < 2)
        throw DataError("map-too-small", "quadrant pooling needs at least 2x2 spatial dims");
    const int rs = map.rows / 2;
    const int cs = map.cols / 2;
    // Quadrant bounds in (TL, TR, BL, BR) order; trailing odd row/col go low/right.
    const int bounds[4][4] = {{0, rs, 0, cs},
                              {0, rs, cs, map.cols},
                              {rs, map.rows, 0, cs},
                              {rs, map.rows, cs, map.cols}};
    std::vector<double> out(4 * static_cast<size_t>(map.channels), 0.0);
    for (int q = 0; q < 4; ++q) {
        double* dst = out.data() + static_cast<size_t>(q) * map.channels;
        for (int r = bounds[q][0]; r < bounds[q][1]; ++r)
            for (int c = bounds[q][2]; c < bounds[q][3]; ++c)
                for (int ch = 0; ch < map.channels; ++ch) dst[ch] += map.at(r, c, ch);
    }
    return out;
}

namespace {

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b) {
    FeatureMap out(a.rows, a.cols, a.channels + b.channels);
    for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < a.cols; ++c) {
            std::memcpy(&out.values[out.index(r, c, 0)], &a.values[a.index(r, c, 0)],
                        sizeof(double) * a.channels);
            std::memcpy(&out.values[out.index(r, c, a.channels)], &b.values[b.index(r, c, 0)],
                        sizeof(double) * b.channels);
        }
    return out;
}

FeatureMap encode_branch(const FeatureMap& input, const FilterBank& filters, const LayerSpec& spec) {
    FeatureMap m = apply_nonlinearity(convolve_valid(input, filters, spec.stride), spec.encoder);
    if (spec.pool >= 2) m = max_pool(m, spec.pool);
    return m;
}

}  // namespace

FeatureMap polarity_split(const FeatureMap& input, const FilterBank& filters, const LayerSpec& spec) {
    FilterBank negated = filters;
    for (double& w : negated.weights.data) w = -w;  // bias stays the same
    return concat_channels(encode_branch(input, filters, spec), encode_branch(input, negated, spec));
}

FeatureMap bilinear_upsample(const FeatureMap& map, int rows_target, int cols_target) {
    if (rows_target < map.rows || cols_target < map.cols)
        throw DataError("invalid-argument", "upsample target smaller than source");
    FeatureMap out(rows_target, cols_target, map.channels);

    std::vector<int> r0(rows_target), r1(rows_target), c0(cols_target), c1(cols_target);
    std::vector<double> fr(rows_target), fc(cols_target);
    auto align = [](int t, int src, int target, int& i0, int& i1, double& f) {
        double s = (t + 0.5) * static_cast<double>(src) / target - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        i0 = static_cast<int>(std::floor(s));
        i1 = std::min(i0 + 1, src - 1);
        f = s - i0;
    };
    for (int t = 0; t < rows_target; ++t) align(t, map.rows, rows_target, r0[t], r1[t], fr[t]);
    for (int t = 0; t < cols_target; ++t) align(t, map.cols, cols_target, c0[t], c1[t], fc[t]);

    for (int y = 0; y < rows_target; ++y)
        for (int x = 0; x < cols_target; ++x)
            for (int ch = 0; ch < map.channels; ++ch) {
                const double top = (1.0 - fc[x]) * map.at(r0[y], c0[x], ch) + fc[x] * map.at(r0[y], c1[x], ch);
                const double bot = (1.0 - fc[x]) * map.at(r1[y], c0[x], ch) + fc[x] * map.at(r1[y], c1[x], ch);
                out.at(y, x, ch) = (1.0 - fr[y]) * top + fr[y] * bot;
            }
    return out;
}

FeatureMap forward_layer(const FeatureMap& input, const FilterBank& filters, const LayerSpec& spec) {
    if (spec.polarity_split) return polarity_split(input, filters, spec);
    return encode_branch(input, filters, spec);
}

FeatureMap extract_feature_map(const FeatureMap& image, const ArchitectureSpec& arch,
                               const std::vector<FilterBank>& params) {
    validate_architecture(arch);
    if (params.size() != arch.layers.size())
        throw DataError("shape-mismatch", "parameter count does not match layer count");
    FeatureMap current = image;
    int channels = arch.input_channels;
    for (size_t l = 0; l < arch.layers.size(); ++l) {
        const LayerSpec& spec = arch.layers[l];
        const std::string name = "layer " + std::to_string(l + 1);
        if (current.channels != channels)
            throw DataError("shape-mismatch", name + ": unexpected input channel count");
        if (params[l].dim() != spec.receptive_field * spec.receptive_field * channels ||
            params[l].outputs() != spec.outputs ||
            params[l].receptive_field != spec.receptive_field)
            throw DataError("shape-mismatch", name + ": filter bank does not match the layer spec");
        if (current.rows < spec.receptive_field || current.cols < spec.receptive_field)
            throw DataError("shape-mismatch",
                            name + ": receptive field " + std::to_string(spec.receptive_field) +
                                " exceeds feature map " + std::to_string(current.rows) + "x" +
                                std::to_string(current.cols));
        current = forward_layer(current, params[l], spec);
        channels = layer_output_channels(spec);
    }
    return current;
}

FeatureMap extract_features_pixel(const FeatureMap& image, const ArchitectureSpec& arch,
                                  const std::vector<FilterBank>& params) {
    FeatureMap top = extract_feature_map(image, arch, params);
    if (top.rows == image.rows && top.cols == image.cols) return top;
    return bilinear_upsample(top, image.rows, image.cols);
}

std::vector<double> extract_features_scene(const FeatureMap& image, const ArchitectureSpec& arch,
                                           const std::vector<FilterBank>& params) {
    return quadrant_sum_pool(extract_feature_map(image, arch, params));
}

}  // namespace featlearn::network
