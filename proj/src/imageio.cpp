#include "featlearn/imageio.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "featlearn/rng.hpp"

namespace featlearn::imageio {

namespace {

std::string read_header_line(std::ifstream& in, const std::string& path) {
    std::string line;
    char c;
    while (in.get(c)) {
        if (c == '\n') return line;
        line.push_back(c);
        if (line.size() > 256)
            throw DataError("malformed-header", path + ": header line exceeds 256 bytes");
    }
    throw DataError("malformed-header", path + ": missing header line");
}

std::vector<char> read_payload(std::ifstream& in) {
    std::vector<char> bytes;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        bytes.insert(bytes.end(), buf, buf + in.gcount());
    return bytes;
}

/// Writes the full content to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("unwritable-path", "cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw DataError("unwritable-path", "write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw DataError("unwritable-path", "cannot rename " + tmp + " to " + path);
}

void append_le_f32(std::string& out, double v) {
    const uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(v));
    out.push_back(static_cast<char>(bits & 0xff));
    out.push_back(static_cast<char>((bits >> 8) & 0xff));
    out.push_back(static_cast<char>((bits >> 16) & 0xff));
    out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

float le_f32_at(const std::vector<char>& bytes, size_t i) {
    const uint32_t bits = static_cast<uint8_t>(bytes[i]) |
                          static_cast<uint32_t>(static_cast<uint8_t>(bytes[i + 1])) << 8 |
                          static_cast<uint32_t>(static_cast<uint8_t>(bytes[i + 2])) << 16 |
                          static_cast<uint32_t>(static_cast<uint8_t>(bytes[i + 3])) << 24;
    return std::bit_cast<float>(bits);
}

}  // namespace

FeatureMap read_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("missing-file", "cannot open " + path);
    const std::string header = read_header_line(in, path);
    std::istringstream hs(header);
    std::string magic;
    long long r = 0, c = 0, b = 0;
    if (!(hs >> magic >> r >> c >> b) || magic != "ERSF1" || r < 1 || c < 1 || b < 1)
        throw DataError("malformed-header", path + ": bad raster header '" + header + "'");
    std::string tail;
    if (hs >> tail)
        throw DataError("malformed-header", path + ": trailing header fields");

    const std::vector<char> bytes = read_payload(in);
    const size_t expected = static_cast<size_t>(r) * c * b * 4;
    if (bytes.size() != expected)
        throw DataError("truncated-payload",
                        path + ": payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                            std::to_string(expected));

    FeatureMap map(static_cast<int>(r), static_cast<int>(c), static_cast<int>(b));
    for (size_t i = 0; i < map.values.size(); ++i)
        map.values[i] = static_cast<double>(le_f32_at(bytes, i * 4));
    return map;
}

void write_raster(const FeatureMap& map, const std::string& path) {
    if (map.rows < 1 || map.cols < 1 || map.channels < 1)
        throw DataError("invalid-map", "raster dimensions must be positive");
    check_finite(map.values, "raster");
    std::string out = "ERSF1 " + std::to_string(map.rows) + " " + std::to_string(map.cols) + " " +
                      std::to_string(map.channels) + "\n";
    out.reserve(out.size() + map.values.size() * 4);
    for (double v : map.values) append_le_f32(out, v);
    atomic_write(path, out);
}

LabelMap read_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("missing-file", "cannot open " + path);
    const std::string header = read_header_line(in, path);
    std::istringstream hs(header);
    std::string magic;
    long long r = 0, c = 0;
    if (!(hs >> magic >> r >> c) || magic != "ERSL1" || r < 1 || c < 1)
        throw DataError("malformed-header", path + ": bad label header '" + header + "'");
    const std::vector<char> bytes = read_payload(in);
    const size_t expected = static_cast<size_t>(r) * c * 2;
    if (bytes.size() != expected)
        throw DataError("truncated-payload",
                        path + ": payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                            std::to_string(expected));
    LabelMap labels(static_cast<int>(r), static_cast<int>(c));
    for (size_t i = 0; i < labels.labels.size(); ++i)
        labels.labels[i] = static_cast<uint16_t>(static_cast<uint8_t>(bytes[i * 2]) |
                                                 static_cast<uint16_t>(static_cast<uint8_t>(bytes[i * 2 + 1])) << 8);
    return labels;
}

void write_labels(const LabelMap& labels, const std::string& path) {
    if (labels.rows < 1 || labels.cols < 1)
        throw DataError("invalid-map", "label dimensions must be positive");
    std::string out = "ERSL1 " + std::to_string(labels.rows) + " " + std::to_string(labels.cols) + "\n";
    out.reserve(out.size() + labels.labels.size() * 2);
    for (uint16_t v : labels.labels) {
        out.push_back(static_cast<char>(v & 0xff));
        out.push_back(static_cast<char>((v >> 8) & 0xff));
    }
    atomic_write(path, out);
}

const std::array<std::array<uint8_t, 3>, 16> kPalette = {{
    {0, 0, 0},        // 0 background
    {230, 25, 75},    // 1 red
    {60, 180, 75},    // 2 green
    {255, 225, 25},   // 3 yellow
    {0, 130, 200},    // 4 blue
    {245, 130, 48},   // 5 orange
    {145, 30, 180},   // 6 purple
    {70, 240, 240},   // 7 cyan
    {240, 50, 230},   // 8 magenta
    {210, 245, 60},   // 9 lime
    {250, 190, 190},  // 10 pink
    {0, 128, 128},    // 11 teal
    {170, 110, 40},   // 12 brown
    {255, 250, 200},  // 13 beige
    {128, 0, 0},      // 14 maroon
    {128, 128, 0},    // 15 olive
}};

void render_map(const LabelMap& labels, const std::string& path) {
    if (labels.rows < 1 || labels.cols < 1)
        throw DataError("invalid-map", "label dimensions must be positive");
    for (uint16_t v : labels.labels)
        if (v >= kPalette.size())
            throw DataError("palette-exceeded",
                            "label " + std::to_string(v) + " exceeds palette size " +
                                std::to_string(kPalette.size() - 1));
    std::string out = "P6\n" + std::to_string(labels.cols) + " " + std::to_string(labels.rows) + "\n255\n";
    out.reserve(out.size() + labels.labels.size() * 3);
    for (uint16_t v : labels.labels) {
        const auto& rgb = kPalette[v];
        out.push_back(static_cast<char>(rgb[0]));
        out.push_back(static_cast<char>(rgb[1]));
        out.push_back(static_cast<char>(rgb[2]));
    }
    atomic_write(path, out);
}

void render_channel(const FeatureMap& map, int channel, const std::string& path) {
    if (channel < 0 || channel >= map.channels)
        throw DataError("channel-out-of-range", "channel " + std::to_string(channel));
    double lo = map.at(0, 0, channel), hi = lo;
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c) {
            const double v = map.at(r, c, channel);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = hi > lo ? hi - lo : 1.0;
    std::string out = "P6\n" + std::to_string(map.cols) + " " + std::to_string(map.rows) + "\n255\n";
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c) {
            const double v = (map.at(r, c, channel) - lo) / span;
            const char g = static_cast<char>(std::lround(v * 255.0));
            out.push_back(g);
            out.push_back(g);
            out.push_back(g);
        }
    atomic_write(path, out);
}

PatchMatrix extract_patches(const std::vector<FeatureMap>& maps, int r, int n, uint64_t seed) {
    if (maps.empty())
        throw DataError("empty-input", "no maps to sample patches from");
    if (r < 1 || n < 1)
        throw DataError("invalid-argument", "receptive field and patch count must be positive");
    const int channels = maps[0].channels;
    uint64_t total = 0;
    std::vector<uint64_t> positions(maps.size());
    for (size_t m = 0; m < maps.size(); ++m) {
        if (maps[m].channels != channels)
            throw DataError("channel-mismatch", "maps have differing channel counts");
        if (maps[m].rows < r || maps[m].cols < r)
            throw DataError("receptive-field-too-large",
                            "receptive field " + std::to_string(r) + " exceeds map " +
                                std::to_string(maps[m].rows) + "x" + std::to_string(maps[m].cols));
        positions[m] = static_cast<uint64_t>(maps[m].rows - r + 1) * (maps[m].cols - r + 1);
        total += positions[m];
    }

    const int dim = r * r * channels;
    PatchMatrix patches(n, dim);
    Rng rng(seed);
    for (int p = 0; p < n; ++p) {
        uint64_t t = rng.below(total);
        size_t m = 0;
        while (t >= positions[m]) {
            t -= positions[m];
            ++m;
        }
        const FeatureMap& map = maps[m];
        const int wcols = map.cols - r + 1;
        const int top = static_cast<int>(t / wcols);
        const int left = static_cast<int>(t % wcols);
        double* row = patches.row(p);
        for (int pr = 0; pr < r; ++pr) {
            const double* src = &map.values[map.index(top + pr, left, 0)];
            std::memcpy(row + static_cast<size_t>(pr) * r * channels, src,
                        sizeof(double) * r * channels);
        }
    }
    return patches;
}

PatchMatrix normalize_patches(const PatchMatrix& patches, double eps) {
    PatchMatrix out(patches.rows, patches.cols);
    const int d = patches.cols;
    for (int i = 0; i < patches.rows; ++i) {
        const double* src = patches.row(i);
        double mean = 0.0;
        for (int j = 0; j < d; ++j) mean += src[j];
        mean /= d;
        double var = 0.0;
        for (int j = 0; j < d; ++j) {
            const double dev = src[j] - mean;
            var += dev * dev;
        }
        const double scale = 1.0 / (std::sqrt(var / d) + eps);
        double* dst = out.row(i);
        for (int j = 0; j < d; ++j) dst[j] = (src[j] - mean) * scale;
    }
    return out;
}

namespace {

void validate_synth_spec(const SynthSpec& spec) {
    const int k = static_cast<int>(spec.classes.size());
    if (k < 1)
        throw ConfigError("invalid-synth-spec", "at least one class is required");
    if (spec.rows < 1 || spec.cols < 1 || spec.channels < 1)
        throw ConfigError("invalid-synth-spec", "image dimensions must be positive");
    if (spec.cols < k)
        throw ConfigError("invalid-synth-spec",
                          "image of width " + std::to_string(spec.cols) + " cannot hold " +
                              std::to_string(k) + " regions");
    if (spec.noise_sigma < 0.0)
        throw ConfigError("invalid-synth-spec", "noise sigma must be non-negative");
    bool has_texture = false;
    for (const auto& cls : spec.classes) {
        if (cls.kind == SynthClass::Kind::spectral) {
            if (static_cast<int>(cls.signature.size()) != spec.channels)
                throw ConfigError("invalid-synth-spec", "spectral signature length != channels");
        } else {
            has_texture = true;
            if (cls.period < 1)
                throw ConfigError("invalid-synth-spec", "texture period must be positive");
        }
    }
    if (has_texture && (static_cast<int>(spec.texture_a.size()) != spec.channels ||
                        static_cast<int>(spec.texture_b.size()) != spec.channels))
        throw ConfigError("invalid-synth-spec", "texture signature pair length != channels");
}

}  // namespace

SynthDataset synth_dataset(const SynthSpec& spec, uint64_t seed) {
    validate_synth_spec(spec);
    const int k = static_cast<int>(spec.classes.size());

    SynthDataset out;
    out.image = FeatureMap(spec.rows, spec.cols, spec.channels);
    out.labels = LabelMap(spec.rows, spec.cols);

    // Vertical strips, one per class, remainder columns spread by integer split.
    std::vector<int> strip_start(k + 1);
    for (int i = 0; i <= k; ++i)
        strip_start[i] = static_cast<int>(static_cast<int64_t>(spec.cols) * i / k);
    for (int i = 0; i < k; ++i)
        out.layout.push_back({i + 1, 0, strip_start[i], spec.rows, strip_start[i + 1] - strip_start[i]});

    std::vector<int> col_class(spec.cols);
    for (int i = 0; i < k; ++i)
        for (int c = strip_start[i]; c < strip_start[i + 1]; ++c) col_class[c] = i;

    Rng rng(seed);
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            const int cls_idx = col_class[c];
            const SynthClass& cls = spec.classes[cls_idx];
            out.labels.at(r, c) = static_cast<uint16_t>(cls_idx + 1);

            const std::vector<double>* sig = &cls.signature;
            if (cls.kind == SynthClass::Kind::texture) {
                const int lr = r;                       // regions start at row 0
                const int lc = c - strip_start[cls_idx];
                int cell = 0;
                switch (cls.pattern) {
                    case TexturePattern::hstripes: cell = (lr / cls.period) % 2; break;
                    case TexturePattern::vstripes: cell = (lc / cls.period) % 2; break;
                    case TexturePattern::checker:  cell = (lr / cls.period + lc / cls.period) % 2; break;
                }
                sig = cell == 0 ? &spec.texture_a : &spec.texture_b;
            }
            for (int ch = 0; ch < spec.channels; ++ch) {
                double v = (*sig)[ch];
                if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.gaussian();
                out.image.at(r, c, ch) = v;
            }
        }
    }
    return out;
}

}  // namespace featlearn::imageio
