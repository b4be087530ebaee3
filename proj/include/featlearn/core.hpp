#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace featlearn {

/// Error with a machine-readable kind and the process exit code it maps to.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message, int exit_code)
        : std::runtime_error(message), kind_(std::move(kind)), exit_code_(exit_code) {}
    const std::string& kind() const { return kind_; }
    int exit_code() const { return exit_code_; }

private:
    std::string kind_;
    int exit_code_;
};

struct ConfigError : Error {
    ConfigError(std::string kind, const std::string& message)
        : Error(std::move(kind), message, 2) {}
};

struct DataError : Error {
    DataError(std::string kind, const std::string& message)
        : Error(std::move(kind), message, 3) {}
};

struct NumericError : Error {
    NumericError(std::string kind, const std::string& message)
        : Error(std::move(kind), message, 4) {}
};

/// Dense row-major matrix of doubles. Also used for patch matrices
/// (rows = patches, cols = r*r*channels vectorized values).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {}

    double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
    double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
};

/// Patch matrix: each row is the (row, col, channel) row-major, channel-fastest
/// vectorization of an r x r x channels window.
using PatchMatrix = Matrix;

/// Multi-band raster / feature map. Values are stored row-major over
/// (row, col, channel) with channel fastest; every consumer that
/// vectorizes windows must keep this order.
struct FeatureMap {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<double> values;

    FeatureMap() = default;
    FeatureMap(int r, int c, int ch, double fill = 0.0)
        : rows(r), cols(c), channels(ch),
          values(static_cast<size_t>(r) * c * ch, fill) {}

    size_t index(int r, int c, int ch) const {
        return (static_cast<size_t>(r) * cols + c) * channels + ch;
    }
    double& at(int r, int c, int ch) { return values[index(r, c, ch)]; }
    double at(int r, int c, int ch) const { return values[index(r, c, ch)]; }

    bool same_shape(const FeatureMap& other) const {
        return rows == other.rows && cols == other.cols && channels == other.channels;
    }
};

/// Label raster paired with a FeatureMap. Label 0 is background: never used
/// for training or scoring.
struct LabelMap {
    int rows = 0;
    int cols = 0;
    std::vector<uint16_t> labels;

    LabelMap() = default;
    LabelMap(int r, int c, uint16_t fill = 0)
        : rows(r), cols(c), labels(static_cast<size_t>(r) * c, fill) {}

    uint16_t& at(int r, int c) { return labels[static_cast<size_t>(r) * cols + c]; }
    uint16_t at(int r, int c) const { return labels[static_cast<size_t>(r) * cols + c]; }
};

inline void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw DataError("non-finite-value", std::string(what) + " contains a non-finite value");
}

}  // namespace featlearn
