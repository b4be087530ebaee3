#pragma once

#include <cstdint>
#include <vector>

#include "featlearn/core.hpp"
#include "featlearn/network.hpp"

namespace featlearn::epls {

using network::Nonlinearity;

/// One-hot sparse target for a mini-batch: exactly one active entry per row,
/// remapped to the active/inactive values of the layer nonlinearity.
struct SparseTarget {
    Matrix values;              // batch rows x outputs
    double active = 1.0;
    double inactive = 0.0;
    std::vector<int> selected;  // selected output per row
};

/// Per-output selection inhibitor. Selections are stored as integer counts;
/// the inhibition value of output j is counts[j] * (outputs / budget), so the
/// total inhibition after m selections is exactly m * outputs / budget.
class Inhibitor {
public:
    Inhibitor(int outputs, int64_t epoch_budget);

    int outputs() const { return static_cast<int>(counts_.size()); }
    int64_t budget() const { return budget_; }
    double increment() const { return increment_; }
    double value(int j) const { return static_cast<double>(counts_[j]) * increment_; }
    int64_t count(int j) const { return counts_[j]; }
    const std::vector<int64_t>& counts() const { return counts_; }
    int64_t total_selections() const;
    double sum() const { return static_cast<double>(total_selections()) * increment_; }

    void record_selection(int j) { ++counts_[j]; }
    void reset();

private:
    std::vector<int64_t> counts_;
    int64_t budget_;
    double increment_;  // outputs / budget
};

/// Builds the sparse target for a mini-batch output matrix:
///   1. normalize H by its global (whole-matrix) min/max to [0, 1]
///      (an all-equal matrix normalizes to all zeros);
///   2. per row, select k = argmax_j (h_j - a_j); ties go to the output with
///      the lowest inhibition, then the lowest index;
///   3. mark the selection active and raise the inhibitor of k by N_h/N.
/// The inhibitor is mutated; rows must therefore be processed in order.
SparseTarget build_target(const Matrix& outputs, Inhibitor& inhibitor, Nonlinearity kind);

/// Squared-error target loss: sum over all entries of (H - T)^2.
double epls_loss(const Matrix& outputs, const SparseTarget& target);

struct Gradients {
    Matrix weights;            // outputs x dim
    std::vector<double> biases;
};

/// Analytic gradient of epls_loss with the target held fixed:
///   dW_k = sum_n 2 (H_nk - T_nk) sigma'(Z_nk) x_n
///   db_k = sum_n 2 (H_nk - T_nk) sigma'(Z_nk)
/// inputs: batch rows (N_b x D); preacts: Z (N_b x N_h); outputs: H = sigma(Z).
Gradients loss_gradient(const Matrix& inputs, const Matrix& preacts, const Matrix& outputs,
                        const SparseTarget& target, Nonlinearity kind);

}  // namespace featlearn::epls
