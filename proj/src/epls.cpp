#include "featlearn/epls.hpp"

#include <algorithm>

namespace featlearn::epls {

Inhibitor::Inhibitor(int outputs, int64_t epoch_budget)
    : counts_(static_cast<size_t>(outputs), 0), budget_(epoch_budget) {
    if (outputs < 1 || epoch_budget < 1)
        throw DataError("invalid-argument", "inhibitor needs positive outputs and budget");
    increment_ = static_cast<double>(outputs) / static_cast<double>(epoch_budget);
}

int64_t Inhibitor::total_selections() const {
    int64_t total = 0;
    for (int64_t c : counts_) total += c;
    return total;
}

void Inhibitor::reset() { std::fill(counts_.begin(), counts_.end(), 0); }

SparseTarget build_target(const Matrix& outputs, Inhibitor& inhibitor, Nonlinearity kind) {
    const int n_rows = outputs.rows;
    const int n_h = outputs.cols;
    if (n_h != inhibitor.outputs())
        throw DataError("dimension-mismatch", "output width does not match the inhibitor");
    if (n_rows < 1)
        throw DataError("invalid-argument", "empty mini-batch");

    // Active/inactive levels of the nonlinearity. All supported kinds map to
    // 1/0 (the logistic asymptotes; the natural on/off levels of identity and
    // rectifier codes).
    double active = 1.0, inactive = 0.0;
    (void)kind;

    double lo = outputs.data[0], hi = outputs.data[0];
    for (double v : outputs.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    const double inv_span = span > 0.0 ? 1.0 / span : 0.0;  // all-equal batch -> all zeros

    SparseTarget target;
    target.active = active;
    target.inactive = inactive;
    target.values = Matrix(n_rows, n_h, inactive);
    target.selected.resize(n_rows);

    const double q = inhibitor.increment();
    for (int n = 0; n < n_rows; ++n) {
        const double* h = outputs.row(n);
        int best = 0;
        double best_score = (h[0] - lo) * inv_span - static_cast<double>(inhibitor.count(0)) * q;
        int64_t best_count = inhibitor.count(0);
        for (int j = 1; j < n_h; ++j) {
            const int64_t cj = inhibitor.count(j);
            const double score = (h[j] - lo) * inv_span - static_cast<double>(cj) * q;
            if (score > best_score || (score == best_score && cj < best_count)) {
                best = j;
                best_score = score;
                best_count = cj;
            }
        }
        target.values.at(n, best) = active;
        target.selected[n] = best;
        inhibitor.record_selection(best);
    }
    return target;
}

double epls_loss(const Matrix& outputs, const SparseTarget& target) {
    if (outputs.rows != target.values.rows || outputs.cols != target.values.cols)
        throw DataError("dimension-mismatch", "output and target shapes differ");
    double total = 0.0;
    for (size_t i = 0; i < outputs.data.size(); ++i) {
        const double diff = outputs.data[i] - target.values.data[i];
        total += diff * diff;
    }
    return total;
}

Gradients loss_gradient(const Matrix& inputs, const Matrix& preacts, const Matrix& outputs,
                        const SparseTarget& target, Nonlinearity kind) {
    const int n_rows = outputs.rows;
    const int n_h = outputs.cols;
    const int dim = inputs.cols;
    if (preacts.rows != n_rows || preacts.cols != n_h || inputs.rows != n_rows ||
        target.values.rows != n_rows || target.values.cols != n_h)
        throw DataError("dimension-mismatch", "gradient input shapes differ");

    Gradients grads;
    grads.weights = Matrix(n_h, dim, 0.0);
    grads.biases.assign(static_cast<size_t>(n_h), 0.0);

    for (int n = 0; n < n_rows; ++n) {
        const double* x = inputs.row(n);
        const double* h = outputs.row(n);
        const double* z = preacts.row(n);
        const double* t = target.values.row(n);
        for (int k = 0; k < n_h; ++k) {
            double deriv;
            switch (kind) {
                case Nonlinearity::logistic: deriv = h[k] * (1.0 - h[k]); break;
                case Nonlinearity::identity: deriv = 1.0; break;
                case Nonlinearity::rectifier: deriv = z[k] > 0.0 ? 1.0 : 0.0; break;
                default: deriv = 1.0;
            }
            const double coeff = 2.0 * (h[k] - t[k]) * deriv;
            if (coeff == 0.0) continue;
            grads.biases[k] += coeff;
            double* gw = grads.weights.row(k);
            for (int j = 0; j < dim; ++j) gw[j] += coeff * x[j];
        }
    }
    return grads;
}

}  // namespace featlearn::epls
