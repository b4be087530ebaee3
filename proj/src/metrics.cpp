#include "featlearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace featlearn::metrics {

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int classes) {
    if (y_true.size() != y_pred.size())
        throw DataError("length-mismatch", "label sequences have different lengths");
    if (classes < 1)
        throw DataError("invalid-argument", "class count must be positive");
    ConfusionMatrix m;
    m.classes = classes;
    m.counts.assign(static_cast<size_t>(classes) * classes, 0);
    for (size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t == 0) continue;  // background never scores
        if (t < 0 || t > classes || p < 1 || p > classes)
            throw DataError("label-out-of-range",
                            "pair (" + std::to_string(t) + ", " + std::to_string(p) +
                                ") outside 1.." + std::to_string(classes));
        ++m.counts[static_cast<size_t>(t - 1) * classes + (p - 1)];
        ++m.total;
    }
    return m;
}

double overall_accuracy(const ConfusionMatrix& m) {
    if (m.total < 1)
        throw DataError("empty-matrix", "confusion matrix has no counted pairs");
    int64_t diag = 0;
    for (int k = 0; k < m.classes; ++k) diag += m.counts[static_cast<size_t>(k) * m.classes + k];
    return static_cast<double>(diag) / static_cast<double>(m.total);
}

double kappa(const ConfusionMatrix& m) {
    if (m.total < 1)
        throw DataError("empty-matrix", "confusion matrix has no counted pairs");
    const double n = static_cast<double>(m.total);
    double p_observed = 0.0, p_expected = 0.0;
    for (int k = 0; k < m.classes; ++k) {
        int64_t row = 0, col = 0;
        for (int j = 0; j < m.classes; ++j) {
            row += m.counts[static_cast<size_t>(k) * m.classes + j];
            col += m.counts[static_cast<size_t>(j) * m.classes + k];
        }
        p_observed += static_cast<double>(m.counts[static_cast<size_t>(k) * m.classes + k]);
        p_expected += static_cast<double>(row) * static_cast<double>(col);
    }
    p_observed /= n;
    p_expected /= n * n;
    if (p_expected == 1.0) return 0.0;
    return (p_observed - p_expected) / (1.0 - p_expected);
}

std::vector<ClassAccuracy> class_accuracies(const ConfusionMatrix& m) {
    if (m.total < 1)
        throw DataError("empty-matrix", "confusion matrix has no counted pairs");
    std::vector<ClassAccuracy> out(static_cast<size_t>(m.classes));
    for (int k = 0; k < m.classes; ++k) {
        int64_t row = 0, col = 0;
        for (int j = 0; j < m.classes; ++j) {
            row += m.counts[static_cast<size_t>(k) * m.classes + j];
            col += m.counts[static_cast<size_t>(j) * m.classes + k];
        }
        const double diag = static_cast<double>(m.counts[static_cast<size_t>(k) * m.classes + k]);
        out[k].empty_reference = row == 0;
        out[k].empty_predictions = col == 0;
        out[k].producers = row == 0 ? 0.0 : diag / static_cast<double>(row);
        out[k].users = col == 0 ? 0.0 : diag / static_cast<double>(col);
    }
    return out;
}

double mutual_information(const std::vector<double>& feature, const std::vector<int>& labels,
                          int bins) {
    if (feature.size() != labels.size())
        throw DataError("length-mismatch", "feature and label lengths differ");
    if (feature.size() < 2)
        throw DataError("invalid-argument", "need at least two samples");
    if (bins < 2)
        throw DataError("invalid-argument", "need at least two bins");

    const auto [lo_it, hi_it] = std::minmax_element(feature.begin(), feature.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) return 0.0;  // constant feature

    std::map<int, int> label_index;
    for (int l : labels) label_index.emplace(l, 0);
    int next = 0;
    for (auto& [label, idx] : label_index) idx = next++;
    const int n_labels = next;

    const double scale = static_cast<double>(bins) / (hi - lo);
    std::vector<int64_t> joint(static_cast<size_t>(bins) * n_labels, 0);
    for (size_t i = 0; i < feature.size(); ++i) {
        int b = static_cast<int>((feature[i] - lo) * scale);
        b = std::clamp(b, 0, bins - 1);
        ++joint[static_cast<size_t>(b) * n_labels + label_index[labels[i]]];
    }

    std::vector<int64_t> bin_totals(static_cast<size_t>(bins), 0);
    std::vector<int64_t> label_totals(static_cast<size_t>(n_labels), 0);
    for (int b = 0; b < bins; ++b)
        for (int k = 0; k < n_labels; ++k) {
            const int64_t c = joint[static_cast<size_t>(b) * n_labels + k];
            bin_totals[b] += c;
            label_totals[k] += c;
        }

    const double n = static_cast<double>(feature.size());
    double info = 0.0;
    for (int b = 0; b < bins; ++b)
        for (int k = 0; k < n_labels; ++k) {
            const int64_t c = joint[static_cast<size_t>(b) * n_labels + k];
            if (c == 0) continue;
            const double p = c / n;
            info += p * std::log(p * n * n / (static_cast<double>(bin_totals[b]) *
                                              static_cast<double>(label_totals[k])));
        }
    return std::max(info, 0.0);
}

}  // namespace featlearn::metrics
