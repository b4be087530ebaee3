#pragma once

#include <cstdint>
#include <vector>

#include "featlearn/core.hpp"

namespace featlearn::metrics {

/// K x K confusion counts; rows are reference (true) labels, columns are
/// predictions. Only pairs with a nonzero true label contribute.
struct ConfusionMatrix {
    int classes = 0;
    std::vector<int64_t> counts;  // row-major K x K
    int64_t total = 0;

    int64_t at(int true_label, int predicted) const {  // 1-based labels
        return counts[static_cast<size_t>(true_label - 1) * classes + (predicted - 1)];
    }
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int classes);

double overall_accuracy(const ConfusionMatrix& m);

/// Cohen's kappa: (p_o - p_e) / (1 - p_e); returns 0 by convention when p_e = 1.
double kappa(const ConfusionMatrix& m);

struct ClassAccuracy {
    double producers = 0.0;  // recall: M[k,k] / row sum
    double users = 0.0;      // precision: M[k,k] / column sum
    bool empty_reference = false;
    bool empty_predictions = false;
};

std::vector<ClassAccuracy> class_accuracies(const ConfusionMatrix& m);

/// Histogram mutual information in nats between a real feature and labels:
/// the feature is quantized into equal-width bins over [min, max]; labels are
/// opaque categories. A constant feature has MI 0.
double mutual_information(const std::vector<double>& feature, const std::vector<int>& labels,
                          int bins = 32);

}  // namespace featlearn::metrics
