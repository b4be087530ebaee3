#pragma once

#include <cstdint>
#include <vector>

#include "featlearn/core.hpp"

namespace featlearn::classify {

/// Feature rows with labels in 1..K (label 0 is never stored here).
struct LabeledFeatures {
    Matrix x;
    std::vector<int> y;
};

/// 1-nearest-neighbor with squared Euclidean distance; distance ties go to
/// the earlier training row.
std::vector<int> knn1_predict(const LabeledFeatures& train, const Matrix& test);

/// One-vs-rest linear SVM. Weights act on internally standardized features;
/// the scaler learned from the training set is part of the model.
struct SvmModel {
    int classes = 0;
    Matrix weights;                   // classes x features (standardized space)
    std::vector<double> intercepts;   // classes
    double c_value = 0.0;
    std::vector<double> scaler_mean;
    std::vector<double> scaler_std;
};

/// Trains per-class L2-regularized L1-loss SVMs,
///   min 0.5 ||w||^2 + C sum_i max(0, 1 - y_i (w . x_i + b)),
/// by deterministic dual coordinate descent (fixed sweep order, at most 1000
/// passes, relative duality-gap tolerance 1e-4). The intercept is carried as
/// an augmented constant feature. `seed` is reserved; the solver is
/// deterministic. `dual_trace`, when given, receives the per-pass dual
/// objective of every subproblem in class order.
SvmModel svm_train(const LabeledFeatures& train, double c_value, uint64_t seed,
                   std::vector<double>* dual_trace = nullptr);

std::vector<int> svm_predict(const SvmModel& model, const Matrix& x);

struct CvResult {
    double best_c = 0.0;
    std::vector<double> mean_accuracy;  // one entry per grid value
};

/// Stratified seeded k-fold selection of C: highest mean validation accuracy
/// wins, ties go to the smallest C.
CvResult cv_select_c(const LabeledFeatures& train, const std::vector<double>& grid, int folds,
                     uint64_t seed);

inline const std::vector<double> kDefaultCGrid = {0.01, 0.1, 1.0, 10.0, 100.0};

}  // namespace featlearn::classify
