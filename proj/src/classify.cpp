#include "featlearn/classify.hpp"

#include <algorithm>
#include <cmath>

#include "featlearn/rng.hpp"

namespace featlearn::classify {

namespace {

constexpr int kMaxPasses = 1000;
constexpr double kGapTolerance = 1e-4;

void check_labels(const LabeledFeatures& train) {
    if (train.x.rows < 1 || train.x.rows != static_cast<int>(train.y.size()))
        throw DataError("empty-training-set", "training set is empty or misaligned");
    for (int label : train.y)
        if (label < 1)
            throw DataError("label-out-of-range", "labels must be in 1..K");
}

}  // namespace

std::vector<int> knn1_predict(const LabeledFeatures& train, const Matrix& test) {
    check_labels(train);
    if (test.cols != train.x.cols)
        throw DataError("dimension-mismatch", "test feature width differs from training");
    std::vector<int> out(static_cast<size_t>(test.rows));
    const int dim = test.cols;
    for (int i = 0; i < test.rows; ++i) {
        const double* q = test.row(i);
        int best = 0;
        double best_dist = 0.0;
        for (int j = 0; j < train.x.rows; ++j) {
            const double* p = train.x.row(j);
            double dist = 0.0;
            for (int k = 0; k < dim; ++k) {
                const double d = q[k] - p[k];
                dist += d * d;
            }
            if (j == 0 || dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        out[i] = train.y[best];
    }
    return out;
}

namespace {

/// Dual coordinate descent for one binary subproblem on augmented rows
/// (last feature is the constant 1 carrying the intercept).
void solve_binary(const Matrix& x_aug, const std::vector<int>& sign, double c_value, double* w,
                  std::vector<double>* dual_trace) {
    const int m = x_aug.rows;
    const int dim = x_aug.cols;
    std::fill(w, w + dim, 0.0);
    std::vector<double> alpha(static_cast<size_t>(m), 0.0);
    std::vector<double> q_diag(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const double* xi = x_aug.row(i);
        double norm = 0.0;
        for (int k = 0; k < dim; ++k) norm += xi[k] * xi[k];
        q_diag[i] = norm;
    }

    for (int pass = 0; pass < kMaxPasses; ++pass) {
        for (int i = 0; i < m; ++i) {
            if (q_diag[i] == 0.0) continue;
            const double* xi = x_aug.row(i);
            double margin = 0.0;
            for (int k = 0; k < dim; ++k) margin += w[k] * xi[k];
            const double grad = sign[i] * margin - 1.0;
            const double old = alpha[i];
            const double next = std::clamp(old - grad / q_diag[i], 0.0, c_value);
            if (next == old) continue;
            const double step = (next - old) * sign[i];
            for (int k = 0; k < dim; ++k) w[k] += step * xi[k];
            alpha[i] = next;
        }

        double w_norm2 = 0.0;
        for (int k = 0; k < dim; ++k) w_norm2 += w[k] * w[k];
        double alpha_sum = 0.0, hinge_sum = 0.0;
        for (int i = 0; i < m; ++i) {
            alpha_sum += alpha[i];
            const double* xi = x_aug.row(i);
            double margin = 0.0;
            for (int k = 0; k < dim; ++k) margin += w[k] * xi[k];
            hinge_sum += std::max(0.0, 1.0 - sign[i] * margin);
        }
        const double primal = 0.5 * w_norm2 + c_value * hinge_sum;
        const double dual = alpha_sum - 0.5 * w_norm2;
        if (dual_trace) dual_trace->push_back(0.5 * w_norm2 - alpha_sum);  // minimized objective
        if (primal - dual <= kGapTolerance * std::max(1.0, std::abs(primal))) break;
    }
}

}  // namespace

SvmModel svm_train(const LabeledFeatures& train, double c_value, uint64_t seed,
                   std::vector<double>* dual_trace) {
    (void)seed;
    check_labels(train);
    if (c_value <= 0.0)
        throw DataError("invalid-argument", "C must be positive");
    const int m = train.x.rows;
    const int features = train.x.cols;
    int classes = 0;
    for (int label : train.y) classes = std::max(classes, label);
    int distinct = 0;
    {
        std::vector<char> seen(static_cast<size_t>(classes) + 1, 0);
        for (int label : train.y)
            if (!seen[label]) {
                seen[label] = 1;
                ++distinct;
            }
    }
    if (distinct < 2)
        throw DataError("single-class", "training set has a single class");

    SvmModel model;
    model.classes = classes;
    model.c_value = c_value;
    model.scaler_mean.assign(static_cast<size_t>(features), 0.0);
    model.scaler_std.assign(static_cast<size_t>(features), 0.0);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < features; ++k) model.scaler_mean[k] += train.x.at(i, k);
    for (int k = 0; k < features; ++k) model.scaler_mean[k] /= m;
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < features; ++k) {
            const double d = train.x.at(i, k) - model.scaler_mean[k];
            model.scaler_std[k] += d * d;
        }
    for (int k = 0; k < features; ++k)
        model.scaler_std[k] = std::max(std::sqrt(model.scaler_std[k] / m), 1e-12);

    Matrix x_aug(m, features + 1);
    for (int i = 0; i < m; ++i) {
        double* dst = x_aug.row(i);
        const double* src = train.x.row(i);
        for (int k = 0; k < features; ++k)
            dst[k] = (src[k] - model.scaler_mean[k]) / model.scaler_std[k];
        dst[features] = 1.0;
    }

    model.weights = Matrix(classes, features);
    model.intercepts.assign(static_cast<size_t>(classes), 0.0);
    std::vector<double> w(static_cast<size_t>(features) + 1);
    std::vector<int> sign(static_cast<size_t>(m));
    for (int cls = 1; cls <= classes; ++cls) {
        for (int i = 0; i < m; ++i) sign[i] = train.y[i] == cls ? 1 : -1;
        solve_binary(x_aug, sign, c_value, w.data(), dual_trace);
        for (int k = 0; k < features; ++k) model.weights.at(cls - 1, k) = w[k];
        model.intercepts[cls - 1] = w[features];
    }
    return model;
}

std::vector<int> svm_predict(const SvmModel& model, const Matrix& x) {
    if (x.cols != model.weights.cols)
        throw DataError("dimension-mismatch", "feature width differs from the model");
    std::vector<int> out(static_cast<size_t>(x.rows));
    const int features = x.cols;
    std::vector<double> scaled(static_cast<size_t>(features));
    for (int i = 0; i < x.rows; ++i) {
        const double* src = x.row(i);
        for (int k = 0; k < features; ++k)
            scaled[k] = (src[k] - model.scaler_mean[k]) / model.scaler_std[k];
        int best = 1;
        double best_score = 0.0;
        for (int cls = 1; cls <= model.classes; ++cls) {
            const double* w = model.weights.row(cls - 1);
            double score = model.intercepts[cls - 1];
            for (int k = 0; k < features; ++k) score += w[k] * scaled[k];
            if (cls == 1 || score > best_score) {
                best = cls;
                best_score = score;
            }
        }
        out[i] = best;
    }
    return out;
}

CvResult cv_select_c(const LabeledFeatures& train, const std::vector<double>& grid, int folds,
                     uint64_t seed) {
    check_labels(train);
    if (grid.empty())
        throw DataError("invalid-argument", "empty C grid");
    if (folds < 2)
        throw DataError("invalid-argument", "need at least two folds");

    int classes = 0;
    for (int label : train.y) classes = std::max(classes, label);
    std::vector<std::vector<int>> by_class(static_cast<size_t>(classes) + 1);
    for (int i = 0; i < train.x.rows; ++i) by_class[train.y[i]].push_back(i);
    for (int cls = 1; cls <= classes; ++cls)
        if (!by_class[cls].empty() && static_cast<int>(by_class[cls].size()) < folds)
            throw DataError("class-too-small",
                            "class " + std::to_string(cls) + " has fewer samples than folds");

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::vector<int> fold_of(static_cast<size_t>(train.x.rows), 0);
    Rng rng(seed);
    for (int cls = 1; cls <= classes; ++cls) {
        auto& idx = by_class[cls];
        rng.shuffle(idx);
        for (size_t pos = 0; pos < idx.size(); ++pos)
            fold_of[idx[pos]] = static_cast<int>(pos % folds);
    }

    CvResult result;
    result.mean_accuracy.assign(grid.size(), 0.0);
    const int features = train.x.cols;
    for (size_t g = 0; g < grid.size(); ++g) {
        double accuracy_sum = 0.0;
        for (int fold = 0; fold < folds; ++fold) {
            LabeledFeatures fit;
            Matrix val_x(0, features);
            std::vector<int> val_y;
            int fit_rows = 0, val_rows = 0;
            for (int i = 0; i < train.x.rows; ++i)
                (fold_of[i] == fold ? val_rows : fit_rows)++;
            fit.x = Matrix(fit_rows, features);
            val_x = Matrix(val_rows, features);
            int fi = 0, vi = 0;
            for (int i = 0; i < train.x.rows; ++i) {
                if (fold_of[i] == fold) {
                    std::copy_n(train.x.row(i), features, val_x.row(vi++));
                    val_y.push_back(train.y[i]);
                } else {
                    std::copy_n(train.x.row(i), features, fit.x.row(fi++));
                    fit.y.push_back(train.y[i]);
                }
            }
            const SvmModel model = svm_train(fit, grid[g], seed);
            const std::vector<int> pred = svm_predict(model, val_x);
            int correct = 0;
            for (size_t i = 0; i < val_y.size(); ++i)
                if (pred[i] == val_y[i]) ++correct;
            accuracy_sum += val_y.empty() ? 0.0 : static_cast<double>(correct) / val_y.size();
        }
        result.mean_accuracy[g] = accuracy_sum / folds;
    }

    size_t best = 0;
    for (size_t g = 1; g < grid.size(); ++g) {
        if (result.mean_accuracy[g] > result.mean_accuracy[best] ||
            (result.mean_accuracy[g] == result.mean_accuracy[best] && grid[g] < grid[best]))
            best = g;
    }
    result.best_c = grid[best];
    return result;
}

}  // namespace featlearn::classify
