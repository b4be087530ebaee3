#pragma once

#include <cstdint>
#include <vector>

#include "featlearn/core.hpp"

namespace featlearn::baselines {

/// Linear PCA: orthonormal component rows sorted by descending eigenvalue,
/// deterministic sign (largest-magnitude coordinate positive).
struct PcaModel {
    std::vector<double> mean;       // length D
    Matrix components;              // N_f x D
    std::vector<double> eigenvalues;  // N_f, non-negative, non-increasing
};

PcaModel pca_fit(const Matrix& x, int n_features);
Matrix pca_transform(const PcaModel& model, const Matrix& x);

/// RBF kernel PCA. alpha rows are centered-kernel eigenvectors scaled by
/// 1/sqrt(lambda); kept components may be fewer than requested if the
/// centered kernel runs out of positive eigenvalues.
struct KpcaModel {
    Matrix train;                   // M x D training samples
    double lengthscale = 0.0;
    Matrix alpha;                   // kept x M
    std::vector<double> eigenvalues;  // kept
    std::vector<double> row_means;  // uncentered-kernel row means, length M
    double grand_mean = 0.0;
};

/// Mean Euclidean distance over all sample pairs; the auto lengthscale rule.
double mean_pairwise_distance(const Matrix& x);

/// lengthscale <= 0 selects the mean pairwise distance automatically.
KpcaModel kpca_fit(const Matrix& x, int n_features, double lengthscale = 0.0);
Matrix kpca_transform(const KpcaModel& model, const Matrix& x);

struct Omp1Model {
    Matrix dictionary;  // atoms x D, unit L2 rows
};

/// Per-fit observability: deaths are recorded at each epoch's assignment
/// step, before re-seeding replaces the dead atoms.
struct Omp1FitStats {
    std::vector<int> dead_per_epoch;
    std::vector<double> epoch_errors;       // sum ||x - s d||^2 at assignment time
    double ever_dead_fraction = 0.0;        // atoms dead at any epoch, pre-reseed
    double final_epoch_dead_fraction = 0.0;
};

/// Gain-shape alternating minimization: assign each sample to the atom with
/// the largest |d . x|, update atoms as normalized sums of s*x over their
/// samples, then re-seed assignment-free atoms from the largest residuals.
Omp1Model omp1_fit(const Matrix& x, int n_atoms, int epochs, uint64_t seed,
                   Omp1FitStats* stats = nullptr);

/// One nonzero per row: position argmax_k |d_k . x| (ties to the lowest
/// index), value d_k . x.
Matrix omp1_encode(const Omp1Model& model, const Matrix& x);

/// Index of the encoder output selected per row, and the fraction of outputs
/// never selected over the whole matrix (the dead-output statistic).
std::vector<int> argmax_rows(const Matrix& m);
double dead_output_fraction(const std::vector<int>& selections, int outputs);

}  // namespace featlearn::baselines
