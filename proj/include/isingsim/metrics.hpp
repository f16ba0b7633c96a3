#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isingsim/model.hpp"

namespace isingsim {

// Ground truth for one simulation scenario.
struct SelectionTruth {
    ParameterSet params;            // true main effects and alpha
    std::vector<int> support;       // indices of nonzero alpha
    int K() const { return params.K(); }
    int K0() const { return static_cast<int>(support.size()); }
};

// (1/K) ||alpha_hat - alpha_0||^2
double mse_alpha(const Eigen::VectorXd& alpha_hat, const SelectionTruth& truth);

// (1/p) ||theta_hat_diag - theta_0_diag||^2
double mse_theta(const Eigen::VectorXd& main_hat, const SelectionTruth& truth);

struct TprFpr {
    double tpr = 0.0;
    std::optional<double> fpr;  // absent when there are no true zeros
};

TprFpr tpr_fpr(const std::vector<int>& active, const SelectionTruth& truth);

// Frobenius norm of the off-diagonal difference between two interaction
// matrices (both orientations of each pair counted).
double theta_error(const Eigen::MatrixXd& theta_hat, const Eigen::MatrixXd& theta_true);

struct NeighborhoodLassoOptions {
    int folds = 10;
    int grid_length = 50;
    double grid_min_ratio = 1e-3;
    std::uint64_t seed = 0;
};

// Neighborhood baseline: p separate lasso logistic regressions of y_j on
// y_{-j}, each tuned by grouped CV, symmetrized by averaging the two
// estimates of every pair. Returns the off-diagonal interaction matrix
// (diagonal holds the per-response intercepts).
Eigen::MatrixXd neighborhood_lasso_baseline(const BinaryDataset& data,
                                            const NeighborhoodLassoOptions& options = {});

}  // namespace isingsim
