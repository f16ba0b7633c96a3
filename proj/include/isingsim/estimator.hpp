#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isingsim/model.hpp"

namespace isingsim {

// Pseudo-likelihood design in stacked logistic-regression form. Row r = j*n + i
// carries response y_ij and covariates x(r, k) = sum_{j' != j} W_k[j, j'] y_ij',
// so rows group into p contiguous blocks of n sharing one main-effect intercept.
struct StackedDesign {
    int n = 0;
    int p = 0;
    Eigen::VectorXd response;  // length n*p, ordered y_11..y_n1, ..., y_1p..y_np
    Eigen::MatrixXd x;         // (n*p) x K

    int K() const { return static_cast<int>(x.cols()); }
    Eigen::Index rows() const { return response.size(); }
    int group(Eigen::Index r) const { return static_cast<int>(r / n); }
};

StackedDesign build_design(const BinaryDataset& data,
                           const std::vector<SimilarityMatrix>& sims);

// Rows of `design` restricted to the observations in `keep` (indices into
// 0..n-1), preserving the block ordering.
StackedDesign subset_design(const StackedDesign& design, const std::vector<int>& keep);

struct FitOptions {
    double grad_tol = 1e-8;      // max-norm gradient target, unregularized fits
    int max_newton_iter = 200;
    // Stagnation guard for the penalized solver: an iteration that improves
    // the objective by less than this (relative) while the KKT gap persists
    // stops the fit unconverged. Zero disables the guard.
    double obj_rel_tol = 1e-15;
    double kkt_tol = 1e-6;
    int max_cycles = 10000;
    bool include_main_effects = true;
    // |coefficient| beyond this flags separation; logistic fits saturate near
    // 36, so divergence must be caught before the gradient test can pass.
    double separation_bound = 30.0;
};

struct UnregularizedFit {
    ParameterSet params;   // main_effects empty when not included
    bool converged = false;
    bool separation = false;
    int iterations = 0;
    double grad_max_norm = 0.0;
    double log_pl = 0.0;   // mean log pseudo-likelihood at the solution
};

// Joint damped-Newton fit of all main effects and all alpha, no penalty.
UnregularizedFit fit_unregularized(const StackedDesign& design,
                                   const FitOptions& options = {});

struct AdaptiveWeights {
    Eigen::VectorXd weights;     // length K; 1/|alpha_bar_k|, or 1 where excluded
    std::vector<char> excluded;  // coordinates pinned to zero
    int n_excluded() const;
};

// Weights 1/|alpha_bar_k| from a pilot estimate; |alpha_bar_k| < zero_tol
// excludes the coordinate from the model entirely.
AdaptiveWeights adaptive_weights(const Eigen::VectorXd& alpha_bar,
                                 double zero_tol = 1e-10);
AdaptiveWeights unit_weights(int K);

struct PenaltySpec {
    double lambda = 0.0;
    Eigen::VectorXd weights;     // length K, strictly positive
    std::vector<char> excluded;  // empty or length K
};

struct PenalizedFit {
    ParameterSet params;
    double objective = 0.0;      // -mean log PL + penalty
    double log_pl = 0.0;         // mean log PL at the solution
    double kkt_residual = 0.0;
    std::vector<int> active;     // indices with alpha_k != 0
    bool converged = false;
    bool monotone = true;        // objective never increased across cycles
    int cycles = 0;
};

// Majorization solver for -log PL + lambda * sum_k w_k |alpha_k|: each cycle
// evaluates the point once, scans the KKT system, and minimizes a quadratic
// upper model over the working set by coordinate descent on cached inner
// products. Main effects are never penalized; converged means the KKT
// residual passed kkt_tol. Warm start optional.
PenalizedFit fit_penalized(const StackedDesign& design, const PenaltySpec& penalty,
                           const ParameterSet* warm_start = nullptr,
                           const FitOptions& options = {});

// Smallest lambda at which every alpha coordinate stays at zero, evaluated at
// the intercept-only main-effects optimum.
double lambda_max(const StackedDesign& design, const AdaptiveWeights& weights);

std::vector<double> default_lambda_grid(double lambda_max, int length = 100,
                                        double min_ratio = 1e-4);

struct PathResult {
    std::vector<double> lambdas;           // descending
    std::vector<ParameterSet> estimates;
    std::vector<double> objectives;
    std::vector<double> log_pl;            // mean log PL per point
    std::vector<double> kkt_residuals;
    std::vector<std::vector<int>> active_sets;
    std::vector<char> converged;
    std::vector<int> cycles;
    double lambda_max_value = 0.0;

    int size() const { return static_cast<int>(lambdas.size()); }
};

// Warm-started path over a descending lambda grid (default grid if empty).
PathResult fit_path(const StackedDesign& design, const AdaptiveWeights& weights,
                    std::vector<double> grid = {}, const FitOptions& options = {});

// Unregularized fit restricted to alpha coordinates in `support` (all main
// effects kept); off-support alpha are exact zeros in the result.
UnregularizedFit fit_oracle(const StackedDesign& design, const std::vector<int>& support,
                            const FitOptions& options = {});

struct RegularityDiagnostics {
    Eigen::MatrixXd m_hat;                 // K x K alpha block of -d2 mean log PL
    double min_eigenvalue_support = 0.0;   // lambda_min of M_hat[S, S]
    double gram_max_eigenvalue = 0.0;      // lambda_max of X'X/(np)
    double incoherence = 0.0;              // ||M_hat[S^c, S] M_hat[S, S]^{-1}||_inf
    bool support_block_singular = false;   // reported, never thrown
};

RegularityDiagnostics check_regularity(const StackedDesign& design,
                                       const ParameterSet& at,
                                       const std::vector<int>& support);

// Mean log pseudo-likelihood of stacked-design rows at given parameters.
double design_log_pl(const StackedDesign& design, const ParameterSet& params);

// Gradient of the mean log pseudo-likelihood, main effects first then alpha.
// Empty main_effects drops the intercept block from both model and gradient.
Eigen::VectorXd design_log_pl_gradient(const StackedDesign& design, const ParameterSet& params);

}  // namespace isingsim
