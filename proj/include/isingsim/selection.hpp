#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isingsim/estimator.hpp"
#include "isingsim/model.hpp"

namespace isingsim {

// Assignment of observations (not stacked rows) to folds: all p rows derived
// from observation i share fold assignment[i].
struct FoldPlan {
    int n = 0;
    int folds = 0;
    std::uint64_t seed = 0;
    std::vector<int> assignment;  // length n, values in 0..folds-1
};

FoldPlan make_fold_plan(int n, int folds, std::uint64_t seed);

struct CrossValidationResult {
    std::vector<double> lambdas;
    std::vector<double> mean_score;       // mean held-out log PL across used folds
    Eigen::MatrixXd fold_scores;          // folds x grid length
    std::vector<char> fold_flagged;       // fold excluded (constant response column)
    int chosen_index = -1;
    double chosen_lambda = 0.0;
    PathResult full_path;                 // path on the full data, shared with IC
    std::vector<std::string> warnings;
};

// Grouped K-fold CV of the penalized path: full-data weights and grid
// throughout, score = held-out mean log PL, ties broken toward larger lambda.
CrossValidationResult cross_validate(const BinaryDataset& data,
                                     const std::vector<SimilarityMatrix>& sims,
                                     const AdaptiveWeights& weights,
                                     const FoldPlan& plan,
                                     std::vector<double> grid = {},
                                     const FitOptions& options = {});

// Same procedure over a prebuilt design whose observations are the grouping
// unit; used by cross_validate and by the neighborhood baseline.
CrossValidationResult cross_validate_design(const StackedDesign& design,
                                            const AdaptiveWeights& weights,
                                            const FoldPlan& plan,
                                            std::vector<double> grid = {},
                                            const FitOptions& options = {});

enum class InformationCriterion { aic, bic };

struct IcResult {
    std::vector<double> lambdas;
    std::vector<double> values;   // criterion per grid point
    std::vector<int> df;          // active alpha count + p
    int chosen_index = -1;
    double chosen_lambda = 0.0;
};

// IC over an already-fitted path: -2 * (np) * log_pl + penalty * df,
// penalty 2 (AIC) or log(np) (BIC). Ties break toward larger lambda.
IcResult select_ic(const PathResult& path, int n, int p, InformationCriterion criterion);
IcResult select_ic(const BinaryDataset& data, const std::vector<SimilarityMatrix>& sims,
                   const AdaptiveWeights& weights, InformationCriterion criterion,
                   std::vector<double> grid = {}, const FitOptions& options = {});

struct WaldInterval {
    double estimate = 0.0;
    double se = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct SandwichResult {
    std::vector<int> support;            // alpha coordinates refit
    ParameterSet refit;                  // full-length alpha, zeros off support
    Eigen::VectorXd se_main;             // length p
    Eigen::VectorXd se_alpha;            // length |support|
    std::vector<WaldInterval> main_intervals;
    std::vector<WaldInterval> alpha_intervals;
    double bread_condition = 0.0;        // condition estimate of A
    bool refit_converged = false;
    bool refit_separation = false;
    double refit_log_pl = 0.0;           // mean scale
};

// Post-selection refit plus clustered (per-observation) sandwich covariance
// A^{-1} B A^{-1}; 95% Wald intervals use the quantile 1.959964.
SandwichResult sandwich_inference(const BinaryDataset& data,
                                  const std::vector<SimilarityMatrix>& sims,
                                  const std::vector<int>& support,
                                  const FitOptions& options = {});

// 1 - fit/null on summed log PL scale; null must be strictly negative and
// fit >= null is expected for nested fits.
double pseudo_r2(double fit_log_pl_sum, double null_log_pl_sum);

enum class PenaltyVariant { adaptive, lasso, none, oracle };
enum class TuneMethod { cv, aic, bic, fixed };

struct FitModelOptions {
    PenaltyVariant penalty = PenaltyVariant::adaptive;
    TuneMethod tune = TuneMethod::cv;
    int folds = 10;
    std::uint64_t seed = 0;
    int grid_length = 100;
    double grid_min_ratio = 1e-4;
    std::vector<double> lambda_grid;       // overrides grid_length/min_ratio
    double fixed_lambda = -1.0;            // used when tune == fixed
    std::vector<int> oracle_support;       // used when penalty == oracle
    FitOptions solver;
};

// Complete, serializable record of one model fit.
struct FitResult {
    // configuration echo
    std::string penalty;
    std::string tune;
    std::uint64_t seed = 0;
    int folds = 0;
    int n = 0, p = 0, K = 0;
    std::vector<double> lambda_grid;
    double grad_tol = 0.0, obj_rel_tol = 0.0, kkt_tol = 0.0;
    int max_cycles = 0;

    // selection
    double chosen_lambda = 0.0;
    int chosen_index = -1;
    std::vector<int> active;

    // penalized (path) estimates at the chosen lambda
    Eigen::VectorXd main_effects;
    Eigen::VectorXd alpha;

    // post-selection refit and sandwich inference on the active set
    Eigen::VectorXd refit_main;
    Eigen::VectorXd refit_alpha;         // length |active|
    Eigen::VectorXd se_alpha;            // length |active|
    std::vector<WaldInterval> alpha_intervals;
    Eigen::VectorXd se_main;
    std::vector<WaldInterval> main_intervals;

    // tuning curves
    std::vector<double> cv_mean_score;
    Eigen::MatrixXd cv_fold_scores;
    std::vector<char> cv_fold_flagged;
    std::vector<double> ic_values;
    std::vector<int> ic_df;

    // diagnostics
    double kkt_residual = 0.0;
    double fit_log_pl_sum = 0.0;      // refit model, summed over n*p terms
    double null_log_pl_sum = 0.0;     // intercept-only model
    double pseudo_r2_value = 0.0;
    bool pilot_converged = false;
    bool pilot_separation = false;
    bool refit_converged = false;
    std::vector<std::string> warnings;

    std::vector<std::string> similarity_labels;
    std::vector<std::string> response_labels;
};

// End-to-end pipeline: pilot fit, weights, path, tuning, refit, inference.
FitResult fit_model(const BinaryDataset& data, const std::vector<SimilarityMatrix>& sims,
                    const FitModelOptions& options = {});

}  // namespace isingsim
