#include "isingsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "isingsim/errors.hpp"
#include "isingsim/estimator.hpp"
#include "isingsim/rng.hpp"
#include "isingsim/selection.hpp"

namespace isingsim {

namespace {

void check_truth(const SelectionTruth& truth) {
    for (int k : truth.support) {
        if (k < 0 || k >= truth.K()) throw input_error("truth support index out of range");
    }
}

}  // namespace

double mse_alpha(const Eigen::VectorXd& alpha_hat, const SelectionTruth& truth) {
    check_truth(truth);
    if (alpha_hat.size() != truth.params.alpha.size()) {
        throw input_error("coefficient vector length does not match truth");
    }
    return (alpha_hat - truth.params.alpha).squaredNorm() / truth.K();
}

double mse_theta(const Eigen::VectorXd& main_hat, const SelectionTruth& truth) {
    check_truth(truth);
    if (main_hat.size() != truth.params.main_effects.size()) {
        throw input_error("main-effect vector length does not match truth");
    }
    return (main_hat - truth.params.main_effects).squaredNorm() / truth.params.p();
}

TprFpr tpr_fpr(const std::vector<int>& active, const SelectionTruth& truth) {
    check_truth(truth);
    const int K = truth.K();
    const int K0 = truth.K0();
    if (K0 < 1) throw input_error("truth support is empty");
    std::vector<char> in_s(static_cast<std::size_t>(K), 0);
    for (int k : truth.support) in_s[static_cast<std::size_t>(k)] = 1;

    int tp = 0, fp = 0;
    std::vector<char> seen(static_cast<std::size_t>(K), 0);
    for (int k : active) {
        if (k < 0 || k >= K) throw input_error("active index out of range");
        if (seen[static_cast<std::size_t>(k)]) continue;
        seen[static_cast<std::size_t>(k)] = 1;
        (in_s[static_cast<std::size_t>(k)] ? tp : fp)++;
    }
    TprFpr out;
    out.tpr = static_cast<double>(tp) / K0;
    if (K > K0) out.fpr = static_cast<double>(fp) / (K - K0);
    return out;
}

double theta_error(const Eigen::MatrixXd& theta_hat, const Eigen::MatrixXd& theta_true) {
    if (theta_hat.rows() != theta_hat.cols() || theta_true.rows() != theta_true.cols() ||
        theta_hat.rows() != theta_true.rows()) {
        throw input_error("interaction matrices must be square with matching dimensions");
    }
    double sum = 0.0;
    const int p = static_cast<int>(theta_hat.rows());
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (j == k) continue;
            const double d = theta_hat(j, k) - theta_true(j, k);
            sum += d * d;
        }
    }
    return std::sqrt(sum);
}

Eigen::MatrixXd neighborhood_lasso_baseline(const BinaryDataset& data,
                                            const NeighborhoodLassoOptions& options) {
    validate_binary(data.y);
    const int n = data.n();
    const int p = data.p();
    if (n < 2) throw input_error("neighborhood baseline needs at least 2 observations");
    if (p < 2) throw input_error("neighborhood baseline needs at least 2 responses");
    if (options.folds < 2) throw input_error("fold count must be at least 2");

    const Eigen::MatrixXd y = data.y.cast<double>();
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);

    for (int j = 0; j < p; ++j) {
        // One logistic lasso of y_j on y_{-j}: a stacked design with a single
        // block, so the grouped-CV machinery applies with observations = rows.
        StackedDesign d;
        d.n = n;
        d.p = 1;
        d.response = y.col(j);
        d.x.resize(n, p - 1);
        for (int c = 0; c < p - 1; ++c) {
            d.x.col(c) = y.col(c < j ? c : c + 1);
        }

        const double mean = d.response.mean();
        if (mean == 0.0 || mean == 1.0) {
            // Constant response: intercept-only fit at the clamped logit.
            const double clamp = 1.0 / (2.0 * n);
            const double pm = std::min(std::max(mean, clamp), 1.0 - clamp);
            theta(j, j) = std::log(pm / (1.0 - pm));
            continue;
        }

        const AdaptiveWeights weights = unit_weights(p - 1);
        auto seed_gen = rng::substream(options.seed, 0x4e420000ull + static_cast<std::uint64_t>(j));
        const FoldPlan plan = make_fold_plan(n, options.folds, seed_gen());
        const std::vector<double> grid = default_lambda_grid(
            lambda_max(d, weights), options.grid_length, options.grid_min_ratio);
        const CrossValidationResult cv = cross_validate_design(d, weights, plan, grid);
        const ParameterSet& est =
            cv.full_path.estimates[static_cast<std::size_t>(cv.chosen_index)];
        theta(j, j) = est.main_effects[0];
        for (int c = 0; c < p - 1; ++c) {
            theta(j, c < j ? c : c + 1) = est.alpha[c];
        }
    }

    // Symmetrize the two directed estimates of each pair by averaging.
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            const double v = 0.5 * (theta(j, k) + theta(k, j));
            theta(j, k) = v;
            theta(k, j) = v;
        }
    }
    return theta;
}

}  // namespace isingsim
