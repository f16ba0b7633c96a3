#include "isingsim/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "isingsim/errors.hpp"
#include "isingsim/rng.hpp"

namespace isingsim {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kWaldQuantile = 1.959964;  // standard normal 97.5% point

// A response block constant across all observations cannot support a
// main-effect fit; training folds with one are excluded from CV.
bool has_constant_block(const StackedDesign& design) {
    for (int j = 0; j < design.p; ++j) {
        const auto block = design.response.segment(static_cast<Eigen::Index>(j) * design.n,
                                                   design.n);
        if (block.minCoeff() == block.maxCoeff()) return true;
    }
    return false;
}

int argmax_prefer_first(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

int argmin_prefer_first(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[static_cast<std::size_t>(i)] < v[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

}  // namespace

FoldPlan make_fold_plan(int n, int folds, std::uint64_t seed) {
    if (n < 2) throw input_error("fold plan needs at least 2 observations");
    if (folds < 2 || folds > n) {
        std::ostringstream msg;
        msg << "fold count must be in [2, n]; got " << folds << " with n = " << n;
        throw input_error(msg.str());
    }
    FoldPlan plan;
    plan.n = n;
    plan.folds = folds;
    plan.seed = seed;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto gen = rng::substream(seed, 0x464f4c44ull);  // fold-plan stream
    rng::shuffle(order, gen);
    plan.assignment.assign(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < n; ++t) {
        plan.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] =
            t % folds;
    }
    return plan;
}

CrossValidationResult cross_validate_design(const StackedDesign& design,
                                            const AdaptiveWeights& weights,
                                            const FoldPlan& plan,
                                            std::vector<double> grid,
                                            const FitOptions& options) {
    if (plan.n != design.n) throw input_error("fold plan does not match design size");
    if (static_cast<int>(plan.assignment.size()) != plan.n) {
        throw input_error("fold plan assignment has wrong length");
    }
    for (int f : plan.assignment) {
        if (f < 0 || f >= plan.folds) throw input_error("fold assignment out of range");
    }

    CrossValidationResult out;
    // Full-data path first: fixes the grid (when defaulted) shared by every
    // fold and by any IC evaluated against the same path.
    out.full_path = fit_path(design, weights, grid, options);
    const std::vector<double>& lambdas = out.full_path.lambdas;
    const int L = out.full_path.size();
    out.lambdas = lambdas;

    out.fold_scores = MatrixXd::Constant(plan.folds, L,
                                         std::numeric_limits<double>::quiet_NaN());
    out.fold_flagged.assign(static_cast<std::size_t>(plan.folds), 0);

    for (int f = 0; f < plan.folds; ++f) {
        std::vector<int> train, test;
        for (int i = 0; i < plan.n; ++i) {
            (plan.assignment[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        }
        if (test.empty() || train.empty()) {
            throw input_error("fold " + std::to_string(f) + " is degenerate");
        }
        const StackedDesign train_design = subset_design(design, train);
        if (options.include_main_effects && has_constant_block(train_design)) {
            out.fold_flagged[static_cast<std::size_t>(f)] = 1;
            out.warnings.push_back("fold " + std::to_string(f) +
                                   " has a constant response column; excluded from CV");
            continue;
        }
        const StackedDesign test_design = subset_design(design, test);
        const PathResult fold_path = fit_path(train_design, weights, lambdas, options);
        for (int l = 0; l < L; ++l) {
            out.fold_scores(f, l) =
                design_log_pl(test_design, fold_path.estimates[static_cast<std::size_t>(l)]);
        }
    }

    out.mean_score.assign(static_cast<std::size_t>(L), 0.0);
    int used = 0;
    for (int f = 0; f < plan.folds; ++f) {
        if (out.fold_flagged[static_cast<std::size_t>(f)]) continue;
        ++used;
        for (int l = 0; l < L; ++l) {
            out.mean_score[static_cast<std::size_t>(l)] += out.fold_scores(f, l);
        }
    }
    if (used == 0) {
        throw numeric_error("every cross-validation fold was flagged; cannot choose lambda");
    }
    for (double& s : out.mean_score) s /= used;

    // Grid is descending, so preferring the first maximum breaks ties toward
    // the larger (sparser) lambda.
    out.chosen_index = argmax_prefer_first(out.mean_score);
    out.chosen_lambda = lambdas[static_cast<std::size_t>(out.chosen_index)];
    return out;
}

CrossValidationResult cross_validate(const BinaryDataset& data,
                                     const std::vector<SimilarityMatrix>& sims,
                                     const AdaptiveWeights& weights,
                                     const FoldPlan& plan,
                                     std::vector<double> grid,
                                     const FitOptions& options) {
    const StackedDesign design = build_design(data, sims);
    return cross_validate_design(design, weights, plan, std::move(grid), options);
}

IcResult select_ic(const PathResult& path, int n, int p, InformationCriterion criterion) {
    if (path.size() == 0) throw input_error("empty path");
    if (n < 1 || p < 1) throw input_error("invalid dimensions for information criterion");
    const double np = static_cast<double>(n) * p;
    const double complexity = criterion == InformationCriterion::aic ? 2.0 : std::log(np);

    IcResult out;
    out.lambdas = path.lambdas;
    for (int l = 0; l < path.size(); ++l) {
        const int df = static_cast<int>(path.active_sets[static_cast<std::size_t>(l)].size()) + p;
        out.df.push_back(df);
        out.values.push_back(-2.0 * np * path.log_pl[static_cast<std::size_t>(l)] +
                             complexity * df);
    }
    out.chosen_index = argmin_prefer_first(out.values);
    out.chosen_lambda = out.lambdas[static_cast<std::size_t>(out.chosen_index)];
    return out;
}

IcResult select_ic(const BinaryDataset& data, const std::vector<SimilarityMatrix>& sims,
                   const AdaptiveWeights& weights, InformationCriterion criterion,
                   std::vector<double> grid, const FitOptions& options) {
    const StackedDesign design = build_design(data, sims);
    const PathResult path = fit_path(design, weights, std::move(grid), options);
    return select_ic(path, design.n, design.p, criterion);
}

SandwichResult sandwich_inference(const BinaryDataset& data,
                                  const std::vector<SimilarityMatrix>& sims,
                                  const std::vector<int>& support,
                                  const FitOptions& options) {
    const StackedDesign design = build_design(data, sims);

    std::vector<int> s = support;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());

    SandwichResult out;
    out.support = s;
    const UnregularizedFit refit = fit_oracle(design, s, options);
    out.refit = refit.params;
    out.refit_converged = refit.converged;
    out.refit_separation = refit.separation;
    out.refit_log_pl = refit.log_pl;
    if (refit.separation) {
        throw numeric_error("post-selection refit shows separation; intervals unavailable");
    }
    if (!refit.converged) {
        throw numeric_error("post-selection refit did not converge");
    }

    const int n = design.n;
    const int p = design.p;
    const int m = static_cast<int>(s.size());
    const int dim = p + m;

    MatrixXd xs(design.rows(), m);
    for (int c = 0; c < m; ++c) xs.col(c) = design.x.col(s[static_cast<std::size_t>(c)]);
    VectorXd alpha_s(m);
    for (int c = 0; c < m; ++c) alpha_s[c] = refit.params.alpha[s[static_cast<std::size_t>(c)]];

    VectorXd eta(design.rows());
    for (int j = 0; j < p; ++j) {
        eta.segment(static_cast<Eigen::Index>(j) * n, n).setConstant(
            refit.params.main_effects[j]);
    }
    if (m > 0) eta.noalias() += xs * alpha_s;

    const Eigen::ArrayXd mu = (1.0 + (-eta.array()).exp()).inverse();
    const Eigen::ArrayXd resid = design.response.array() - mu;  // score residual y - mu
    const Eigen::ArrayXd w = mu * (1.0 - mu);

    // Bread: A = sum_i H_i, assembled over all rows at once (row (i,j)'s
    // covariate vector is e_j for the main block and x_S(i,j) for alpha).
    MatrixXd a = MatrixXd::Zero(dim, dim);
    for (int j = 0; j < p; ++j) {
        const Eigen::Index off = static_cast<Eigen::Index>(j) * n;
        a(j, j) = w.segment(off, n).sum();
        if (m > 0) {
            a.block(j, p, 1, m).noalias() =
                w.segment(off, n).matrix().transpose() * xs.middleRows(off, n);
        }
    }
    if (m > 0) {
        a.block(p, 0, m, p) = a.block(0, p, p, m).transpose();
        a.block(p, p, m, m).noalias() =
            xs.transpose() * (xs.array().colwise() * w).matrix();
    }

    // Meat: B = sum_i s_i s_i' with the observation-level score s_i summing
    // the p per-response contributions (clustered by observation).
    MatrixXd b = MatrixXd::Zero(dim, dim);
    VectorXd si(dim);
    for (int i = 0; i < n; ++i) {
        si.setZero();
        for (int j = 0; j < p; ++j) {
            const Eigen::Index r = static_cast<Eigen::Index>(j) * n + i;
            const double rr = resid[r];
            si[j] = rr;
            if (m > 0) si.tail(m).noalias() += rr * xs.row(r).transpose();
        }
        b.noalias() += si * si.transpose();
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    const double eig_min = es.eigenvalues().minCoeff();
    const double eig_max = es.eigenvalues().maxCoeff();
    out.bread_condition = eig_min > 0.0 ? eig_max / eig_min
                                        : std::numeric_limits<double>::infinity();
    if (eig_min <= 1e-12 * std::max(1.0, eig_max)) {
        std::ostringstream msg;
        msg << "sandwich bread matrix is singular (condition number ";
        if (std::isfinite(out.bread_condition)) {
            msg << out.bread_condition;
        } else {
            msg << "infinite, min eigenvalue " << eig_min;
        }
        msg << ")";
        throw numeric_error(msg.str());
    }

    const MatrixXd a_inv = es.eigenvectors() *
                           es.eigenvalues().cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();
    const MatrixXd v = a_inv * b * a_inv;

    out.se_main.resize(p);
    out.main_intervals.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double se = std::sqrt(std::max(0.0, v(j, j)));
        const double est = refit.params.main_effects[j];
        out.se_main[j] = se;
        out.main_intervals[static_cast<std::size_t>(j)] =
            WaldInterval{est, se, est - kWaldQuantile * se, est + kWaldQuantile * se};
    }
    out.se_alpha.resize(m);
    out.alpha_intervals.resize(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        const double se = std::sqrt(std::max(0.0, v(p + c, p + c)));
        const double est = alpha_s[c];
        out.se_alpha[c] = se;
        out.alpha_intervals[static_cast<std::size_t>(c)] =
            WaldInterval{est, se, est - kWaldQuantile * se, est + kWaldQuantile * se};
    }
    return out;
}

double pseudo_r2(double fit_log_pl_sum, double null_log_pl_sum) {
    if (!(null_log_pl_sum < 0.0)) {
        throw input_error("null log pseudo-likelihood must be negative");
    }
    if (fit_log_pl_sum > 0.0) {
        throw input_error("fitted log pseudo-likelihood must be non-positive");
    }
    return 1.0 - fit_log_pl_sum / null_log_pl_sum;
}

FitResult fit_model(const BinaryDataset& data, const std::vector<SimilarityMatrix>& sims,
                    const FitModelOptions& options) {
    if (sims.empty()) throw input_error("at least one similarity source required");
    const StackedDesign design = build_design(data, sims);
    const int n = design.n;
    const int p = design.p;
    const int K = design.K();
    const double np = static_cast<double>(n) * p;

    FitResult res;
    res.tune = options.tune == TuneMethod::cv    ? "cv"
               : options.tune == TuneMethod::aic ? "aic"
               : options.tune == TuneMethod::bic ? "bic"
                                                 : "fixed";
    res.penalty = options.penalty == PenaltyVariant::adaptive ? "adaptive"
                  : options.penalty == PenaltyVariant::lasso  ? "lasso"
                  : options.penalty == PenaltyVariant::none   ? "none"
                                                              : "oracle";
    res.seed = options.seed;
    res.folds = options.folds;
    res.n = n;
    res.p = p;
    res.K = K;
    res.grad_tol = options.solver.grad_tol;
    res.obj_rel_tol = options.solver.obj_rel_tol;
    res.kkt_tol = options.solver.kkt_tol;
    res.max_cycles = options.solver.max_cycles;
    for (const auto& sim : sims) res.similarity_labels.push_back(sim.label());
    res.response_labels = data.labels;

    // Intercept-only null model, the reference for pseudo-R^2.
    const UnregularizedFit null_fit = fit_oracle(design, {}, options.solver);
    res.null_log_pl_sum = null_fit.log_pl * np;

    std::vector<int> active;
    if (options.penalty == PenaltyVariant::none) {
        const UnregularizedFit pilot = fit_unregularized(design, options.solver);
        res.pilot_converged = pilot.converged;
        res.pilot_separation = pilot.separation;
        if (pilot.separation) {
            res.warnings.push_back("unregularized fit shows separation");
        }
        res.main_effects = pilot.params.main_effects;
        res.alpha = pilot.params.alpha;
        res.chosen_lambda = 0.0;
        active.resize(static_cast<std::size_t>(K));
        std::iota(active.begin(), active.end(), 0);
    } else if (options.penalty == PenaltyVariant::oracle) {
        for (int k : options.oracle_support) {
            if (k < 0 || k >= K) throw input_error("oracle support index out of range");
        }
        const UnregularizedFit fit = fit_oracle(design, options.oracle_support, options.solver);
        res.pilot_converged = fit.converged;
        res.pilot_separation = fit.separation;
        res.main_effects = fit.params.main_effects;
        res.alpha = fit.params.alpha;
        res.chosen_lambda = 0.0;
        active = options.oracle_support;
        std::sort(active.begin(), active.end());
    } else {
        AdaptiveWeights weights;
        if (options.penalty == PenaltyVariant::adaptive) {
            const UnregularizedFit pilot = fit_unregularized(design, options.solver);
            res.pilot_converged = pilot.converged;
            res.pilot_separation = pilot.separation;
            if (pilot.separation) {
                res.warnings.push_back(
                    "pilot fit shows separation; adaptive weights may be unreliable");
            }
            weights = adaptive_weights(pilot.params.alpha);
        } else {
            res.pilot_converged = true;
            weights = unit_weights(K);
        }

        if (weights.n_excluded() == K) {
            // Every coefficient is pinned at zero; nothing to tune.
            res.warnings.push_back("all coefficients force-excluded by adaptive weights");
            res.main_effects = null_fit.params.main_effects;
            res.alpha = VectorXd::Zero(K);
            res.chosen_lambda = 0.0;
        } else if (options.tune == TuneMethod::fixed) {
            if (!(options.fixed_lambda >= 0.0)) {
                throw input_error("fixed tuning requires a non-negative lambda");
            }
            PenaltySpec pen;
            pen.lambda = options.fixed_lambda;
            pen.weights = weights.weights;
            pen.excluded = weights.excluded;
            const PenalizedFit fit = fit_penalized(design, pen, nullptr, options.solver);
            res.lambda_grid = {options.fixed_lambda};
            res.chosen_lambda = options.fixed_lambda;
            res.chosen_index = 0;
            res.main_effects = fit.params.main_effects;
            res.alpha = fit.params.alpha;
            res.kkt_residual = fit.kkt_residual;
            if (!fit.converged) res.warnings.push_back("penalized fit did not converge");
        } else {
            std::vector<double> grid = options.lambda_grid;
            if (grid.empty()) {
                grid = default_lambda_grid(lambda_max(design, weights),
                                           options.grid_length, options.grid_min_ratio);
            }
            int chosen = -1;
            const PathResult* path = nullptr;
            PathResult ic_path;
            CrossValidationResult cv;
            if (options.tune == TuneMethod::cv) {
                const FoldPlan plan = make_fold_plan(n, options.folds, options.seed);
                cv = cross_validate_design(design, weights, plan, grid, options.solver);
                chosen = cv.chosen_index;
                path = &cv.full_path;
                res.cv_mean_score = cv.mean_score;
                res.cv_fold_scores = cv.fold_scores;
                res.cv_fold_flagged = cv.fold_flagged;
                for (const auto& wmsg : cv.warnings) res.warnings.push_back(wmsg);
            } else {
                ic_path = fit_path(design, weights, grid, options.solver);
                const IcResult ic = select_ic(
                    ic_path, n, p,
                    options.tune == TuneMethod::aic ? InformationCriterion::aic
                                                    : InformationCriterion::bic);
                chosen = ic.chosen_index;
                path = &ic_path;
                res.ic_values = ic.values;
                res.ic_df = ic.df;
            }
            res.lambda_grid = path->lambdas;
            res.chosen_index = chosen;
            res.chosen_lambda = path->lambdas[static_cast<std::size_t>(chosen)];
            const ParameterSet& est = path->estimates[static_cast<std::size_t>(chosen)];
            res.main_effects = est.main_effects;
            res.alpha = est.alpha;
            res.kkt_residual = path->kkt_residuals[static_cast<std::size_t>(chosen)];
            if (!path->converged[static_cast<std::size_t>(chosen)]) {
                res.warnings.push_back("penalized fit at the chosen lambda did not converge");
            }
        }
        for (int k = 0; k < K; ++k) {
            if (res.alpha.size() == K && res.alpha[k] != 0.0) active.push_back(k);
        }
    }

    res.active = active;

    const SandwichResult inference = sandwich_inference(data, sims, active, options.solver);
    res.refit_main = inference.refit.main_effects;
    res.refit_alpha.resize(static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c) {
        res.refit_alpha[static_cast<Eigen::Index>(c)] =
            inference.refit.alpha[active[c]];
    }
    res.se_alpha = inference.se_alpha;
    res.alpha_intervals = inference.alpha_intervals;
    res.se_main = inference.se_main;
    res.main_intervals = inference.main_intervals;
    res.refit_converged = inference.refit_converged;
    res.fit_log_pl_sum = inference.refit_log_pl * np;
    res.pseudo_r2_value = pseudo_r2(res.fit_log_pl_sum, res.null_log_pl_sum);
    return res;
}

}  // namespace isingsim
