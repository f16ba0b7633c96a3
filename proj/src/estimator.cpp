#include "isingsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "isingsim/errors.hpp"

namespace isingsim {

namespace {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline ArrayXd sigmoid_arr(const ArrayXd& eta) {
    return ((-eta).exp() + 1.0).inverse();
}

inline double softplus_total(const ArrayXd& eta) {
    return (eta.max(0.0) + (-eta.abs()).exp().log1p()).sum();
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Mean negative log pseudo-likelihood at natural parameters eta.
double neg_log_pl(const StackedDesign& d, const VectorXd& eta) {
    const double np = static_cast<double>(d.rows());
    return (softplus_total(eta.array()) - d.response.dot(eta)) / np;
}

// Logistic means and the mean objective from a single transcendental pass:
// exp(-|eta|) is shared between the sigmoid and the softplus.
struct PointStats {
    ArrayXd mu;
    double neg_log_pl = 0.0;
};

PointStats point_stats(const StackedDesign& d, const VectorXd& eta) {
    PointStats s;
    const ArrayXd a = eta.array();
    const ArrayXd e = (-a.abs()).exp();
    const ArrayXd denom = 1.0 + e;
    s.mu = (a >= 0.0).select(denom.inverse(), e / denom);
    const double softplus = (a.max(0.0) + e.log1p()).sum();
    s.neg_log_pl = (softplus - d.response.dot(eta)) / static_cast<double>(d.rows());
    return s;
}

VectorXd compute_eta(const StackedDesign& d, const VectorXd& main, const VectorXd& alpha) {
    VectorXd eta = VectorXd::Zero(d.rows());
    if (alpha.size() > 0) eta.noalias() = d.x * alpha;
    if (main.size() > 0) {
        for (int j = 0; j < d.p; ++j) {
            eta.segment(static_cast<Eigen::Index>(j) * d.n, d.n).array() += main[j];
        }
    }
    return eta;
}

// Main effects solving the alpha = 0 problem in closed form: per-block
// logits of clamped response means. The clamp keeps constant blocks finite.
VectorXd intercept_only_main(const StackedDesign& d) {
    VectorXd main(d.p);
    const double clamp = 1.0 / (2.0 * d.n);
    for (int j = 0; j < d.p; ++j) {
        double mean = d.response.segment(static_cast<Eigen::Index>(j) * d.n, d.n).mean();
        mean = std::min(std::max(mean, clamp), 1.0 - clamp);
        main[j] = std::log(mean / (1.0 - mean));
    }
    return main;
}

void check_design(const StackedDesign& d) {
    if (d.n < 1 || d.p < 1) throw input_error("design is empty");
    if (d.response.size() != static_cast<Eigen::Index>(d.n) * d.p) {
        throw input_error("design response length does not match n*p");
    }
    if (d.x.rows() != d.response.size()) {
        throw input_error("design matrix row count does not match response length");
    }
    if (!d.x.allFinite()) throw input_error("design matrix has non-finite entries");
}

// Joint damped-Newton fit over all main effects (optional) and the alpha
// coordinates listed in `support`. Exact Hessian, assembled blockwise; the
// main-effects block is diagonal because block j only touches rows j*n..j*n+n.
UnregularizedFit newton_fit(const StackedDesign& d, const std::vector<int>& support,
                            bool include_main, const FitOptions& opt) {
    check_design(d);
    const int m = static_cast<int>(support.size());
    const int pm = include_main ? d.p : 0;
    const int dim = pm + m;
    const double np = static_cast<double>(d.rows());
    if (dim == 0) throw input_error("fit has no free parameters");
    for (int k : support) {
        if (k < 0 || k >= d.K()) throw input_error("support index out of range");
    }

    MatrixXd xs(d.rows(), m);
    for (int c = 0; c < m; ++c) xs.col(c) = d.x.col(support[static_cast<std::size_t>(c)]);

    VectorXd main = include_main ? intercept_only_main(d) : VectorXd();
    VectorXd alpha_s = VectorXd::Zero(m);

    VectorXd eta = compute_eta(d, main, VectorXd());
    if (m > 0) eta.noalias() += xs * alpha_s;
    double obj = neg_log_pl(d, eta);

    UnregularizedFit out;
    VectorXd grad(dim);
    MatrixXd hess(dim, dim);
    ArrayXd mu, w;
    VectorXd resid;

    int iter = 0;
    for (; iter < opt.max_newton_iter; ++iter) {
        mu = sigmoid_arr(eta.array());
        resid = (mu - d.response.array()).matrix();
        w = mu * (1.0 - mu);

        if (include_main) {
            for (int j = 0; j < d.p; ++j) {
                grad[j] = resid.segment(static_cast<Eigen::Index>(j) * d.n, d.n).sum() / np;
            }
        }
        if (m > 0) grad.tail(m).noalias() = xs.transpose() * resid / np;

        out.grad_max_norm = grad.cwiseAbs().maxCoeff();
        if (out.grad_max_norm <= opt.grad_tol) {
            out.converged = true;
            break;
        }

        hess.setZero();
        if (include_main) {
            for (int j = 0; j < d.p; ++j) {
                const Eigen::Index off = static_cast<Eigen::Index>(j) * d.n;
                hess(j, j) = w.segment(off, d.n).sum() / np;
                if (m > 0) {
                    hess.block(j, pm, 1, m).noalias() =
                        (w.segment(off, d.n).matrix().transpose() * xs.middleRows(off, d.n)) / np;
                }
            }
            if (m > 0) hess.block(pm, 0, m, pm) = hess.block(0, pm, pm, m).transpose();
        }
        if (m > 0) {
            hess.block(pm, pm, m, m).noalias() =
                xs.transpose() * (xs.array().colwise() * w).matrix() / np;
        }

        Eigen::LDLT<MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success) {
            throw numeric_error("pseudo-likelihood Hessian factorization failed");
        }
        const VectorXd step = ldlt.solve(grad);

        double t = 1.0;
        double new_obj = obj;
        VectorXd new_main, new_alpha;
        VectorXd new_eta;
        while (t > 1e-10) {
            new_main = include_main ? VectorXd(main - t * step.head(pm)) : VectorXd();
            new_alpha = m > 0 ? VectorXd(alpha_s - t * step.tail(m)) : VectorXd();
            new_eta = compute_eta(d, new_main, VectorXd());
            if (m > 0) new_eta.noalias() += xs * new_alpha;
            new_obj = neg_log_pl(d, new_eta);
            if (new_obj <= obj + 1e-14) break;
            t *= 0.5;
        }
        if (new_obj > obj + 1e-14) break;  // no descent direction left
        main = new_main;
        alpha_s = new_alpha;
        eta = std::move(new_eta);
        obj = new_obj;

        const double scale = std::max(include_main && pm > 0 ? main.cwiseAbs().maxCoeff() : 0.0,
                                      m > 0 ? alpha_s.cwiseAbs().maxCoeff() : 0.0);
        if (scale > opt.separation_bound) {
            out.separation = true;
            break;
        }
    }
    out.iterations = iter;

    out.params.main_effects = include_main ? main : VectorXd();
    out.params.alpha = VectorXd::Zero(d.K());
    for (int c = 0; c < m; ++c) out.params.alpha[support[static_cast<std::size_t>(c)]] = alpha_s[c];
    out.log_pl = -obj;
    return out;
}

}  // namespace

StackedDesign build_design(const BinaryDataset& data,
                           const std::vector<SimilarityMatrix>& sims) {
    validate_binary(data.y);
    const int n = data.n();
    const int p = data.p();
    const int K = static_cast<int>(sims.size());
    for (const auto& sim : sims) {
        if (sim.dim() != p) {
            std::ostringstream msg;
            msg << "similarity matrix '" << sim.label() << "' has dimension " << sim.dim()
                << ", data has " << p << " columns";
            throw input_error(msg.str());
        }
    }

    StackedDesign d;
    d.n = n;
    d.p = p;
    d.response.resize(static_cast<Eigen::Index>(n) * p);
    const MatrixXd y = data.y.cast<double>();
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
            d.response[static_cast<Eigen::Index>(j) * n + i] = y(i, j);
        }
    }
    d.x.resize(static_cast<Eigen::Index>(n) * p, K);
    for (int k = 0; k < K; ++k) {
        // (Y W_k^T)(i, j) = sum_{j'} y_ij' W_k[j, j']; column-major flattening
        // of the n x p product is exactly the stacked row order.
        const MatrixXd prod = y * sims[static_cast<std::size_t>(k)].values().transpose();
        d.x.col(k) = Eigen::Map<const VectorXd>(prod.data(), prod.size());
    }
    return d;
}

StackedDesign subset_design(const StackedDesign& design, const std::vector<int>& keep) {
    check_design(design);
    if (keep.empty()) throw input_error("observation subset is empty");
    for (int i : keep) {
        if (i < 0 || i >= design.n) throw input_error("observation index out of range");
    }
    StackedDesign d;
    d.n = static_cast<int>(keep.size());
    d.p = design.p;
    d.response.resize(static_cast<Eigen::Index>(d.n) * d.p);
    d.x.resize(static_cast<Eigen::Index>(d.n) * d.p, design.K());
    for (int j = 0; j < d.p; ++j) {
        const Eigen::Index src_off = static_cast<Eigen::Index>(j) * design.n;
        const Eigen::Index dst_off = static_cast<Eigen::Index>(j) * d.n;
        for (int i = 0; i < d.n; ++i) {
            d.response[dst_off + i] = design.response[src_off + keep[static_cast<std::size_t>(i)]];
            d.x.row(dst_off + i) = design.x.row(src_off + keep[static_cast<std::size_t>(i)]);
        }
    }
    return d;
}

UnregularizedFit fit_unregularized(const StackedDesign& design, const FitOptions& options) {
    std::vector<int> all(static_cast<std::size_t>(design.K()));
    std::iota(all.begin(), all.end(), 0);
    return newton_fit(design, all, options.include_main_effects, options);
}

UnregularizedFit fit_oracle(const StackedDesign& design, const std::vector<int>& support,
                            const FitOptions& options) {
    std::vector<int> s = support;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw input_error("oracle support has duplicate indices");
    }
    return newton_fit(design, s, options.include_main_effects, options);
}

int AdaptiveWeights::n_excluded() const {
    return static_cast<int>(std::count(excluded.begin(), excluded.end(), char{1}));
}

AdaptiveWeights adaptive_weights(const Eigen::VectorXd& alpha_bar, double zero_tol) {
    AdaptiveWeights w;
    const int K = static_cast<int>(alpha_bar.size());
    w.weights = VectorXd::Ones(K);
    w.excluded.assign(static_cast<std::size_t>(K), 0);
    for (int k = 0; k < K; ++k) {
        const double a = std::abs(alpha_bar[k]);
        if (a < zero_tol) {
            w.excluded[static_cast<std::size_t>(k)] = 1;
        } else {
            w.weights[k] = 1.0 / a;
        }
    }
    return w;
}

AdaptiveWeights unit_weights(int K) {
    if (K < 0) throw input_error("negative coefficient count");
    AdaptiveWeights w;
    w.weights = VectorXd::Ones(K);
    w.excluded.assign(static_cast<std::size_t>(K), 0);
    return w;
}

namespace {

void check_penalty(const PenaltySpec& pen, int K) {
    if (pen.lambda < 0.0 || !std::isfinite(pen.lambda)) {
        throw input_error("lambda must be non-negative and finite");
    }
    if (static_cast<int>(pen.weights.size()) != K) {
        throw input_error("penalty weights length does not match coefficient count");
    }
    if (!pen.excluded.empty() && static_cast<int>(pen.excluded.size()) != K) {
        throw input_error("penalty exclusion mask length does not match coefficient count");
    }
    for (int k = 0; k < K; ++k) {
        const bool excl = !pen.excluded.empty() && pen.excluded[static_cast<std::size_t>(k)];
        if (!excl && !(pen.weights[k] > 0.0 && std::isfinite(pen.weights[k]))) {
            throw input_error("penalty weights must be positive and finite");
        }
    }
}

struct CdState {
    VectorXd main;   // empty when main effects are excluded from the model
    VectorXd alpha;  // length K
    VectorXd eta;    // maintained incrementally across coordinate steps
};

// Per-design quantities shared by every fit on the same design: the
// coefficient Gram matrix and each column's sum within each intercept block.
struct DesignCache {
    MatrixXd gram;        // x^T x
    MatrixXd block_sums;  // (k, j): column k summed over the rows of block j
};

DesignCache build_design_cache(const StackedDesign& d) {
    DesignCache c;
    c.gram.noalias() = d.x.transpose() * d.x;
    c.block_sums.resize(d.K(), d.p);
    for (int j = 0; j < d.p; ++j) {
        c.block_sums.col(j) = d.x.middleRows(static_cast<Eigen::Index>(j) * d.n, d.n)
                                  .colwise()
                                  .sum()
                                  .transpose();
    }
    return c;
}

// Majorization solver. Each cycle evaluates the point once (one
// transcendental pass, one gradient GEMV), scans the KKT system, and then
// minimizes the curvature-1/4 quadratic upper model over the working set by
// coordinate descent on cached inner products, so no coordinate update
// touches the n*p rows. Main effects are profiled out of the quadratic in
// closed form, which centers every column within its intercept blocks. The
// loop ends when the KKT residual passes, the cycle budget runs out, or
// progress stalls below obj_rel_tol.
PenalizedFit fit_penalized_impl(const StackedDesign& d, const PenaltySpec& penalty,
                                const ParameterSet* warm_start, const FitOptions& options,
                                const DesignCache& cache) {
    const int K = d.K();
    const int p = d.p;
    const int n = d.n;
    const double np = static_cast<double>(d.rows());
    check_penalty(penalty, K);

    const bool with_main = options.include_main_effects;

    // Majorization curvatures: the logistic second derivative is at most 1/4.
    // The raw column norm stays a valid bound for the centered subproblem.
    VectorXd h_alpha(K);
    std::vector<char> frozen(static_cast<std::size_t>(K), 0);
    for (int k = 0; k < K; ++k) {
        const double c = cache.gram(k, k) / (4.0 * np);
        h_alpha[k] = c;
        const bool excl = !penalty.excluded.empty() && penalty.excluded[static_cast<std::size_t>(k)];
        if (excl || c == 0.0) frozen[static_cast<std::size_t>(k)] = 1;
    }

    CdState s;
    if (warm_start != nullptr) {
        if (warm_start->K() != K) throw input_error("warm start has wrong coefficient count");
        if (with_main && warm_start->p() != p) {
            throw input_error("warm start has wrong main-effect count");
        }
        s.main = with_main ? warm_start->main_effects : VectorXd();
        s.alpha = warm_start->alpha;
        for (int k = 0; k < K; ++k) {
            if (frozen[static_cast<std::size_t>(k)]) s.alpha[k] = 0.0;
        }
    } else {
        s.main = with_main ? intercept_only_main(d) : VectorXd();
        s.alpha = VectorXd::Zero(K);
    }
    s.eta = compute_eta(d, s.main, s.alpha);

    PenalizedFit out;
    double obj = std::numeric_limits<double>::infinity();
    double log_pl = 0.0;

    std::vector<int> working;
    std::vector<char> in_working(static_cast<std::size_t>(K), 0);
    for (int k = 0; k < K; ++k) {
        if (s.alpha[k] != 0.0) {
            working.push_back(k);
            in_working[static_cast<std::size_t>(k)] = 1;
        }
    }

    VectorXd grad_full(K);
    VectorXd grad_main = with_main ? VectorXd(p) : VectorXd();
    VectorXd gtilde(K);
    VectorXd delta = VectorXd::Zero(K);
    VectorXd wsum = with_main ? VectorXd(p) : VectorXd();

    int cycles = 0;
    while (true) {
        const PointStats stats = point_stats(d, s.eta);
        const VectorXd resid = (stats.mu - d.response.array()).matrix();
        grad_full.noalias() = d.x.transpose() * resid / np;
        if (with_main) {
            for (int j = 0; j < p; ++j) {
                grad_main[j] = resid.segment(static_cast<Eigen::Index>(j) * n, n).sum() / np;
            }
        }
        log_pl = -stats.neg_log_pl;

        double pen_val = 0.0;
        for (int k = 0; k < K; ++k) {
            if (s.alpha[k] != 0.0) pen_val += penalty.weights[k] * std::abs(s.alpha[k]);
        }
        const double new_obj = stats.neg_log_pl + penalty.lambda * pen_val;
        if (new_obj > obj + 1e-10 * (1.0 + std::abs(obj))) out.monotone = false;
        const bool stalled = cycles > 0 && options.obj_rel_tol > 0.0 &&
                             std::abs(obj - new_obj) <
                                 options.obj_rel_tol * (1.0 + std::abs(new_obj));
        obj = new_obj;

        // KKT scan: active coordinates must balance the penalty sign, idle
        // ones must stay inside it, and the residual block means must vanish.
        // Violating idle coordinates join the working set at once.
        double kkt = 0.0;
        if (with_main) {
            for (int j = 0; j < p; ++j) kkt = std::max(kkt, std::abs(grad_main[j]));
        }
        bool grew = false;
        for (int k = 0; k < K; ++k) {
            if (frozen[static_cast<std::size_t>(k)]) continue;
            const double thr = penalty.lambda * penalty.weights[k];
            if (s.alpha[k] != 0.0) {
                kkt = std::max(kkt, std::abs(grad_full[k] + thr * (s.alpha[k] > 0 ? 1.0 : -1.0)));
            } else {
                const double excess = std::abs(grad_full[k]) - thr;
                kkt = std::max(kkt, std::max(0.0, excess));
                if (excess > options.kkt_tol && !in_working[static_cast<std::size_t>(k)]) {
                    working.push_back(k);
                    in_working[static_cast<std::size_t>(k)] = 1;
                    grew = true;
                }
            }
        }
        out.kkt_residual = kkt;
        if (kkt <= options.kkt_tol) {
            out.converged = true;
            break;
        }
        if (cycles >= options.max_cycles) break;
        if (stalled && !grew) break;

        for (int k : working) {
            gtilde[k] = grad_full[k];
            if (with_main) gtilde[k] -= cache.block_sums.row(k).dot(grad_main) / n;
        }

        // Quadratic subproblem over the working set; wsum tracks
        // block_sums^T * delta for the centering terms.
        delta.setZero();
        if (with_main) wsum.setZero();
        const double move_tol =
            1e-10 * (1.0 + (K > 0 ? s.alpha.cwiseAbs().maxCoeff() : 0.0));
        for (int sweep = 0; sweep < 1000; ++sweep) {
            double max_move = 0.0;
            for (int k : working) {
                double quad = 0.0;
                for (int kk : working) {
                    if (delta[kk] != 0.0) quad += cache.gram(k, kk) * delta[kk];
                }
                if (with_main) quad -= cache.block_sums.row(k).dot(wsum) / n;
                const double g = gtilde[k] + quad / (4.0 * np);
                const double cur = s.alpha[k] + delta[k];
                const double z = cur - g / h_alpha[k];
                const double target =
                    soft_threshold(z, penalty.lambda * penalty.weights[k] / h_alpha[k]);
                const double step = target - cur;
                if (step != 0.0) {
                    delta[k] += step;
                    if (with_main) wsum.noalias() += step * cache.block_sums.row(k).transpose();
                    max_move = std::max(max_move, std::abs(step));
                }
            }
            if (max_move <= move_tol) break;
        }

        double applied = 0.0;
        for (int k : working) {
            if (delta[k] != 0.0) {
                s.alpha[k] += delta[k];
                s.eta.noalias() += delta[k] * d.x.col(k);
                applied = std::max(applied, std::abs(delta[k]));
            }
        }
        if (with_main) {
            // Exact minimizer of the quadratic model in the main effects
            // given the coefficient movement.
            for (int j = 0; j < p; ++j) {
                const double dm = -4.0 * static_cast<double>(p) * grad_main[j] -
                                  wsum[j] / static_cast<double>(n);
                if (dm != 0.0) {
                    s.main[j] += dm;
                    s.eta.segment(static_cast<Eigen::Index>(j) * n, n).array() += dm;
                    applied = std::max(applied, std::abs(dm));
                }
            }
        }
        ++cycles;
        if (applied == 0.0) break;  // below representable movement
    }

    out.cycles = cycles;
    out.params.main_effects = s.main;
    out.params.alpha = s.alpha;
    out.objective = obj;
    out.log_pl = log_pl;
    for (int k = 0; k < K; ++k) {
        if (s.alpha[k] != 0.0) out.active.push_back(k);
    }
    return out;
}

}  // namespace

PenalizedFit fit_penalized(const StackedDesign& d, const PenaltySpec& penalty,
                           const ParameterSet* warm_start, const FitOptions& options) {
    check_design(d);
    return fit_penalized_impl(d, penalty, warm_start, options, build_design_cache(d));
}

double lambda_max(const StackedDesign& d, const AdaptiveWeights& weights) {
    check_design(d);
    const int K = d.K();
    if (static_cast<int>(weights.weights.size()) != K) {
        throw input_error("weights length does not match design");
    }
    const VectorXd main = intercept_only_main(d);
    const VectorXd eta = compute_eta(d, main, VectorXd::Zero(K));
    const ArrayXd mu = sigmoid_arr(eta.array());
    const VectorXd grad = d.x.transpose() * (mu - d.response.array()).matrix() /
                          static_cast<double>(d.rows());
    double lmax = 0.0;
    for (int k = 0; k < K; ++k) {
        if (!weights.excluded.empty() && weights.excluded[static_cast<std::size_t>(k)]) continue;
        lmax = std::max(lmax, std::abs(grad[k]) / weights.weights[k]);
    }
    return lmax;
}

std::vector<double> default_lambda_grid(double lambda_max, int length, double min_ratio) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw input_error("lambda_max must be positive and finite");
    }
    if (length < 2) throw input_error("lambda grid needs at least 2 points");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
        throw input_error("lambda grid ratio must be in (0, 1)");
    }
    std::vector<double> grid(static_cast<std::size_t>(length));
    const double log_max = std::log(lambda_max);
    const double log_min = std::log(lambda_max * min_ratio);
    for (int i = 0; i < length; ++i) {
        const double f = static_cast<double>(i) / (length - 1);
        grid[static_cast<std::size_t>(i)] = std::exp(log_max + f * (log_min - log_max));
    }
    // Keep the first point's active set empty under roundoff: the largest
    // weighted score equals lambda_max exactly by construction.
    grid.front() = lambda_max * (1.0 + 1e-10);
    return grid;
}

PathResult fit_path(const StackedDesign& d, const AdaptiveWeights& weights,
                    std::vector<double> grid, const FitOptions& options) {
    check_design(d);
    const int K = d.K();
    if (static_cast<int>(weights.weights.size()) != K) {
        throw input_error("weights length does not match design");
    }

    PathResult path;
    path.lambda_max_value = lambda_max(d, weights);
    if (grid.empty()) {
        grid = default_lambda_grid(path.lambda_max_value);
    } else {
        for (double l : grid) {
            if (!(l >= 0.0) || !std::isfinite(l)) {
                throw input_error("lambda grid entries must be non-negative and finite");
            }
        }
        std::sort(grid.begin(), grid.end(), std::greater<double>());
    }

    PenaltySpec pen;
    pen.weights = weights.weights;
    pen.excluded = weights.excluded;

    // Every path point shares one design cache.
    const DesignCache cache = build_design_cache(d);

    const ParameterSet* warm = nullptr;
    ParameterSet prev;
    for (double l : grid) {
        pen.lambda = l;
        PenalizedFit fit = fit_penalized_impl(d, pen, warm, options, cache);
        path.lambdas.push_back(l);
        path.estimates.push_back(fit.params);
        path.objectives.push_back(fit.objective);
        path.log_pl.push_back(fit.log_pl);
        path.kkt_residuals.push_back(fit.kkt_residual);
        path.active_sets.push_back(fit.active);
        path.converged.push_back(fit.converged ? 1 : 0);
        path.cycles.push_back(fit.cycles);
        prev = path.estimates.back();
        warm = &prev;
    }
    return path;
}

double design_log_pl(const StackedDesign& d, const ParameterSet& params) {
    check_design(d);
    if (params.K() != d.K()) throw input_error("parameter count does not match design");
    VectorXd main;
    if (params.p() == d.p) {
        main = params.main_effects;
    } else if (params.p() != 0) {
        throw input_error("main-effect count does not match design");
    }
    const VectorXd eta = compute_eta(d, main, params.alpha);
    return -neg_log_pl(d, eta);
}

VectorXd design_log_pl_gradient(const StackedDesign& d, const ParameterSet& params) {
    check_design(d);
    if (params.K() != d.K()) throw input_error("parameter count does not match design");
    const bool with_main = params.p() != 0;
    if (with_main && params.p() != d.p) throw input_error("main-effect count does not match design");
    VectorXd main;
    if (with_main) main = params.main_effects;
    const VectorXd eta = compute_eta(d, main, params.alpha);
    const ArrayXd resid = d.response.array() - sigmoid_arr(eta.array());
    const double np = static_cast<double>(d.rows());
    const int off = with_main ? d.p : 0;
    VectorXd grad(off + d.K());
    if (with_main) {
        for (int j = 0; j < d.p; ++j) grad[j] = resid.segment(j * d.n, d.n).sum() / np;
    }
    grad.segment(off, d.K()) = d.x.transpose() * resid.matrix() / np;
    return grad;
}

RegularityDiagnostics check_regularity(const StackedDesign& d, const ParameterSet& at,
                                       const std::vector<int>& support) {
    check_design(d);
    const int K = d.K();
    for (int k : support) {
        if (k < 0 || k >= K) throw input_error("support index out of range");
    }
    VectorXd main;
    if (at.p() == d.p) main = at.main_effects;
    const VectorXd eta = compute_eta(d, main, at.alpha);
    const ArrayXd mu = sigmoid_arr(eta.array());
    const ArrayXd w = mu * (1.0 - mu);
    const double np = static_cast<double>(d.rows());

    RegularityDiagnostics diag;
    diag.m_hat = d.x.transpose() * (d.x.array().colwise() * w).matrix() / np;
    const MatrixXd gram = d.x.transpose() * d.x / np;
    if (K == 0) return diag;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eg(gram);
    diag.gram_max_eigenvalue = eg.eigenvalues().maxCoeff();

    const int s = static_cast<int>(support.size());
    if (s == 0) return diag;
    MatrixXd mss(s, s);
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            mss(a, b) = diag.m_hat(support[static_cast<std::size_t>(a)],
                                   support[static_cast<std::size_t>(b)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> ess(mss);
    diag.min_eigenvalue_support = ess.eigenvalues().minCoeff();
    if (diag.min_eigenvalue_support <= 1e-12) {
        diag.support_block_singular = true;
        return diag;
    }

    std::vector<char> in_s(static_cast<std::size_t>(K), 0);
    for (int k : support) in_s[static_cast<std::size_t>(k)] = 1;
    const MatrixXd mss_inv = mss.inverse();
    double inco = 0.0;
    Eigen::RowVectorXd row(s);
    for (int k = 0; k < K; ++k) {
        if (in_s[static_cast<std::size_t>(k)]) continue;
        for (int b = 0; b < s; ++b) {
            row[b] = diag.m_hat(k, support[static_cast<std::size_t>(b)]);
        }
        inco = std::max(inco, (row * mss_inv).cwiseAbs().sum());
    }
    diag.incoherence = inco;
    return diag;
}

}  // namespace isingsim
