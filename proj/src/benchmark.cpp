#include "isingsim/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "isingsim/errors.hpp"
#include "isingsim/estimator.hpp"
#include "isingsim/rng.hpp"
#include "isingsim/selection.hpp"

namespace isingsim {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

void check_spec(const ScenarioSpec& spec) {
    if (spec.n < 2) throw input_error("scenario needs n >= 2");
    if (spec.p < 2) throw input_error("scenario needs p >= 2");
    if (spec.K < 1) throw input_error("scenario needs K >= 1");
    if (spec.K0 < 1 || spec.K0 > spec.K) {
        throw input_error("scenario needs 1 <= K0 <= K");
    }
    if (spec.replicates < 1) throw input_error("scenario needs at least 1 replicate");
    if (!(spec.alpha_low > 0.0 && spec.alpha_high >= spec.alpha_low)) {
        throw input_error("scenario alpha magnitude range is invalid");
    }
    if (!(spec.theta_high >= spec.theta_low)) {
        throw input_error("scenario theta range is invalid");
    }
    if (spec.max_degree < 1) throw input_error("scenario max degree must be positive");
    if (spec.estimators.empty()) throw input_error("scenario lists no estimators");
    static const std::set<std::string> known = {"oracle", "regularized", "lasso",
                                                "unregularized"};
    for (const auto& e : spec.estimators) {
        if (!known.count(e)) throw input_error("unknown estimator '" + e + "'");
    }
}

double uniform_in(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * rng::uniform(gen);
}

// Stream tags. Truth streams depend on (p, K, K0) but never on n, so the
// same truth underlies every sample size of a scenario family.
std::uint64_t truth_tag(const ScenarioSpec& spec, std::uint64_t salt) {
    std::uint64_t h = 0xcbf29ce484222325ull ^ salt;
    for (std::uint64_t v : {static_cast<std::uint64_t>(spec.p),
                            static_cast<std::uint64_t>(spec.K),
                            static_cast<std::uint64_t>(spec.K0)}) {
        h ^= v;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

std::uint64_t dataset_hash(const BinaryDataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64 offset basis
    const std::uint8_t* bytes = data.y.data();
    const std::size_t size = static_cast<std::size_t>(data.y.size());
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

ScenarioTruth generate_truth(const ScenarioSpec& spec) {
    check_spec(spec);
    ScenarioTruth out;

    // Sparse symmetric 0/1 similarity matrices with bounded row sums.
    for (int k = 0; k < spec.K; ++k) {
        auto gen = rng::substream(spec.seed, truth_tag(spec, 0x57490000ull + k));
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(spec.p, spec.p);
        Eigen::VectorXi degree = Eigen::VectorXi::Zero(spec.p);
        const int attempts = 2 * spec.p;
        for (int t = 0; t < attempts; ++t) {
            const int a = static_cast<int>(rng::uniform_below(gen, spec.p));
            const int b = static_cast<int>(rng::uniform_below(gen, spec.p));
            if (a == b || w(a, b) != 0.0) continue;
            if (degree[a] >= spec.max_degree || degree[b] >= spec.max_degree) continue;
            w(a, b) = 1.0;
            w(b, a) = 1.0;
            ++degree[a];
            ++degree[b];
        }
        out.sims.emplace_back(std::move(w), "w" + std::to_string(k + 1),
                              SimilarityKind::raw);
    }

    // Support: random K0-subset of the coefficients.
    auto sgen = rng::substream(spec.seed, truth_tag(spec, 0x53550000ull));
    std::vector<int> perm(static_cast<std::size_t>(spec.K));
    std::iota(perm.begin(), perm.end(), 0);
    rng::shuffle(perm, sgen);
    out.truth.support.assign(perm.begin(), perm.begin() + spec.K0);
    std::sort(out.truth.support.begin(), out.truth.support.end());

    auto agen = rng::substream(spec.seed, truth_tag(spec, 0x414c0000ull));
    out.truth.params.alpha = Eigen::VectorXd::Zero(spec.K);
    for (int k : out.truth.support) {
        const double mag = uniform_in(agen, spec.alpha_low, spec.alpha_high);
        const double sign = rng::uniform(agen) < 0.5 ? -1.0 : 1.0;
        out.truth.params.alpha[k] = sign * mag;
    }

    auto tgen = rng::substream(spec.seed, truth_tag(spec, 0x54480000ull));
    out.truth.params.main_effects.resize(spec.p);
    for (int j = 0; j < spec.p; ++j) {
        out.truth.params.main_effects[j] = uniform_in(tgen, spec.theta_low, spec.theta_high);
    }

    out.theta = assemble_theta(out.truth.params, out.sims);
    return out;
}

BenchmarkReport run_benchmark(const ScenarioSpec& spec, BenchmarkProgress progress) {
    const auto t_start = clock_type::now();
    BenchmarkReport report;
    report.spec = spec;
    const ScenarioTruth scenario = generate_truth(spec);
    const SelectionTruth& truth = scenario.truth;

    for (int rep = 0; rep < spec.replicates; ++rep) {
        if (progress != nullptr) progress(rep + 1, spec.replicates);

        auto dgen = rng::substream(spec.seed, 0xda7a0000ull + static_cast<std::uint64_t>(rep));
        SamplerConfig sampler = spec.sampler;
        sampler.seed = dgen();
        const BinaryDataset data = sample(spec.n, truth.params, scenario.sims, sampler);
        const std::uint64_t hash = dataset_hash(data);
        const StackedDesign design = build_design(data, scenario.sims);

        auto fgen = rng::substream(spec.seed, 0xf01d0000ull + static_cast<std::uint64_t>(rep));
        const std::uint64_t fold_seed = fgen();

        UnregularizedFit pilot;
        const bool needs_pilot =
            std::any_of(spec.estimators.begin(), spec.estimators.end(),
                        [](const std::string& e) {
                            return e == "unregularized" || e == "regularized";
                        });
        if (needs_pilot) pilot = fit_unregularized(design);

        for (const auto& name : spec.estimators) {
            BenchmarkRow row;
            row.replicate = rep + 1;
            row.estimator = name;
            row.dataset_hash = hash;
            const auto t_est = clock_type::now();
            try {
                Eigen::VectorXd alpha_hat, main_hat;
                std::vector<int> active;
                if (name == "unregularized") {
                    alpha_hat = pilot.params.alpha;
                    main_hat = pilot.params.main_effects;
                    row.converged = pilot.converged && !pilot.separation;
                    for (int k = 0; k < spec.K; ++k) {
                        if (alpha_hat[k] != 0.0) active.push_back(k);
                    }
                } else if (name == "oracle") {
                    const UnregularizedFit fit = fit_oracle(design, truth.support);
                    alpha_hat = fit.params.alpha;
                    main_hat = fit.params.main_effects;
                    row.converged = fit.converged && !fit.separation;
                    active = truth.support;
                } else {
                    const AdaptiveWeights weights = name == "regularized"
                                                        ? adaptive_weights(pilot.params.alpha)
                                                        : unit_weights(spec.K);
                    const std::vector<double> grid =
                        default_lambda_grid(lambda_max(design, weights), spec.grid_length,
                                            spec.grid_min_ratio);
                    const FoldPlan plan = make_fold_plan(spec.n, spec.folds, fold_seed);
                    const CrossValidationResult cv =
                        cross_validate_design(design, weights, plan, grid);
                    const ParameterSet& est =
                        cv.full_path.estimates[static_cast<std::size_t>(cv.chosen_index)];
                    alpha_hat = est.alpha;
                    main_hat = est.main_effects;
                    row.chosen_lambda = cv.chosen_lambda;
                    row.converged =
                        cv.full_path.converged[static_cast<std::size_t>(cv.chosen_index)] != 0;
                    active = cv.full_path.active_sets[static_cast<std::size_t>(cv.chosen_index)];
                }

                row.mse_alpha = mse_alpha(alpha_hat, truth);
                row.mse_theta = mse_theta(main_hat, truth);
                const TprFpr rates = tpr_fpr(active, truth);
                row.tpr = rates.tpr;
                row.has_fpr = rates.fpr.has_value();
                row.fpr = rates.fpr.value_or(0.0);
                row.active_size = static_cast<int>(active.size());
                const Eigen::MatrixXd theta_hat =
                    assemble_theta(ParameterSet{main_hat, alpha_hat}, scenario.sims);
                row.theta_error = theta_error(theta_hat, scenario.theta);
            } catch (const std::exception&) {
                row.converged = false;
            }
            row.seconds = seconds_since(t_est);
            report.rows.push_back(std::move(row));
        }

        if (spec.theta_baseline) {
            BenchmarkRow row;
            row.replicate = rep + 1;
            row.estimator = "neighborhood";
            row.dataset_hash = hash;
            const auto t_est = clock_type::now();
            try {
                NeighborhoodLassoOptions opts;
                opts.folds = spec.folds;
                opts.grid_length = spec.grid_length;
                opts.grid_min_ratio = spec.grid_min_ratio;
                auto ngen =
                    rng::substream(spec.seed, 0x4e4c0000ull + static_cast<std::uint64_t>(rep));
                opts.seed = ngen();
                const Eigen::MatrixXd theta_hat = neighborhood_lasso_baseline(data, opts);
                row.theta_error = theta_error(theta_hat, scenario.theta);
                row.converged = true;
            } catch (const std::exception&) {
                row.converged = false;
            }
            row.seconds = seconds_since(t_est);
            report.rows.push_back(std::move(row));
        }
    }

    // Aggregate converged rows per estimator, preserving the configured order.
    std::vector<std::string> order = spec.estimators;
    if (spec.theta_baseline) order.push_back("neighborhood");
    for (const auto& name : order) {
        BenchmarkSummaryRow s;
        s.estimator = name;
        std::vector<double> errors;
        for (const auto& row : report.rows) {
            if (row.estimator != name || !row.converged) continue;
            ++s.replicates;
            s.mean_mse_alpha += row.mse_alpha;
            s.mean_mse_theta += row.mse_theta;
            s.mean_tpr += row.tpr;
            if (row.has_fpr) {
                s.has_fpr = true;
                s.mean_fpr += row.fpr;
            }
            s.mean_theta_error += row.theta_error;
            errors.push_back(row.theta_error);
        }
        if (s.replicates > 0) {
            s.mean_mse_alpha /= s.replicates;
            s.mean_mse_theta /= s.replicates;
            s.mean_tpr /= s.replicates;
            if (s.has_fpr) s.mean_fpr /= s.replicates;
            s.mean_theta_error /= s.replicates;
            std::sort(errors.begin(), errors.end());
            const std::size_t m = errors.size();
            s.median_theta_error = m % 2 == 1 ? errors[m / 2]
                                              : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);
        }
        report.summary.push_back(std::move(s));
    }

    report.seconds = seconds_since(t_start);
    return report;
}

}  // namespace isingsim
