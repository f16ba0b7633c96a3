#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "isingsim/errors.hpp"
#include "isingsim/estimator.hpp"
#include "isingsim/model.hpp"
#include "isingsim/sampler.hpp"

using namespace isingsim;

namespace {

std::vector<SimilarityMatrix> random_sims(int p, int K, std::mt19937_64& gen,
                                          double scale = 1.0) {
    std::uniform_real_distribution<double> unif(0.0, scale);
    std::vector<SimilarityMatrix> sims;
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
        for (int a = 0; a < p; ++a) {
            for (int b = a + 1; b < p; ++b) {
                if (gen() % 2) {
                    w(a, b) = unif(gen);
                    w(b, a) = w(a, b);
                }
            }
        }
        sims.emplace_back(w, "w" + std::to_string(k + 1));
    }
    return sims;
}

BinaryDataset random_binary(int n, int p, std::mt19937_64& gen) {
    BinaryDataset data;
    data.y.resize(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) data.y(i, j) = static_cast<std::uint8_t>(gen() % 2);
    }
    return data;
}

ParameterSet random_point(int p, int K, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unif(-0.8, 0.8);
    Eigen::VectorXd main(p), alpha(K);
    for (int j = 0; j < p; ++j) main[j] = unif(gen);
    for (int k = 0; k < K; ++k) alpha[k] = unif(gen);
    return ParameterSet(main, alpha);
}

Eigen::VectorXd fd_gradient(const StackedDesign& d, const ParameterSet& at, double h = 1e-5) {
    const int p = at.p(), K = at.K();
    Eigen::VectorXd g(p + K);
    for (int idx = 0; idx < p + K; ++idx) {
        ParameterSet up = at, dn = at;
        if (idx < p) {
            up.main_effects[idx] += h;
            dn.main_effects[idx] -= h;
        } else {
            up.alpha[idx - p] += h;
            dn.alpha[idx - p] -= h;
        }
        g[idx] = (design_log_pl(d, up) - design_log_pl(d, dn)) / (2.0 * h);
    }
    return g;
}

Eigen::VectorXd clamped_logits(const BinaryDataset& data) {
    Eigen::VectorXd main(data.p());
    const double clamp = 1.0 / (2.0 * data.n());
    for (int j = 0; j < data.p(); ++j) {
        double mean = 0.0;
        for (int i = 0; i < data.n(); ++i) mean += data.y(i, j);
        mean /= data.n();
        mean = std::min(std::max(mean, clamp), 1.0 - clamp);
        main[j] = std::log(mean / (1.0 - mean));
    }
    return main;
}

}  // namespace

TEST_CASE("build_design closed cases") {
    SUBCASE("all-zero similarity gives a zero covariate column") {
        std::mt19937_64 gen(1);
        BinaryDataset data = random_binary(10, 3, gen);
        std::vector<SimilarityMatrix> sims{
            SimilarityMatrix(Eigen::MatrixXd::Zero(3, 3), "z")};
        const auto d = build_design(data, sims);
        CHECK(d.x.cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.rows() == 30);
    }
    SUBCASE("single observation of ones with similarity 0.5") {
        BinaryDataset data;
        data.y.resize(1, 2);
        data.y << 1, 1;
        Eigen::MatrixXd w(2, 2);
        w << 0, 0.5, 0.5, 0;
        const auto d = build_design(data, {SimilarityMatrix(w, "w")});
        CHECK(d.rows() == 2);
        CHECK(d.x(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(d.x(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(d.response[0] == 1.0);
        CHECK(d.response[1] == 1.0);
    }
}

TEST_CASE("build_design matches its row-by-row definition") {
    std::mt19937_64 gen(2);
    const int n = 7, p = 5, K = 3;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    CHECK(d.n == n);
    CHECK(d.p == p);
    CHECK(d.K() == K);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index r = static_cast<Eigen::Index>(j) * n + i;
            CHECK(d.group(r) == j);
            CHECK(d.response[r] == static_cast<double>(data.y(i, j)));
            for (int k = 0; k < K; ++k) {
                double expect = 0.0;
                for (int jp = 0; jp < p; ++jp) {
                    if (jp != j) expect += sims[k].values()(j, jp) * data.y(i, jp);
                }
                CHECK(d.x(r, k) == doctest::Approx(expect).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("permuting observations permutes design rows within blocks") {
    std::mt19937_64 gen(3);
    const int n = 9, p = 4, K = 2;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    BinaryDataset shuffled;
    shuffled.y.resize(n, p);
    for (int i = 0; i < n; ++i) shuffled.y.row(i) = data.y.row(perm[i]);
    const auto d0 = build_design(data, sims);
    const auto d1 = build_design(shuffled, sims);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index r1 = static_cast<Eigen::Index>(j) * n + i;
            const Eigen::Index r0 = static_cast<Eigen::Index>(j) * n + perm[i];
            CHECK(d1.response[r1] == d0.response[r0]);
            CHECK((d1.x.row(r1) - d0.x.row(r0)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("subset_design gathers the requested observations") {
    std::mt19937_64 gen(4);
    const int n = 8, p = 3, K = 2;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    const std::vector<int> keep = {6, 1, 3};
    const auto s = subset_design(d, keep);
    CHECK(s.n == 3);
    CHECK(s.p == p);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < 3; ++i) {
            const Eigen::Index rs = static_cast<Eigen::Index>(j) * 3 + i;
            const Eigen::Index rd = static_cast<Eigen::Index>(j) * n + keep[static_cast<std::size_t>(i)];
            CHECK(s.response[rs] == d.response[rd]);
            CHECK((s.x.row(rs) - d.x.row(rd)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    CHECK_THROWS_AS(subset_design(d, {0, 99}), input_error);
    CHECK_THROWS_AS(subset_design(d, {}), input_error);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 20, p = 4, K = 3;
        BinaryDataset data = random_binary(n, p, gen);
        auto sims = random_sims(p, K, gen);
        const auto d = build_design(data, sims);
        const ParameterSet at = random_point(p, K, gen);
        const Eigen::VectorXd g = design_log_pl_gradient(d, at);
        const Eigen::VectorXd fd = fd_gradient(d, at);
        CHECK((g - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff()) < 1e-6);
    }
}

TEST_CASE("unregularized fit on independent data stays near zero") {
    std::mt19937_64 gen(6);
    const int p = 10, n = 2000;
    ParameterSet zero(Eigen::VectorXd::Zero(p), Eigen::VectorXd());
    BinaryDataset data = sample_exact(n, zero, {}, 606);
    auto sims = random_sims(p, 2, gen);
    const auto d = build_design(data, sims);
    const auto fit = fit_unregularized(d);
    CHECK(fit.converged);
    CHECK_FALSE(fit.separation);
    CHECK(fit.params.main_effects.cwiseAbs().maxCoeff() < 0.15);
    CHECK(fit.params.alpha.cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("unregularized fit is a stationary point of the log pseudo-likelihood") {
    std::mt19937_64 gen(7);
    const int n = 80, p = 4, K = 2;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    const auto fit = fit_unregularized(d);
    CHECK(fit.converged);
    CHECK(fit.grad_max_norm <= 1e-8);
    CHECK(fd_gradient(d, fit.params).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(fit.log_pl == doctest::Approx(design_log_pl(d, fit.params)).epsilon(1e-12));
}

TEST_CASE("single-coefficient fit matches a derivative bisection oracle") {
    std::mt19937_64 gen(8);
    const int n = 40, p = 3;
    BinaryDataset data = random_binary(n, p, gen);
    Eigen::MatrixXd w(3, 3);
    w << 0.0, 0.8, 0.3,
         0.8, 0.0, 0.5,
         0.3, 0.5, 0.0;
    const auto d = build_design(data, {SimilarityMatrix(w, "w")});
    FitOptions opt;
    opt.include_main_effects = false;
    const auto fit = fit_unregularized(d, opt);
    CHECK(fit.converged);
    CHECK(fit.params.p() == 0);

    // bisection on the finite-difference derivative of the concave objective
    auto deriv = [&](double a) {
        const double h = 1e-6;
        ParameterSet up(Eigen::VectorXd(), Eigen::VectorXd::Constant(1, a + h));
        ParameterSet dn(Eigen::VectorXd(), Eigen::VectorXd::Constant(1, a - h));
        return (design_log_pl(d, up) - design_log_pl(d, dn)) / (2.0 * h);
    };
    double lo = -8.0, hi = 8.0;
    REQUIRE(deriv(lo) > 0.0);
    REQUIRE(deriv(hi) < 0.0);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(fit.params.alpha[0] - 0.5 * (lo + hi)) < 1e-6);
}

TEST_CASE("perfectly dependent responses are flagged as separation") {
    const int n = 40, p = 2;
    BinaryDataset data;
    data.y.resize(n, p);
    for (int i = 0; i < n; ++i) {
        const std::uint8_t v = static_cast<std::uint8_t>(i % 2);
        data.y(i, 0) = v;
        data.y(i, 1) = v;
    }
    Eigen::MatrixXd w(2, 2);
    w << 0, 1, 1, 0;
    const auto d = build_design(data, {SimilarityMatrix(w, "w")});
    FitOptions opt;
    opt.max_newton_iter = 5000;
    const auto fit = fit_unregularized(d, opt);
    CHECK(fit.separation);
}

TEST_CASE("adaptive weights follow the pilot inverse rule") {
    Eigen::VectorXd pilot(2);
    pilot << 2.0, 0.5;
    const auto w = adaptive_weights(pilot);
    CHECK(w.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w.weights[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(w.n_excluded() == 0);

    Eigen::VectorXd with_zero(3);
    with_zero << 1.0, 0.0, -0.25;
    const auto wz = adaptive_weights(with_zero);
    CHECK(wz.n_excluded() == 1);
    CHECK(static_cast<bool>(wz.excluded[1]));
    CHECK(wz.weights[2] == doctest::Approx(4.0).epsilon(1e-15));

    // scaling the pilot by c scales weights by 1/c, leaving lambda * w * |a|
    // invariant when lambda is scaled by c
    const auto wc = adaptive_weights(3.0 * pilot);
    for (int k = 0; k < 2; ++k) {
        CHECK(wc.weights[k] == doctest::Approx(w.weights[k] / 3.0).epsilon(1e-14));
        const double a = 0.7;
        CHECK(3.0 * (wc.weights[k] * a) == doctest::Approx(w.weights[k] * a).epsilon(1e-14));
    }

    const auto unit = unit_weights(4);
    CHECK(unit.weights.size() == 4);
    CHECK(unit.weights.minCoeff() == 1.0);
    CHECK(unit.weights.maxCoeff() == 1.0);
}

TEST_CASE("excluded coordinates never enter the path") {
    std::mt19937_64 gen(9);
    const int n = 60, p = 4, K = 3;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    Eigen::VectorXd pilot(3);
    pilot << 0.5, 0.0, -0.3;
    const auto w = adaptive_weights(pilot);
    const auto path = fit_path(d, w, {}, {});
    for (const auto& est : path.estimates) CHECK(est.alpha[1] == 0.0);
}

TEST_CASE("penalized fit at lambda 0 matches the Newton solution") {
    std::mt19937_64 gen(10);
    const int n = 150, p = 5, K = 3;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    const auto newton = fit_unregularized(d);
    REQUIRE(newton.converged);
    PenaltySpec pen;
    pen.lambda = 0.0;
    pen.weights = Eigen::VectorXd::Ones(K);
    FitOptions tight;
    tight.kkt_tol = 1e-9;
    tight.obj_rel_tol = 1e-13;
    const auto cd = fit_penalized(d, pen, nullptr, tight);
    CHECK(cd.converged);
    CHECK((cd.params.alpha - newton.params.alpha).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((cd.params.main_effects - newton.params.main_effects).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("at and above lambda_max every alpha is exactly zero") {
    std::mt19937_64 gen(11);
    const int n = 50, p = 4, K = 3;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    const auto w = unit_weights(K);
    const double lmax = lambda_max(d, w);
    REQUIRE(lmax > 0.0);

    PenaltySpec pen;
    pen.weights = w.weights;
    pen.lambda = lmax * (1.0 + 1e-10);
    const auto fit = fit_penalized(d, pen);
    CHECK(fit.converged);
    CHECK(fit.active.empty());
    for (int k = 0; k < K; ++k) CHECK(fit.params.alpha[k] == 0.0);
    CHECK((fit.params.main_effects - clamped_logits(data)).cwiseAbs().maxCoeff() < 1e-4);

    pen.lambda = lmax * 0.9;
    const auto below = fit_penalized(d, pen);
    CHECK_FALSE(below.active.empty());
}

TEST_CASE("scaling weights by c and lambda by 1/c is a no-op") {
    std::mt19937_64 gen(12);
    const int n = 60, p = 4, K = 3;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    PenaltySpec pen;
    pen.lambda = 0.02;
    pen.weights = Eigen::VectorXd::Ones(K);
    pen.weights << 1.0, 2.0, 0.5;
    const auto base = fit_penalized(d, pen);
    PenaltySpec scaled;
    scaled.lambda = pen.lambda / 4.0;
    scaled.weights = 4.0 * pen.weights;
    const auto same = fit_penalized(d, scaled);
    CHECK((base.params.alpha - same.params.alpha).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((base.params.main_effects - same.params.main_effects).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("path structure: dominance, first point, endpoint, descent") {
    std::mt19937_64 gen(13);
    const int n = 120, p = 5, K = 4;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);
    const auto w = unit_weights(K);
    const auto path = fit_path(d, w, default_lambda_grid(lambda_max(d, w), 40, 1e-4));
    REQUIRE(path.size() == 40);

    CHECK(path.active_sets.front().empty());
    for (int i = 0; i < path.size(); ++i) {
        CHECK(static_cast<bool>(path.converged[static_cast<std::size_t>(i)]));
        CHECK(path.kkt_residuals[static_cast<std::size_t>(i)] <= 1e-6 + 1e-12);
        // minimizer dominates the all-zero point at the same lambda
        ParameterSet zero_point(clamped_logits(data), Eigen::VectorXd::Zero(K));
        const double f0 = -design_log_pl(d, zero_point);
        CHECK(path.objectives[static_cast<std::size_t>(i)] <= f0 + 1e-12);
    }

    const auto newton = fit_unregularized(d);
    REQUIRE(newton.converged);

    // A grid extended through zero ends exactly at the unregularized solution.
    std::vector<double> to_zero = default_lambda_grid(lambda_max(d, w), 10, 1e-2);
    to_zero.push_back(0.0);
    const auto down = fit_path(d, w, to_zero);
    REQUIRE(down.size() == 11);
    CHECK(down.lambdas.back() == 0.0);
    CHECK((down.estimates.back().alpha - newton.params.alpha).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((down.estimates.back().main_effects - newton.params.main_effects)
              .cwiseAbs()
              .maxCoeff() < 1e-4);
}

TEST_CASE("coordinate descent cycles never increase the objective") {
    std::mt19937_64 gen(14);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 40, p = 4, K = 3;
        BinaryDataset data = random_binary(n, p, gen);
        auto sims = random_sims(p, K, gen);
        const auto d = build_design(data, sims);
        PenaltySpec pen;
        pen.lambda = 0.01;
        pen.weights = Eigen::VectorXd::Ones(K);
        const auto fit = fit_penalized(d, pen);
        CHECK(fit.monotone);
        CHECK(fit.objective == doctest::Approx(-fit.log_pl + pen.lambda *
                  fit.params.alpha.cwiseAbs().sum()).epsilon(1e-12));
    }
}

TEST_CASE("penalized fit input validation") {
    std::mt19937_64 gen(15);
    BinaryDataset data = random_binary(20, 3, gen);
    auto sims = random_sims(3, 2, gen);
    const auto d = build_design(data, sims);
    PenaltySpec pen;
    pen.lambda = 0.1;
    pen.weights = Eigen::VectorXd::Ones(3);  // wrong length
    CHECK_THROWS_AS(fit_penalized(d, pen), input_error);
    pen.weights = Eigen::VectorXd::Ones(2);
    pen.lambda = -0.5;
    CHECK_THROWS_AS(fit_penalized(d, pen), input_error);
    pen.lambda = 0.1;
    ParameterSet bad_warm(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(5));
    CHECK_THROWS_AS(fit_penalized(d, pen, &bad_warm), input_error);
}

TEST_CASE("default lambda grid shape") {
    const auto grid = default_lambda_grid(2.0, 10, 1e-2);
    CHECK(grid.size() == 10);
    CHECK(grid.front() == doctest::Approx(2.0 * (1.0 + 1e-10)).epsilon(1e-14));
    CHECK(grid.back() == doctest::Approx(0.02).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
    CHECK_THROWS_AS(default_lambda_grid(0.0, 10, 1e-2), input_error);
    CHECK_THROWS_AS(default_lambda_grid(1.0, 1, 1e-2), input_error);
    CHECK_THROWS_AS(default_lambda_grid(1.0, 10, 1.5), input_error);
}

TEST_CASE("oracle refit spans the two extremes") {
    std::mt19937_64 gen(16);
    const int n = 100, p = 4, K = 3;
    BinaryDataset data = random_binary(n, p, gen);
    auto sims = random_sims(p, K, gen);
    const auto d = build_design(data, sims);

    const auto full = fit_oracle(d, {0, 1, 2});
    const auto newton = fit_unregularized(d);
    CHECK((full.params.alpha - newton.params.alpha).cwiseAbs().maxCoeff() < 1e-10);

    const auto empty = fit_oracle(d, {});
    CHECK(empty.params.alpha.cwiseAbs().maxCoeff() == 0.0);
    CHECK((empty.params.main_effects - clamped_logits(data)).cwiseAbs().maxCoeff() < 1e-6);

    const auto partial = fit_oracle(d, {1});
    CHECK(partial.params.alpha[0] == 0.0);
    CHECK(partial.params.alpha[2] == 0.0);
    CHECK(fd_gradient(d, partial.params)[p + 1] < 1e-5);

    CHECK_THROWS_AS(fit_oracle(d, {0, 0}), input_error);
    CHECK_THROWS_AS(fit_oracle(d, {3}), input_error);
    CHECK_THROWS_AS(fit_oracle(d, {-1}), input_error);
}

TEST_CASE("regularity diagnostics") {
    SUBCASE("zero design") {
        BinaryDataset data;
        data.y = BinaryMatrix::Zero(10, 3);
        std::vector<SimilarityMatrix> sims{
            SimilarityMatrix(Eigen::MatrixXd::Zero(3, 3), "z")};
        const auto d = build_design(data, sims);
        const auto diag = check_regularity(d, ParameterSet(), {0});
        CHECK(diag.m_hat.cwiseAbs().maxCoeff() == 0.0);
        CHECK(diag.gram_max_eigenvalue == 0.0);
        CHECK(diag.support_block_singular);
    }
    SUBCASE("m_hat matches finite differences of the gradient") {
        std::mt19937_64 gen(17);
        const int n = 30, p = 4, K = 3;
        BinaryDataset data = random_binary(n, p, gen);
        auto sims = random_sims(p, K, gen);
        const auto d = build_design(data, sims);
        const ParameterSet at = random_point(p, K, gen);
        const auto diag = check_regularity(d, at, {0, 1, 2});
        const double h = 1e-5;
        for (int a = 0; a < K; ++a) {
            ParameterSet up = at, dn = at;
            up.alpha[a] += h;
            dn.alpha[a] -= h;
            const Eigen::VectorXd col =
                (design_log_pl_gradient(d, up) - design_log_pl_gradient(d, dn)) / (2.0 * h);
            for (int b = 0; b < K; ++b) {
                CHECK(diag.m_hat(b, a) == doctest::Approx(-col[p + b]).epsilon(1e-5));
            }
        }
        CHECK(diag.min_eigenvalue_support > 0.0);
        CHECK(diag.gram_max_eigenvalue > 0.0);
    }
    SUBCASE("orthogonal blocks have zero incoherence") {
        // two covariates supported on disjoint response blocks
        BinaryDataset data;
        data.y.resize(4, 4);
        data.y << 1, 0, 1, 0,
                  0, 1, 0, 1,
                  1, 1, 0, 0,
                  0, 0, 1, 1;
        Eigen::MatrixXd w1 = Eigen::MatrixXd::Zero(4, 4);
        w1(0, 1) = w1(1, 0) = 1.0;
        Eigen::MatrixXd w2 = Eigen::MatrixXd::Zero(4, 4);
        w2(2, 3) = w2(3, 2) = 1.0;
        const auto d = build_design(data, {SimilarityMatrix(w1, "a"), SimilarityMatrix(w2, "b")});
        const auto diag = check_regularity(d, ParameterSet(), {0});
        // x_1 lives on blocks {0,1}, x_2 on blocks {2,3}: M_hat is diagonal
        CHECK(diag.m_hat(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(diag.incoherence == doctest::Approx(0.0).epsilon(1e-12));
    }
}
