#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "isingsim/benchmark.hpp"
#include "isingsim/errors.hpp"
#include "isingsim/model.hpp"

using namespace isingsim;

namespace {

ScenarioSpec tiny_spec() {
    ScenarioSpec spec;
    spec.name = "tiny";
    spec.n = 120;
    spec.p = 6;
    spec.K = 4;
    spec.K0 = 2;
    spec.replicates = 2;
    spec.seed = 21;
    spec.folds = 4;
    spec.grid_length = 12;
    spec.sampler.burn_in = 50;
    spec.sampler.thin = 2;
    return spec;
}

}  // namespace

TEST_CASE("generated truth is deterministic and n-independent") {
    ScenarioSpec spec = tiny_spec();
    const auto t1 = generate_truth(spec);
    const auto t2 = generate_truth(spec);
    CHECK(t1.truth.params.alpha == t2.truth.params.alpha);
    CHECK(t1.truth.params.main_effects == t2.truth.params.main_effects);
    CHECK(t1.truth.support == t2.truth.support);

    ScenarioSpec larger = spec;
    larger.n = 4000;
    larger.replicates = 50;
    const auto t3 = generate_truth(larger);
    CHECK((t1.truth.params.alpha - t3.truth.params.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK((t1.theta - t3.theta).cwiseAbs().maxCoeff() == 0.0);

    ScenarioSpec reseeded = spec;
    reseeded.seed = 22;
    const auto t4 = generate_truth(reseeded);
    CHECK(t1.truth.params.alpha != t4.truth.params.alpha);
}

TEST_CASE("generated truth respects the scenario contract") {
    ScenarioSpec spec = tiny_spec();
    spec.p = 12;
    spec.K = 8;
    spec.K0 = 3;
    const auto t = generate_truth(spec);

    CHECK(t.truth.K() == spec.K);
    CHECK(t.truth.K0() == spec.K0);
    CHECK(static_cast<int>(t.sims.size()) == spec.K);
    CHECK(std::is_sorted(t.truth.support.begin(), t.truth.support.end()));

    std::set<int> support(t.truth.support.begin(), t.truth.support.end());
    for (int k = 0; k < spec.K; ++k) {
        const double a = t.truth.params.alpha[k];
        if (support.count(k)) {
            CHECK(std::abs(a) >= spec.alpha_low);
            CHECK(std::abs(a) <= spec.alpha_high);
        } else {
            CHECK(a == 0.0);
        }
        CHECK(t.sims[static_cast<std::size_t>(k)].dim() == spec.p);
        CHECK(t.sims[static_cast<std::size_t>(k)].label() == "w" + std::to_string(k + 1));
        // row sums bounded by the degree cap
        const auto& w = t.sims[static_cast<std::size_t>(k)].values();
        CHECK(w.cwiseAbs().rowwise().sum().maxCoeff() <= spec.max_degree + 1e-12);
        CHECK(w.minCoeff() >= 0.0);
    }
    for (int j = 0; j < spec.p; ++j) {
        CHECK(t.truth.params.main_effects[j] >= spec.theta_low);
        CHECK(t.truth.params.main_effects[j] <= spec.theta_high);
    }
    const Eigen::MatrixXd assembled = assemble_theta(t.truth.params, t.sims);
    CHECK((assembled - t.theta).cwiseAbs().maxCoeff() < 1e-14);

    ScenarioSpec bad = spec;
    bad.K0 = spec.K + 1;
    CHECK_THROWS_AS(generate_truth(bad), input_error);
    bad = spec;
    bad.alpha_low = 0.5;
    bad.alpha_high = 0.2;
    CHECK_THROWS_AS(generate_truth(bad), input_error);
}

TEST_CASE("dataset hash separates datasets") {
    BinaryDataset a;
    a.y.resize(3, 2);
    a.y << 1, 0, 0, 1, 1, 1;
    BinaryDataset b = a;
    CHECK(dataset_hash(a) == dataset_hash(b));
    b.y(0, 0) = 0;
    CHECK(dataset_hash(a) != dataset_hash(b));
    BinaryDataset t;
    t.y = a.y.transpose();
    CHECK(dataset_hash(a) != dataset_hash(t));  // shape is part of the hash
}

TEST_CASE("benchmark runs are reproducible and share data across estimators") {
    const ScenarioSpec spec = tiny_spec();
    const auto r1 = run_benchmark(spec);
    const auto r2 = run_benchmark(spec);

    REQUIRE(r1.rows.size() == r2.rows.size());
    REQUIRE(r1.rows.size() == 4 * 2);  // estimators x replicates
    for (std::size_t i = 0; i < r1.rows.size(); ++i) {
        CHECK(r1.rows[i].estimator == r2.rows[i].estimator);
        CHECK(r1.rows[i].replicate == r2.rows[i].replicate);
        CHECK(r1.rows[i].mse_alpha == r2.rows[i].mse_alpha);
        CHECK(r1.rows[i].theta_error == r2.rows[i].theta_error);
        CHECK(r1.rows[i].dataset_hash == r2.rows[i].dataset_hash);
    }

    // within one replicate every estimator sees the same dataset
    for (int rep = 1; rep <= spec.replicates; ++rep) {
        std::set<std::uint64_t> hashes;
        for (const auto& row : r1.rows) {
            if (row.replicate == rep) hashes.insert(row.dataset_hash);
        }
        CHECK(hashes.size() == 1);
    }
    // and replicates differ
    CHECK(r1.rows[0].dataset_hash != r1.rows[static_cast<std::size_t>(4)].dataset_hash);

    // summary covers each estimator once
    CHECK(r1.summary.size() == 4);
    for (const auto& s : r1.summary) CHECK(s.replicates == spec.replicates);

    // oracle never selects false positives, so its fpr is zero by construction
    for (const auto& row : r1.rows) {
        CHECK(std::isfinite(row.mse_alpha));
        CHECK(std::isfinite(row.theta_error));
        if (row.estimator == "oracle") {
            CHECK(row.tpr == 1.0);
            CHECK(row.has_fpr);
            CHECK(row.fpr == 0.0);
        }
        if (row.estimator == "unregularized") CHECK(row.active_size == spec.K);
    }
}

TEST_CASE("scenario validation") {
    ScenarioSpec bad = tiny_spec();
    bad.estimators = {"regularized", "mystery"};
    CHECK_THROWS_AS(run_benchmark(bad), input_error);
    bad = tiny_spec();
    bad.replicates = 0;
    CHECK_THROWS_AS(run_benchmark(bad), input_error);
    bad = tiny_spec();
    bad.estimators = {};
    CHECK_THROWS_AS(run_benchmark(bad), input_error);
}

TEST_CASE("progress callback sees every replicate") {
    static std::vector<int> seen;
    seen.clear();
    ScenarioSpec spec = tiny_spec();
    spec.estimators = {"oracle"};
    run_benchmark(spec, [](int rep, int total) {
        CHECK(total == 2);
        seen.push_back(rep);
    });
    CHECK(seen == std::vector<int>{1, 2});
}
