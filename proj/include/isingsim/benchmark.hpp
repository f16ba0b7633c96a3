#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isingsim/metrics.hpp"
#include "isingsim/model.hpp"
#include "isingsim/sampler.hpp"

namespace isingsim {

// One simulation cell: dimensions, truth-generation controls, sampler and
// solver settings. Everything here is echoed into the benchmark report.
struct ScenarioSpec {
    std::string name = "scenario";
    int n = 100;
    int p = 25;
    int K = 20;
    int K0 = 5;
    int replicates = 100;
    std::uint64_t seed = 1;

    // truth generator
    double alpha_low = 0.1;    // |alpha_k| ~ U[alpha_low, alpha_high], random sign
    double alpha_high = 0.3;
    double theta_low = -1.0;   // theta_jj ~ U[theta_low, theta_high]
    double theta_high = 0.0;
    int max_degree = 4;        // similarity row-sum bound

    // data generation
    SamplerConfig sampler{SamplerMethod::automatic, 0, 300, 5};

    // estimation
    std::vector<std::string> estimators = {"oracle", "regularized", "lasso",
                                           "unregularized"};
    int folds = 10;
    int grid_length = 50;
    double grid_min_ratio = 1e-3;
    bool theta_baseline = false;  // also run the neighborhood-lasso comparison
};

// Truth and similarity matrices for a scenario, drawn from substreams of
// (seed, p, K, K0) so the truth is shared across sample sizes n.
struct ScenarioTruth {
    SelectionTruth truth;
    std::vector<SimilarityMatrix> sims;
    Eigen::MatrixXd theta;
};

ScenarioTruth generate_truth(const ScenarioSpec& spec);

// Per-replicate, per-estimator metric row.
struct BenchmarkRow {
    int replicate = 0;
    std::string estimator;
    double mse_alpha = 0.0;
    double mse_theta = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    bool has_fpr = false;
    double theta_error = 0.0;    // off-diagonal Frobenius error
    double chosen_lambda = 0.0;
    int active_size = 0;
    bool converged = true;
    std::uint64_t dataset_hash = 0;
    double seconds = 0.0;
};

struct BenchmarkSummaryRow {
    std::string estimator;
    int replicates = 0;
    double mean_mse_alpha = 0.0;
    double mean_mse_theta = 0.0;
    double mean_tpr = 0.0;
    double mean_fpr = 0.0;
    bool has_fpr = false;
    double mean_theta_error = 0.0;
    double median_theta_error = 0.0;
};

struct BenchmarkReport {
    ScenarioSpec spec;
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkSummaryRow> summary;
    double seconds = 0.0;
};

using BenchmarkProgress = void (*)(int replicate, int total);

BenchmarkReport run_benchmark(const ScenarioSpec& spec,
                              BenchmarkProgress progress = nullptr);

// FNV-1a over the row-major bytes of y; logged per replicate so any run can
// be audited for accidental data reuse across replicates or scenarios.
std::uint64_t dataset_hash(const BinaryDataset& data);

}  // namespace isingsim
