#pragma once

#include <cstdint>

#include "isingsim/model.hpp"

namespace isingsim {

enum class SamplerMethod { automatic, exact, gibbs };

struct SamplerConfig {
    SamplerMethod method = SamplerMethod::automatic;
    std::uint64_t seed = 0;
    int burn_in = 1000;  // Gibbs sweeps discarded per chain
    int thin = 10;       // extra sweeps before the retained draw
};

// n independent draws by inverse-CDF over the enumerated distribution.
// Requires p <= kExactEnumerationCap.
BinaryDataset sample_exact(int n, const ParameterSet& params,
                           const std::vector<SimilarityMatrix>& sims,
                           std::uint64_t seed);
BinaryDataset sample_exact(int n, const Eigen::MatrixXd& theta, std::uint64_t seed);

// n independent draws, each from its own Gibbs chain keyed by (seed, row):
// random-order heat-bath sweeps, burn_in + thin sweeps total per chain.
BinaryDataset sample_gibbs(int n, const ParameterSet& params,
                           const std::vector<SimilarityMatrix>& sims,
                           const SamplerConfig& config);
BinaryDataset sample_gibbs(int n, const Eigen::MatrixXd& theta, const SamplerConfig& config);

// Routes to sample_exact when p fits under the enumeration cap, else Gibbs.
BinaryDataset sample(int n, const ParameterSet& params,
                     const std::vector<SimilarityMatrix>& sims,
                     const SamplerConfig& config);

}  // namespace isingsim
