#include "isingsim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "isingsim/errors.hpp"
#include "isingsim/rng.hpp"

namespace isingsim {

namespace {

// Stream ids for the two samplers, so exact and Gibbs draws from the same
// master seed do not collide.
constexpr std::uint64_t kExactStream = 0x45584143ull << 16;  // "EXAC"
constexpr std::uint64_t kGibbsStream = 0x47494242ull << 16;  // "GIBB"

void check_n(int n) {
    if (n < 1) throw input_error("sample size must be positive");
}

}  // namespace

BinaryDataset sample_exact(int n, const Eigen::MatrixXd& theta, std::uint64_t seed) {
    check_n(n);
    const ExactDistribution dist(theta);
    const int p = dist.dim();

    // CDF over states in index order; exp is safe as log-probs are <= 0.
    std::vector<double> cdf(dist.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) {
        acc += std::exp(dist.log_probs()[s]);
        cdf[s] = acc;
    }
    cdf.back() = 1.0;  // guard the final bin against rounding

    BinaryDataset out;
    out.y.resize(n, p);
    for (int i = 0; i < n; ++i) {
        auto gen = rng::substream(seed, kExactStream + static_cast<std::uint64_t>(i));
        const double u = rng::uniform(gen);
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto state = static_cast<std::uint32_t>(it - cdf.begin());
        for (int j = 0; j < p; ++j) {
            out.y(i, j) = static_cast<std::uint8_t>((state >> j) & 1u);
        }
    }
    return out;
}

BinaryDataset sample_exact(int n, const ParameterSet& params,
                           const std::vector<SimilarityMatrix>& sims,
                           std::uint64_t seed) {
    return sample_exact(n, assemble_theta(params, sims), seed);
}

BinaryDataset sample_gibbs(int n, const Eigen::MatrixXd& theta,
                           const SamplerConfig& config) {
    check_n(n);
    if (theta.rows() != theta.cols()) throw input_error("interaction matrix must be square");
    if (!theta.allFinite()) throw input_error("interaction matrix has non-finite entries");
    if (config.burn_in < 0) throw input_error("burn-in must be non-negative");
    if (config.thin < 1) throw input_error("thinning interval must be at least 1");
    const int p = static_cast<int>(theta.rows());
    const int sweeps = config.burn_in + config.thin;

    Eigen::MatrixXd offdiag = theta;
    offdiag.diagonal().setZero();
    const Eigen::VectorXd main = theta.diagonal();

    BinaryDataset out;
    out.y.resize(n, p);
    std::vector<int> order(static_cast<std::size_t>(p));
    Eigen::VectorXd state(p);
    for (int i = 0; i < n; ++i) {
        auto gen = rng::substream(config.seed, kGibbsStream + static_cast<std::uint64_t>(i));
        for (int j = 0; j < p; ++j) state[j] = rng::uniform(gen) < 0.5 ? 1.0 : 0.0;
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            std::iota(order.begin(), order.end(), 0);
            rng::shuffle(order, gen);
            for (int j : order) {
                const double eta = main[j] + offdiag.row(j).dot(state);
                state[j] = rng::uniform(gen) < detail::sigmoid(eta) ? 1.0 : 0.0;
            }
        }
        for (int j = 0; j < p; ++j) out.y(i, j) = static_cast<std::uint8_t>(state[j]);
    }
    return out;
}

BinaryDataset sample_gibbs(int n, const ParameterSet& params,
                           const std::vector<SimilarityMatrix>& sims,
                           const SamplerConfig& config) {
    return sample_gibbs(n, assemble_theta(params, sims), config);
}

BinaryDataset sample(int n, const ParameterSet& params,
                     const std::vector<SimilarityMatrix>& sims,
                     const SamplerConfig& config) {
    const Eigen::MatrixXd theta = assemble_theta(params, sims);
    switch (config.method) {
        case SamplerMethod::exact:
            return sample_exact(n, theta, config.seed);
        case SamplerMethod::gibbs:
            return sample_gibbs(n, theta, config);
        case SamplerMethod::automatic:
            if (params.p() <= kExactEnumerationCap) {
                return sample_exact(n, theta, config.seed);
            }
            return sample_gibbs(n, theta, config);
    }
    throw input_error("unknown sampler method");
}

}  // namespace isingsim
