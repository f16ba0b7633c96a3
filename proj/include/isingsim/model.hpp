#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace isingsim {

using BinaryMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BinaryVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

// Largest dimension for which full state enumeration (2^p states) is allowed.
inline constexpr int kExactEnumerationCap = 20;

enum class SimilarityKind { quantitative, qualitative, adjacency, raw };

// Symmetric p x p matrix with zero diagonal quantifying pairwise similarity
// of the p response variables. Invariants are enforced at construction.
class SimilarityMatrix {
public:
    SimilarityMatrix(Eigen::MatrixXd values, std::string label,
                     SimilarityKind kind = SimilarityKind::raw);

    const Eigen::MatrixXd& values() const { return values_; }
    int dim() const { return static_cast<int>(values_.rows()); }
    const std::string& label() const { return label_; }
    SimilarityKind kind() const { return kind_; }

private:
    Eigen::MatrixXd values_;
    std::string label_;
    SimilarityKind kind_;
};

// Model parameters: p main effects (theta_jj) and K similarity coefficients.
struct ParameterSet {
    Eigen::VectorXd main_effects;  // length p
    Eigen::VectorXd alpha;         // length K

    ParameterSet() = default;
    ParameterSet(Eigen::VectorXd main, Eigen::VectorXd a)
        : main_effects(std::move(main)), alpha(std::move(a)) {}

    int p() const { return static_cast<int>(main_effects.size()); }
    int K() const { return static_cast<int>(alpha.size()); }
};

// n observations of p binary responses, stored one observation per row.
struct BinaryDataset {
    BinaryMatrix y;                    // n x p, entries in {0, 1}
    std::vector<std::string> labels;   // empty or length p

    int n() const { return static_cast<int>(y.rows()); }
    int p() const { return static_cast<int>(y.cols()); }
};

void validate_binary(const BinaryMatrix& y);

// Interaction matrix Theta = diag(main effects) + sum_k alpha_k W_k.
Eigen::MatrixXd assemble_theta(const ParameterSet& params,
                               const std::vector<SimilarityMatrix>& sims);

// Log joint pmf of one configuration under the full Ising model, including
// the log partition function (enumerates all 2^p states; p is capped).
double exact_log_pmf(const BinaryVector& u, const ParameterSet& params,
                     const std::vector<SimilarityMatrix>& sims);
double exact_log_pmf(const BinaryVector& u, const Eigen::MatrixXd& theta);

// P(y_j = 1 | y_{-j}) under Theta; y_rest holds the other p-1 coordinates
// in index order with coordinate j removed.
double conditional_prob(int j, const BinaryVector& y_rest,
                        const ParameterSet& params,
                        const std::vector<SimilarityMatrix>& sims);
double conditional_prob(int j, const BinaryVector& y_rest,
                        const Eigen::MatrixXd& theta);

// Mean log pseudo-likelihood: (1/(n p)) sum_i sum_j log f_j(y_ij | y_{i,-j}).
double log_pseudo_likelihood(const BinaryDataset& data, const ParameterSet& params,
                             const std::vector<SimilarityMatrix>& sims);
double log_pseudo_likelihood(const BinaryDataset& data, const Eigen::MatrixXd& theta);

// Full table of state log-probabilities for p <= kExactEnumerationCap.
// State s encodes u via bit j of s = u_j.
class ExactDistribution {
public:
    explicit ExactDistribution(const Eigen::MatrixXd& theta);
    ExactDistribution(const ParameterSet& params, const std::vector<SimilarityMatrix>& sims);

    int dim() const { return p_; }
    std::size_t size() const { return log_probs_.size(); }
    double log_partition() const { return log_z_; }
    double log_prob(std::uint32_t state) const { return log_probs_[state]; }
    double log_prob(const BinaryVector& u) const;
    const std::vector<double>& log_probs() const { return log_probs_; }

private:
    int p_;
    double log_z_;
    std::vector<double> log_probs_;
};

namespace detail {
// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    double m = x > 0.0 ? x : 0.0;
    return m + std::log1p(std::exp(-std::abs(x)));
}
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_model_inputs(const ParameterSet& params,
                        const std::vector<SimilarityMatrix>& sims);
}  // namespace detail

}  // namespace isingsim
