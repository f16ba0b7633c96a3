#include "isingsim/model.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "isingsim/errors.hpp"

namespace isingsim {

namespace {

bool finite_all(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Streaming log-sum-exp accumulator.
struct LogSumExp {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double x) {
        if (x <= max) {
            sum += std::exp(x - max);
        } else {
            sum = sum * std::exp(max - x) + 1.0;
            max = x;
        }
    }
    double value() const { return max + std::log(sum); }
};

// Visits all 2^p configurations in Gray-code order, maintaining the energy
// u' theta_offdiag u / 2-style sum incrementally, and hands each state's
// energy to `visit(state_bits, energy)`.
template <typename Visitor>
void enumerate_energies(const Eigen::MatrixXd& theta, Visitor&& visit) {
    const int p = static_cast<int>(theta.rows());
    Eigen::MatrixXd offdiag = theta;
    offdiag.diagonal().setZero();
    const Eigen::VectorXd main = theta.diagonal();

    Eigen::VectorXd field = Eigen::VectorXd::Zero(p);  // offdiag * u for current u
    double energy = 0.0;
    std::uint32_t state = 0;
    visit(state, energy);

    const std::uint64_t count = std::uint64_t{1} << p;
    for (std::uint64_t t = 1; t < count; ++t) {
        const int b = std::countr_zero(t);  // bit flipped between Gray(t-1), Gray(t)
        const std::uint32_t mask = std::uint32_t{1} << b;
        if (state & mask) {
            energy -= main[b] + field[b];
            field -= offdiag.col(b);
            state &= ~mask;
        } else {
            energy += main[b] + field[b];
            field += offdiag.col(b);
            state |= mask;
        }
        visit(state, energy);
    }
}

double state_energy(const BinaryVector& u, const Eigen::MatrixXd& theta) {
    const int p = static_cast<int>(theta.rows());
    double e = 0.0;
    for (int j = 0; j < p; ++j) {
        if (!u[j]) continue;
        e += theta(j, j);
        for (int k = j + 1; k < p; ++k) {
            if (u[k]) e += theta(j, k);
        }
    }
    return e;
}

void check_theta(const Eigen::MatrixXd& theta) {
    if (theta.rows() != theta.cols()) {
        throw input_error("interaction matrix must be square");
    }
    if (!finite_all(theta)) {
        throw input_error("interaction matrix has non-finite entries");
    }
}

void check_enumeration_cap(int p) {
    if (p < 1) throw input_error("model dimension must be positive");
    if (p > kExactEnumerationCap) {
        std::ostringstream msg;
        msg << "exact enumeration requires p <= " << kExactEnumerationCap << ", got p = "
            << p << "; use the Gibbs sampler for larger models";
        throw input_error(msg.str());
    }
}

void check_state(const BinaryVector& u, int p) {
    if (static_cast<int>(u.size()) != p) {
        std::ostringstream msg;
        msg << "configuration has length " << u.size() << ", model dimension is " << p;
        throw input_error(msg.str());
    }
    for (int j = 0; j < p; ++j) {
        if (u[j] > 1) throw input_error("configuration entries must be 0 or 1");
    }
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(Eigen::MatrixXd values, std::string label,
                                   SimilarityKind kind)
    : values_(std::move(values)), label_(std::move(label)), kind_(kind) {
    if (values_.rows() != values_.cols()) {
        throw input_error("similarity matrix '" + label_ + "' must be square");
    }
    if (!finite_all(values_)) {
        throw input_error("similarity matrix '" + label_ + "' has non-finite entries");
    }
    const int p = static_cast<int>(values_.rows());
    for (int j = 0; j < p; ++j) {
        if (values_(j, j) != 0.0) {
            std::ostringstream msg;
            msg << "similarity matrix '" << label_ << "' has nonzero diagonal at ("
                << j << ", " << j << ")";
            throw input_error(msg.str());
        }
        for (int k = j + 1; k < p; ++k) {
            if (values_(j, k) != values_(k, j)) {
                std::ostringstream msg;
                msg << "similarity matrix '" << label_ << "' is asymmetric at (" << j
                    << ", " << k << ")";
                throw input_error(msg.str());
            }
        }
    }
}

void validate_binary(const BinaryMatrix& y) {
    if (y.rows() < 1 || y.cols() < 1) {
        throw input_error("response matrix must be non-empty");
    }
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            if (y(i, j) > 1) {
                std::ostringstream msg;
                msg << "response entry at row " << i << ", column " << j
                    << " is not 0/1";
                throw input_error(msg.str());
            }
        }
    }
}

namespace detail {

void check_model_inputs(const ParameterSet& params,
                        const std::vector<SimilarityMatrix>& sims) {
    const int p = params.p();
    if (p < 1) throw input_error("parameter set has no main effects");
    if (static_cast<int>(sims.size()) != params.K()) {
        std::ostringstream msg;
        msg << "parameter set has " << params.K() << " coefficients but "
            << sims.size() << " similarity matrices were given";
        throw input_error(msg.str());
    }
    for (const auto& sim : sims) {
        if (sim.dim() != p) {
            std::ostringstream msg;
            msg << "similarity matrix '" << sim.label() << "' has dimension "
                << sim.dim() << ", expected " << p;
            throw input_error(msg.str());
        }
    }
    if (!params.main_effects.allFinite() || !params.alpha.allFinite()) {
        throw input_error("parameters must be finite");
    }
}

}  // namespace detail

Eigen::MatrixXd assemble_theta(const ParameterSet& params,
                               const std::vector<SimilarityMatrix>& sims) {
    detail::check_model_inputs(params, sims);
    const int p = params.p();
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
    theta.diagonal() = params.main_effects;
    for (int k = 0; k < params.K(); ++k) {
        theta.noalias() += params.alpha[k] * sims[static_cast<std::size_t>(k)].values();
    }
    return theta;
}

double exact_log_pmf(const BinaryVector& u, const Eigen::MatrixXd& theta) {
    check_theta(theta);
    const int p = static_cast<int>(theta.rows());
    check_enumeration_cap(p);
    check_state(u, p);

    LogSumExp lse;
    enumerate_energies(theta, [&](std::uint32_t, double e) { lse.add(e); });
    return state_energy(u, theta) - lse.value();
}

double exact_log_pmf(const BinaryVector& u, const ParameterSet& params,
                     const std::vector<SimilarityMatrix>& sims) {
    return exact_log_pmf(u, assemble_theta(params, sims));
}

double conditional_prob(int j, const BinaryVector& y_rest, const Eigen::MatrixXd& theta) {
    check_theta(theta);
    const int p = static_cast<int>(theta.rows());
    if (j < 0 || j >= p) throw input_error("conditional index out of range");
    if (static_cast<int>(y_rest.size()) != p - 1) {
        std::ostringstream msg;
        msg << "conditioning vector has length " << y_rest.size() << ", expected "
            << (p - 1);
        throw input_error(msg.str());
    }
    double eta = theta(j, j);
    for (int k = 0; k < p - 1; ++k) {
        const int col = k < j ? k : k + 1;
        if (y_rest[k] > 1) throw input_error("conditioning entries must be 0 or 1");
        if (y_rest[k]) eta += theta(j, col);
    }
    return detail::sigmoid(eta);
}

double conditional_prob(int j, const BinaryVector& y_rest, const ParameterSet& params,
                        const std::vector<SimilarityMatrix>& sims) {
    return conditional_prob(j, y_rest, assemble_theta(params, sims));
}

double log_pseudo_likelihood(const BinaryDataset& data, const Eigen::MatrixXd& theta) {
    check_theta(theta);
    validate_binary(data.y);
    const int n = data.n();
    const int p = data.p();
    if (static_cast<int>(theta.rows()) != p) {
        std::ostringstream msg;
        msg << "data has " << p << " columns, interaction matrix has dimension "
            << theta.rows();
        throw input_error(msg.str());
    }

    const Eigen::VectorXd main = theta.diagonal();
    double total = 0.0;
    Eigen::VectorXd yi(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) yi[j] = static_cast<double>(data.y(i, j));
        const Eigen::VectorXd t = theta * yi;  // includes the own-diagonal term
        for (int j = 0; j < p; ++j) {
            const double eta = main[j] + t[j] - main[j] * yi[j];
            total += yi[j] * eta - detail::softplus(eta);
        }
    }
    return total / (static_cast<double>(n) * p);
}

double log_pseudo_likelihood(const BinaryDataset& data, const ParameterSet& params,
                             const std::vector<SimilarityMatrix>& sims) {
    return log_pseudo_likelihood(data, assemble_theta(params, sims));
}

ExactDistribution::ExactDistribution(const Eigen::MatrixXd& theta) {
    check_theta(theta);
    p_ = static_cast<int>(theta.rows());
    check_enumeration_cap(p_);
    log_probs_.assign(std::size_t{1} << p_, 0.0);
    LogSumExp lse;
    enumerate_energies(theta, [&](std::uint32_t state, double e) {
        log_probs_[state] = e;
        lse.add(e);
    });
    log_z_ = lse.value();
    for (double& lp : log_probs_) lp -= log_z_;
}

ExactDistribution::ExactDistribution(const ParameterSet& params,
                                     const std::vector<SimilarityMatrix>& sims)
    : ExactDistribution(assemble_theta(params, sims)) {}

double ExactDistribution::log_prob(const BinaryVector& u) const {
    check_state(u, p_);
    std::uint32_t state = 0;
    for (int j = 0; j < p_; ++j) {
        if (u[j]) state |= std::uint32_t{1} << j;
    }
    return log_probs_[state];
}

}  // namespace isingsim
