#include "isingsim/similarity.hpp"

#include <cmath>
#include <sstream>

#include "isingsim/errors.hpp"

namespace isingsim {

namespace {

void check_dim(const std::string& name, std::size_t size) {
    if (size < 2) {
        throw input_error("attribute '" + name + "' needs at least 2 entities, got " +
                          std::to_string(size));
    }
}

}  // namespace

SimilarityMatrix from_quantitative(const QuantitativeAttribute& attr, double bandwidth,
                                   bool standardize) {
    check_dim(attr.name, attr.values.size());
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw input_error("bandwidth must be positive and finite");
    }
    const int p = static_cast<int>(attr.values.size());
    Eigen::VectorXd z(p);
    for (int j = 0; j < p; ++j) {
        if (!std::isfinite(attr.values[static_cast<std::size_t>(j)])) {
            throw input_error("attribute '" + attr.name + "' has a non-finite value at entry " +
                              std::to_string(j));
        }
        z[j] = attr.values[static_cast<std::size_t>(j)];
    }
    if (standardize) {
        const double mean = z.mean();
        const double sd = std::sqrt((z.array() - mean).square().sum() / (p - 1));
        if (sd == 0.0) {
            throw input_error("attribute '" + attr.name +
                              "' is constant and cannot be standardized");
        }
        z = (z.array() - mean) / sd;
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            const double d = (z[j] - z[k]) / bandwidth;
            const double v = std::exp(-d * d);
            w(j, k) = v;
            w(k, j) = v;
        }
    }
    return SimilarityMatrix(std::move(w), attr.name, SimilarityKind::quantitative);
}

SimilarityMatrix from_qualitative(const QualitativeAttribute& attr) {
    check_dim(attr.name, attr.categories.size());
    const int p = static_cast<int>(attr.categories.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            if (attr.categories[static_cast<std::size_t>(j)] ==
                attr.categories[static_cast<std::size_t>(k)]) {
                w(j, k) = 1.0;
                w(k, j) = 1.0;
            }
        }
    }
    return SimilarityMatrix(std::move(w), attr.name, SimilarityKind::qualitative);
}

SimilarityMatrix from_adjacency(const AdjacencyAttribute& attr) {
    if (attr.dim < 2) {
        throw input_error("adjacency attribute '" + attr.name +
                          "' needs at least 2 entities");
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(attr.dim, attr.dim);
    for (const auto& [a, b] : attr.edges) {
        if (a < 0 || a >= attr.dim || b < 0 || b >= attr.dim) {
            std::ostringstream msg;
            msg << "edge (" << a << ", " << b << ") in '" << attr.name
                << "' is out of range for dimension " << attr.dim;
            throw input_error(msg.str());
        }
        if (a == b) {
            throw input_error("edge list '" + attr.name + "' has a self-loop at index " +
                              std::to_string(a));
        }
        w(a, b) = 1.0;
        w(b, a) = 1.0;
    }
    return SimilarityMatrix(std::move(w), attr.name, SimilarityKind::adjacency);
}

SimilarityDiagnostics validate(const Eigen::MatrixXd& values) {
    SimilarityDiagnostics d;
    if (values.rows() != values.cols() || values.rows() < 1) {
        throw input_error("similarity candidate must be a non-empty square matrix");
    }
    if (!values.allFinite()) {
        throw input_error("similarity candidate has non-finite entries");
    }
    d.symmetry_residual = (values - values.transpose()).cwiseAbs().maxCoeff();
    d.max_abs_diagonal = values.diagonal().cwiseAbs().maxCoeff();
    d.one_norm = values.cwiseAbs().colwise().sum().maxCoeff();
    d.min_entry = values.minCoeff();
    d.max_entry = values.maxCoeff();
    d.ok = d.symmetry_residual == 0.0 && d.max_abs_diagonal == 0.0;
    return d;
}

SimilarityDiagnostics validate(const SimilarityMatrix& sim) {
    return validate(sim.values());
}

}  // namespace isingsim
