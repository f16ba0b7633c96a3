#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isingsim/model.hpp"

namespace isingsim {

// One attribute of the p entities, from which a similarity matrix is built.
struct QuantitativeAttribute {
    std::string name;
    std::vector<double> values;  // length p
};

struct QualitativeAttribute {
    std::string name;
    std::vector<std::string> categories;  // length p
};

struct AdjacencyAttribute {
    std::string name;
    int dim = 0;
    std::vector<std::pair<int, int>> edges;  // 0-based endpoints
};

// Gaussian-kernel similarity exp(-((z_j - z_j') / bandwidth)^2) off the
// diagonal. With standardize, z is centered and scaled to unit sd first.
SimilarityMatrix from_quantitative(const QuantitativeAttribute& attr,
                                   double bandwidth = 1.0, bool standardize = false);

// Indicator similarity 1{c_j == c_j'} off the diagonal.
SimilarityMatrix from_qualitative(const QualitativeAttribute& attr);

// Symmetrized 0/1 adjacency: an edge in either direction links both entities.
SimilarityMatrix from_adjacency(const AdjacencyAttribute& attr);

struct SimilarityDiagnostics {
    double symmetry_residual = 0.0;  // max |W - W^T|
    double max_abs_diagonal = 0.0;
    double one_norm = 0.0;           // max column absolute sum
    double min_entry = 0.0;
    double max_entry = 0.0;
    bool ok = false;  // symmetric with zero diagonal and finite entries
};

// Diagnostics for a candidate matrix, usable before construction succeeds.
SimilarityDiagnostics validate(const Eigen::MatrixXd& values);
SimilarityDiagnostics validate(const SimilarityMatrix& sim);

}  // namespace isingsim
