#pragma once

#include <map>
#include <string>
#include <vector>

#include "isingsim/benchmark.hpp"
#include "isingsim/model.hpp"
#include "isingsim/selection.hpp"
#include "isingsim/similarity.hpp"

namespace isingsim {

inline constexpr int kSchemaVersion = 1;

// --- binary response matrices ---------------------------------------------
// CSV with a header row of variable names; rows are observations; entries 0/1.
BinaryDataset read_responses_csv(const std::string& path);
void write_responses_csv(const std::string& path, const BinaryDataset& data);

// --- numeric matrices ------------------------------------------------------
// Square CSV with a header row of entity labels.
Eigen::MatrixXd read_matrix_csv(const std::string& path, std::vector<std::string>* labels);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& labels);

SimilarityMatrix read_similarity_csv(const std::string& path, const std::string& label);

// --- attribute tables ------------------------------------------------------
// CSV whose first column is the entity label. A sidecar schema CSV declares
// each remaining column as quantitative or qualitative ("column,kind" rows).
struct AttributeTable {
    std::vector<std::string> entities;
    std::vector<QuantitativeAttribute> quantitative;
    std::vector<QualitativeAttribute> qualitative;
};

AttributeTable read_attribute_table(const std::string& path, const std::string& schema_path);

// Edge list CSV with two label columns; labels resolved against `entities`.
AdjacencyAttribute read_edge_list(const std::string& path,
                                  const std::vector<std::string>& entities,
                                  const std::string& name);

// --- fit results ------------------------------------------------------------
std::string fit_result_to_json(const FitResult& result);
FitResult fit_result_from_json(const std::string& text);
void write_fit_result(const std::string& path, const FitResult& result);
FitResult read_fit_result(const std::string& path);

// Coefficient table CSV: one row per similarity matrix with refit estimate,
// se, and 95% interval (zeros and empty interval fields when inactive).
void write_coefficient_table(const std::string& path, const FitResult& result);

// --- graph export ------------------------------------------------------------
enum class ThresholdPolicy { median, none, value };

struct GraphExportOptions {
    ThresholdPolicy policy = ThresholdPolicy::median;
    double value = 0.0;  // used when policy == value
    std::map<std::string, std::string> node_categories;
};

// Two-column CSV mapping entity label -> category name (optional header row).
std::map<std::string, std::string> read_category_csv(const std::string& path);

// Median of theta_jj' over unique off-diagonal pairs j < j' (signed values;
// even count averages the middle two).
double median_offdiagonal(const Eigen::MatrixXd& theta);

// Undirected weighted GraphViz DOT. An edge is drawn when theta_jj' is
// strictly above the threshold; `none` keeps every pair, +inf keeps none.
void export_graph_dot(const std::string& path, const Eigen::MatrixXd& theta,
                      const std::vector<std::string>& labels,
                      const GraphExportOptions& options);

// --- benchmark reports -------------------------------------------------------
void write_benchmark_csv(const std::string& path, const BenchmarkReport& report);
void write_benchmark_json(const std::string& path, const BenchmarkReport& report);
ScenarioSpec read_scenario_json(const std::string& path);

}  // namespace isingsim
