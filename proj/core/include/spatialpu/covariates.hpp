#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spatialpu/spatial_graph.hpp"

namespace spu {

// Node covariates: z-scored values for the reporting model, the original
// units for equity summaries, and the per-node population.
struct CovariateTable {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;      // N x M, standardized
  Eigen::MatrixXd raw_values;  // N x M, original units (after transforms such as log)
  std::vector<double> population;
  Eigen::VectorXd means;       // per column, used by destandardize
  Eigen::VectorXd sds;         // sample standard deviations

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

// The six reporting features of the full heterogeneous model. Names refer
// to covariate CSV columns; "log(x)" applies a natural log to column x.
const std::vector<std::string>& default_feature_selection();

// Column-wise z-scoring with the sample (n-1) standard deviation. Throws
// InputError naming the feature when a selected column is constant,
// missing from `names`, or contains non-finite values.
CovariateTable standardize_covariates(const Eigen::MatrixXd& raw, const std::vector<std::string>& names,
                                      const std::vector<std::string>& selection,
                                      std::vector<double> population = {});

Eigen::MatrixXd destandardize(const CovariateTable& table);

// Covariate CSV as read from disk: one row per node id, NaN where missing.
struct RawCovariates {
  std::vector<std::string> ids;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};

RawCovariates read_covariates_csv(const std::string& path, std::string_view id_column = "node_id");

// Evaluates a selection entry ("median_age", "log(population)") against a
// raw table, returning one value per row (NaN where missing or log of a
// non-positive number).
Eigen::VectorXd evaluate_feature(const RawCovariates& raw, std::string_view spec);

// Aligns covariate rows to graph node order and evaluates the selection.
// Every graph node must be present in `raw`.
struct AlignedCovariates {
  Eigen::MatrixXd features;  // N x M in graph order, selection order
  std::vector<double> population;
};
AlignedCovariates align_covariates(const RawCovariates& raw, const SpatialGraph& graph,
                                   const std::vector<std::string>& selection,
                                   std::string_view population_column = "population");

// Ids of rows to exclude before building a graph: zero (or missing)
// population, or a missing value in any selected feature.
struct ExclusionReport {
  std::vector<std::string> zero_population;
  std::vector<std::string> missing_values;
};
ExclusionReport find_exclusions(const RawCovariates& raw, const std::vector<std::string>& selection,
                                std::string_view population_column = "population");

}  // namespace spu
