#include "spatialpu/covariates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"

namespace spu {

const std::vector<std::string>& default_feature_selection() {
  static const std::vector<std::string> features = {
      "log(population)", "median_age",  "median_income", "bachelors_share",
      "white_share",     "owner_occupied_share"};
  return features;
}

CovariateTable standardize_covariates(const Eigen::MatrixXd& raw, const std::vector<std::string>& names,
                                      const std::vector<std::string>& selection,
                                      std::vector<double> population) {
  if (static_cast<std::size_t>(raw.cols()) != names.size()) {
    throw InputError("covariate matrix has " + std::to_string(raw.cols()) + " columns but " +
                     std::to_string(names.size()) + " names");
  }
  const Eigen::Index n = raw.rows();
  if (!population.empty() && population.size() != static_cast<std::size_t>(n)) {
    throw InputError("population vector does not match covariate rows");
  }
  if (n < 2) throw InputError("standardization needs at least two rows");

  CovariateTable table;
  table.feature_names = selection;
  table.raw_values.resize(n, static_cast<Eigen::Index>(selection.size()));
  table.values.resize(n, static_cast<Eigen::Index>(selection.size()));
  table.means.resize(static_cast<Eigen::Index>(selection.size()));
  table.sds.resize(static_cast<Eigen::Index>(selection.size()));
  for (std::size_t k = 0; k < selection.size(); ++k) {
    const auto it = std::find(names.begin(), names.end(), selection[k]);
    if (it == names.end()) throw InputError("unknown feature '" + selection[k] + "'", selection[k]);
    const Eigen::VectorXd col = raw.col(it - names.begin());
    if (!col.allFinite()) {
      throw InputError("feature '" + selection[k] + "' has missing or non-finite values", selection[k]);
    }
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      throw InputError("feature '" + selection[k] + "' is constant", selection[k]);
    }
    const auto j = static_cast<Eigen::Index>(k);
    table.raw_values.col(j) = col;
    table.values.col(j) = (col.array() - mean) / sd;
    table.means(j) = mean;
    table.sds(j) = sd;
  }
  table.population = population.empty() ? std::vector<double>(static_cast<std::size_t>(n), 1.0)
                                         : std::move(population);
  return table;
}

Eigen::MatrixXd destandardize(const CovariateTable& table) {
  Eigen::MatrixXd out = table.values;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = out.col(j).array() * table.sds(j) + table.means(j);
  }
  return out;
}

RawCovariates read_covariates_csv(const std::string& path, std::string_view id_column) {
  const auto table = csv::read_file(path);
  const std::size_t id_col = table.column(id_column);
  RawCovariates raw;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != id_col) raw.columns.push_back(table.header[c]);
  }
  raw.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(raw.columns.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    raw.ids.push_back(row[id_col]);
    Eigen::Index out_c = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == id_col) continue;
      raw.values(static_cast<Eigen::Index>(r), out_c++) =
          csv::is_missing(row[c]) ? std::numeric_limits<double>::quiet_NaN()
                                  : csv::parse_double(row[c], table.header[c]);
    }
  }
  return raw;
}

Eigen::VectorXd evaluate_feature(const RawCovariates& raw, std::string_view spec) {
  bool take_log = false;
  std::string_view column = spec;
  if (spec.size() > 5 && spec.substr(0, 4) == "log(" && spec.back() == ')') {
    take_log = true;
    column = spec.substr(4, spec.size() - 5);
  }
  const auto it = std::find(raw.columns.begin(), raw.columns.end(), column);
  if (it == raw.columns.end()) {
    throw InputError("covariate column '" + std::string(column) + "' not found", std::string(column));
  }
  Eigen::VectorXd col = raw.values.col(it - raw.columns.begin());
  if (take_log) {
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      col(i) = col(i) > 0.0 ? std::log(col(i)) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return col;
}

AlignedCovariates align_covariates(const RawCovariates& raw, const SpatialGraph& graph,
                                   const std::vector<std::string>& selection,
                                   std::string_view population_column) {
  std::map<std::string, Eigen::Index, std::less<>> row_of;
  for (std::size_t r = 0; r < raw.ids.size(); ++r) row_of.emplace(raw.ids[r], static_cast<Eigen::Index>(r));
  std::vector<Eigen::VectorXd> cols;
  for (const auto& spec : selection) cols.push_back(evaluate_feature(raw, spec));
  const Eigen::VectorXd pop = evaluate_feature(raw, population_column);

  AlignedCovariates out;
  out.features.resize(static_cast<Eigen::Index>(graph.size()), static_cast<Eigen::Index>(selection.size()));
  out.population.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& id = graph.node_ids()[i];
    const auto it = row_of.find(id);
    if (it == row_of.end()) throw InputError("no covariate row for node '" + id + "'", id);
    for (std::size_t k = 0; k < selection.size(); ++k) {
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cols[k](it->second);
    }
    out.population[i] = pop(it->second);
  }
  return out;
}

ExclusionReport find_exclusions(const RawCovariates& raw, const std::vector<std::string>& selection,
                                std::string_view population_column) {
  ExclusionReport report;
  const Eigen::VectorXd pop = evaluate_feature(raw, population_column);
  std::vector<Eigen::VectorXd> cols;
  for (const auto& spec : selection) cols.push_back(evaluate_feature(raw, spec));
  for (std::size_t r = 0; r < raw.ids.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    if (!(pop(i) > 0.0)) {
      report.zero_population.push_back(raw.ids[r]);
      continue;
    }
    for (const auto& c : cols) {
      if (!std::isfinite(c(i))) {
        report.missing_values.push_back(raw.ids[r]);
        break;
      }
    }
  }
  return report;
}

}  // namespace spu
