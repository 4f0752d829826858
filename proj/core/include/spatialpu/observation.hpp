#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spatialpu/covariates.hpp"
#include "spatialpu/ising.hpp"
#include "spatialpu/random.hpp"

namespace spu {

// 1 when a node received at least one report in the window, else 0.
using ReportVector = std::vector<std::uint8_t>;

enum class ReportingMode { Homogeneous, Heterogeneous };

std::string_view to_string(ReportingMode mode);
ReportingMode parse_reporting_mode(std::string_view text);

// Homogeneous: psi_i = alpha. Heterogeneous: psi_i = logistic(alpha0 + X_i . coeffs).
class ReportingParams {
 public:
  static ReportingParams homogeneous(double alpha);
  static ReportingParams heterogeneous(double alpha0, Eigen::VectorXd coeffs);

  ReportingMode mode() const noexcept { return mode_; }
  double alpha() const;
  double alpha0() const;
  const Eigen::VectorXd& coeffs() const;

 private:
  ReportingMode mode_ = ReportingMode::Homogeneous;
  double alpha_ = 0.5;
  double alpha0_ = 0.0;
  Eigen::VectorXd coeffs_;
};

// Per-node reporting rates; heterogeneous mode uses the standardized
// covariate values. Throws on a coefficient/column mismatch.
std::vector<double> reporting_rates(const ReportingParams& params, const CovariateTable& covariates);

// Homogeneous rates for `n` nodes (no covariates needed).
std::vector<double> reporting_rates(const ReportingParams& params, std::size_t n);

// Rates with the intercept dropped, for coefficients pooled across events.
std::vector<double> pooled_reporting_rates(const Eigen::VectorXd& coeffs, const CovariateTable& covariates);

// T_i ~ Bernoulli(psi_i) where A_i = +1; T_i = 0 where A_i = -1.
ReportVector simulate_reports(std::span<const Spin> state, std::span<const double> psi, Rng& rng);

// Sum over A_i = +1 of T_i log psi_i + (1 - T_i) log(1 - psi_i); -inf when
// a report sits on a node with A_i = -1. psi is clamped to [1e-12, 1-1e-12]
// inside the logarithms only.
double report_loglikelihood(std::span<const std::uint8_t> reports, std::span<const Spin> state,
                            std::span<const double> psi);

// Population-weighted mean of psi with weights = subpopulation count per node.
double weighted_mean_rate(std::span<const double> psi, std::span<const double> weights);

}  // namespace spu
