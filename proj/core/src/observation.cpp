#include "spatialpu/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spatialpu/error.hpp"

namespace spu {

std::string_view to_string(ReportingMode mode) {
  return mode == ReportingMode::Homogeneous ? "homogeneous" : "heterogeneous";
}

ReportingMode parse_reporting_mode(std::string_view text) {
  if (text == "homogeneous") return ReportingMode::Homogeneous;
  if (text == "heterogeneous") return ReportingMode::Heterogeneous;
  throw InputError("unknown reporting mode '" + std::string(text) + "'", std::string(text));
}

ReportingParams ReportingParams::homogeneous(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("homogeneous alpha must lie in (0, 1)");
  ReportingParams p;
  p.mode_ = ReportingMode::Homogeneous;
  p.alpha_ = alpha;
  return p;
}

ReportingParams ReportingParams::heterogeneous(double alpha0, Eigen::VectorXd coeffs) {
  if (!std::isfinite(alpha0) || !coeffs.allFinite()) throw InputError("reporting coefficients must be finite");
  ReportingParams p;
  p.mode_ = ReportingMode::Heterogeneous;
  p.alpha0_ = alpha0;
  p.coeffs_ = std::move(coeffs);
  return p;
}

double ReportingParams::alpha() const {
  if (mode_ != ReportingMode::Homogeneous) throw InputError("alpha is only defined in homogeneous mode");
  return alpha_;
}

double ReportingParams::alpha0() const {
  if (mode_ != ReportingMode::Heterogeneous) throw InputError("alpha0 is only defined in heterogeneous mode");
  return alpha0_;
}

const Eigen::VectorXd& ReportingParams::coeffs() const {
  if (mode_ != ReportingMode::Heterogeneous) throw InputError("coefficients are only defined in heterogeneous mode");
  return coeffs_;
}

namespace {

std::vector<double> logistic_rates(double intercept, const Eigen::VectorXd& coeffs, const CovariateTable& cov) {
  if (static_cast<std::size_t>(coeffs.size()) != cov.cols()) {
    throw InputError("reporting model has " + std::to_string(coeffs.size()) + " coefficients but covariates have " +
                     std::to_string(cov.cols()) + " columns");
  }
  const Eigen::VectorXd eta = (cov.values * coeffs).array() + intercept;
  std::vector<double> psi(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) psi[static_cast<std::size_t>(i)] = logistic(eta(i));
  return psi;
}

}  // namespace

std::vector<double> reporting_rates(const ReportingParams& params, const CovariateTable& covariates) {
  if (params.mode() == ReportingMode::Homogeneous) return std::vector<double>(covariates.rows(), params.alpha());
  return logistic_rates(params.alpha0(), params.coeffs(), covariates);
}

std::vector<double> reporting_rates(const ReportingParams& params, std::size_t n) {
  if (params.mode() != ReportingMode::Homogeneous) throw InputError("heterogeneous reporting requires covariates");
  return std::vector<double>(n, params.alpha());
}

std::vector<double> pooled_reporting_rates(const Eigen::VectorXd& coeffs, const CovariateTable& covariates) {
  return logistic_rates(0.0, coeffs, covariates);
}

ReportVector simulate_reports(std::span<const Spin> state, std::span<const double> psi, Rng& rng) {
  if (state.size() != psi.size()) throw InputError("state and reporting-rate vectors are misaligned");
  ReportVector t(state.size(), 0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1) t[i] = uniform01(rng) < psi[i] ? 1 : 0;
  }
  return t;
}

double report_loglikelihood(std::span<const std::uint8_t> reports, std::span<const Spin> state,
                            std::span<const double> psi) {
  if (reports.size() != state.size() || psi.size() != state.size()) {
    throw InputError("report, state and rate vectors are misaligned");
  }
  constexpr double lo = 1e-12, hi = 1.0 - 1e-12;
  double ll = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] != 1) {
      if (reports[i]) return -std::numeric_limits<double>::infinity();
      continue;
    }
    const double p = std::clamp(psi[i], lo, hi);
    ll += reports[i] ? std::log(p) : std::log1p(-p);
  }
  return ll;
}

double weighted_mean_rate(std::span<const double> psi, std::span<const double> weights) {
  if (psi.size() != weights.size()) throw InputError("rate and weight vectors are misaligned");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    num += weights[i] * psi[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw InputError("weights sum to zero");
  return num / den;
}

}  // namespace spu
