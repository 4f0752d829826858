#include "spatialpu/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "spatialpu/error.hpp"

namespace spu {

std::string_view to_string(ScaleConvention c) {
  return c == ScaleConvention::StandardDeviation ? "sd" : "variance";
}

ScaleConvention parse_scale_convention(std::string_view text) {
  if (text == "sd" || text == "standard_deviation") return ScaleConvention::StandardDeviation;
  if (text == "variance" || text == "var") return ScaleConvention::Variance;
  throw InputError("unknown prior scale convention '" + std::string(text) + "'", std::string(text));
}

double normal_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

void PriorConfig::validate() const {
  for (const auto* p : {&theta0, &theta1, &alpha0, &alpha_coeff}) {
    if (!(p->scale > 0.0) || !std::isfinite(p->mean)) throw InputError("prior scales must be strictly positive");
  }
  if (!(homogeneous_alpha.a > 0.0 && homogeneous_alpha.b > 0.0)) {
    throw InputError("Beta prior parameters must be strictly positive");
  }
}

double PriorConfig::sd(const NormalPrior& p) const {
  return convention == ScaleConvention::StandardDeviation ? p.scale : std::sqrt(p.scale);
}

double PriorConfig::log_prior_theta(const IsingParams& p) const {
  if (p.theta1 < 0.0) return -std::numeric_limits<double>::infinity();
  return normal_log_density(p.theta0, theta0.mean, sd(theta0)) +
         normal_log_density(p.theta1, theta1.mean, sd(theta1));
}

IsingParams PriorConfig::sample_theta(Rng& rng) const {
  IsingParams p;
  p.theta0 = theta0.mean + sd(theta0) * standard_normal(rng);
  do {
    p.theta1 = theta1.mean + sd(theta1) * standard_normal(rng);
  } while (p.theta1 < 0.0);
  return p;
}

double PriorConfig::sample_homogeneous_alpha(Rng& rng) const {
  double a;
  do {
    a = beta_draw(rng, homogeneous_alpha.a, homogeneous_alpha.b);
  } while (!(a > 0.0 && a < 1.0));
  return a;
}

ReportingParams PriorConfig::sample_reporting(ReportingMode mode, std::size_t n_features, Rng& rng) const {
  if (mode == ReportingMode::Homogeneous) return ReportingParams::homogeneous(sample_homogeneous_alpha(rng));
  const double a0 = alpha0.mean + sd(alpha0) * standard_normal(rng);
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(n_features));
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) = alpha_coeff.mean + sd(alpha_coeff) * standard_normal(rng);
  }
  return ReportingParams::heterogeneous(a0, std::move(coeffs));
}

Eigen::VectorXd PriorConfig::logistic_prior_mean(std::size_t n_features) const {
  Eigen::VectorXd m(static_cast<Eigen::Index>(n_features + 1));
  m(0) = alpha0.mean;
  m.tail(static_cast<Eigen::Index>(n_features)).setConstant(alpha_coeff.mean);
  return m;
}

Eigen::VectorXd PriorConfig::logistic_prior_sd(std::size_t n_features) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(n_features + 1));
  s(0) = sd(alpha0);
  s.tail(static_cast<Eigen::Index>(n_features)).setConstant(sd(alpha_coeff));
  return s;
}

}  // namespace spu
