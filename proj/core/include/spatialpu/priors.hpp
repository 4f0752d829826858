#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "spatialpu/ising.hpp"
#include "spatialpu/observation.hpp"
#include "spatialpu/random.hpp"

namespace spu {

// How the second argument of a normal prior is read.
enum class ScaleConvention { StandardDeviation, Variance };

std::string_view to_string(ScaleConvention c);
ScaleConvention parse_scale_convention(std::string_view text);

struct NormalPrior {
  double mean = 0.0;
  double scale = 1.0;
};

struct BetaPrior {
  double a = 1.0;
  double b = 1.0;
};

struct PriorConfig {
  NormalPrior theta0{0.0, 0.5};
  NormalPrior theta1{0.1, 0.03};  // truncated to [0, inf)
  NormalPrior alpha0{0.0, 1.0};
  NormalPrior alpha_coeff{0.0, 0.5};
  BetaPrior homogeneous_alpha{1.2, 0.8};
  ScaleConvention convention = ScaleConvention::StandardDeviation;

  // Throws InputError unless every scale and Beta parameter is positive.
  void validate() const;

  double sd(const NormalPrior& p) const;

  // Joint log prior of (theta0, theta1) up to a constant; -inf for theta1 < 0.
  double log_prior_theta(const IsingParams& p) const;

  // Prior draws; theta1 by rejection from the truncated normal.
  IsingParams sample_theta(Rng& rng) const;
  double sample_homogeneous_alpha(Rng& rng) const;
  ReportingParams sample_reporting(ReportingMode mode, std::size_t n_features, Rng& rng) const;

  // Prior mean vector and standard deviations for [alpha0, alpha_1..alpha_M].
  Eigen::VectorXd logistic_prior_mean(std::size_t n_features) const;
  Eigen::VectorXd logistic_prior_sd(std::size_t n_features) const;
};

double normal_log_density(double x, double mean, double sd);

}  // namespace spu
