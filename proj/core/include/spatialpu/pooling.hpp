#pragma once

#include <span>
#include <string>
#include <vector>

#include "spatialpu/priors.hpp"

namespace spu {

// Moment-matched normal approximation to one event's posterior samples.
struct GaussianFit {
  double mean = 0.0;
  double sd = 1.0;
  std::string source;
};

// Throws InputError with fewer than two distinct values.
GaussianFit fit_gaussian(std::span<const double> samples, std::string source = {});

struct GridSpec {
  std::size_t points = 4001;
  // The grid covers min(mean) - span*max(sd) .. max(mean) + span*max(sd),
  // widened to the Gaussian pooled mean +- span*pooled sd when that is larger.
  double sd_span = 6.0;
};

struct PooledPosterior {
  std::string coefficient;
  std::vector<double> grid;
  std::vector<double> density;  // normalized by the trapezoid rule
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  std::vector<GaussianFit> inputs;
  NormalPrior prior;
};

// Pooled density proportional to prod_k N(a; m_k, s_k) / prior(a)^(K-1),
// evaluated on a grid. `prior_sd` is a standard deviation. Throws
// InputError when no fits are given and ModelError when the pooled
// precision sum_k 1/s_k^2 - (K-1)/prior_sd^2 is not positive.
PooledPosterior pool(std::vector<GaussianFit> fits, double prior_mean, double prior_sd, const GridSpec& grid = {},
                     std::string coefficient = {});

// Analytic mean and sd of the same product/quotient of Gaussians.
struct GaussianMoments {
  double mean = 0.0;
  double sd = 0.0;
};
GaussianMoments pooled_gaussian_closed_form(std::span<const GaussianFit> fits, double prior_mean, double prior_sd);

// Per-event sample sets keyed by coefficient name, in one fixed order.
struct EventSamples {
  std::string label;
  std::vector<std::string> coefficients;
  std::vector<std::vector<double>> samples;  // one vector per coefficient
};

// Pools every shared coefficient across events. Throws InputError when the
// events disagree on coefficient names. `exclude` lists event-specific
// parameters (e.g. theta0, theta1, alpha0) left out of the pooling.
std::vector<PooledPosterior> pooled_summary_table(const std::vector<EventSamples>& events, const PriorConfig& prior,
                                                  const std::vector<std::string>& exclude, const GridSpec& grid = {});

}  // namespace spu
