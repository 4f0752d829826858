#include "spatialpu/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "spatialpu/diagnostics.hpp"
#include "spatialpu/error.hpp"

namespace spu {

GaussianFit fit_gaussian(std::span<const double> samples, std::string source) {
  if (samples.size() < 2) throw InputError("at least two samples are needed to fit a normal", source);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (!(*lo < *hi)) throw InputError("samples are constant; cannot fit a normal", source);
  return {mean(samples), sample_sd(samples), std::move(source)};
}

namespace {

double log_normal(double x, double m, double s) {
  const double z = (x - m) / s;
  return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double pooled_precision(std::span<const GaussianFit> fits, double prior_sd) {
  double precision = 0.0;
  for (const auto& f : fits) precision += 1.0 / (f.sd * f.sd);
  return precision - static_cast<double>(fits.size() - 1) / (prior_sd * prior_sd);
}

// Value at which the normalized cumulative trapezoid mass reaches p.
double grid_quantile(const std::vector<double>& x, const std::vector<double>& cdf, double p) {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
  if (it == cdf.begin()) return x.front();
  if (it == cdf.end()) return x.back();
  const auto k = static_cast<std::size_t>(it - cdf.begin());
  const double span = cdf[k] - cdf[k - 1];
  const double t = span > 0.0 ? (p - cdf[k - 1]) / span : 0.0;
  return x[k - 1] + t * (x[k] - x[k - 1]);
}

}  // namespace

GaussianMoments pooled_gaussian_closed_form(std::span<const GaussianFit> fits, double prior_mean, double prior_sd) {
  if (fits.empty()) throw InputError("no fits to pool");
  const double precision = pooled_precision(fits, prior_sd);
  if (!(precision > 0.0)) throw ModelError("pooled precision is not positive");
  double weighted = 0.0;
  for (const auto& f : fits) weighted += f.mean / (f.sd * f.sd);
  weighted -= static_cast<double>(fits.size() - 1) * prior_mean / (prior_sd * prior_sd);
  return {weighted / precision, 1.0 / std::sqrt(precision)};
}

PooledPosterior pool(std::vector<GaussianFit> fits, double prior_mean, double prior_sd, const GridSpec& grid,
                     std::string coefficient) {
  if (fits.empty()) throw InputError("pooling needs at least one fit", coefficient);
  if (!(prior_sd > 0.0)) throw InputError("prior sd must be positive", coefficient);
  if (grid.points < 3) throw InputError("grid needs at least three points", coefficient);
  for (const auto& f : fits) {
    if (!(f.sd > 0.0) || !std::isfinite(f.mean)) throw InputError("fit has non-positive sd", f.source);
  }
  const double precision = pooled_precision(fits, prior_sd);
  if (!(precision > 0.0)) {
    throw ModelError("pooled density is not integrable: sum of fit precisions minus (K-1)/prior_var = " +
                     std::to_string(precision) + " <= 0");
  }
  // Canonical order makes the floating-point sums independent of input order.
  std::sort(fits.begin(), fits.end(), [](const GaussianFit& a, const GaussianFit& b) {
    return std::tie(a.mean, a.sd) < std::tie(b.mean, b.sd);
  });

  double lo = fits.front().mean, hi = fits.front().mean, max_sd = 0.0;
  for (const auto& f : fits) {
    lo = std::min(lo, f.mean);
    hi = std::max(hi, f.mean);
    max_sd = std::max(max_sd, f.sd);
  }
  lo -= grid.sd_span * max_sd;
  hi += grid.sd_span * max_sd;
  // Dividing by the prior can leave the pooled density wider than every fit.
  const GaussianMoments pooled = pooled_gaussian_closed_form(fits, prior_mean, prior_sd);
  lo = std::min(lo, pooled.mean - grid.sd_span * pooled.sd);
  hi = std::max(hi, pooled.mean + grid.sd_span * pooled.sd);

  PooledPosterior out;
  out.coefficient = std::move(coefficient);
  out.prior = {prior_mean, prior_sd};
  out.grid.resize(grid.points);
  std::vector<double> logd(grid.points);
  const double h = (hi - lo) / static_cast<double>(grid.points - 1);
  const double prior_power = static_cast<double>(fits.size() - 1);
  for (std::size_t g = 0; g < grid.points; ++g) {
    const double x = lo + h * static_cast<double>(g);
    out.grid[g] = x;
    double v = 0.0;
    for (const auto& f : fits) v += log_normal(x, f.mean, f.sd);
    if (prior_power > 0.0) v -= prior_power * log_normal(x, prior_mean, prior_sd);
    logd[g] = v;
  }
  const double top = *std::max_element(logd.begin(), logd.end());
  out.density.resize(grid.points);
  for (std::size_t g = 0; g < grid.points; ++g) out.density[g] = std::exp(logd[g] - top);

  std::vector<double> cdf(grid.points, 0.0);
  for (std::size_t g = 1; g < grid.points; ++g) {
    cdf[g] = cdf[g - 1] + 0.5 * h * (out.density[g - 1] + out.density[g]);
  }
  const double total = cdf.back();
  for (std::size_t g = 0; g < grid.points; ++g) {
    out.density[g] /= total;
    cdf[g] /= total;
  }
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t g = 1; g < grid.points; ++g) {
    const double a = out.grid[g - 1], b = out.grid[g];
    const double fa = out.density[g - 1], fb = out.density[g];
    m1 += 0.5 * h * (a * fa + b * fb);
    m2 += 0.5 * h * (a * a * fa + b * b * fb);
  }
  out.mean = m1;
  out.sd = std::sqrt(std::max(0.0, m2 - m1 * m1));
  out.median = grid_quantile(out.grid, cdf, 0.5);
  out.lo95 = grid_quantile(out.grid, cdf, 0.025);
  out.hi95 = grid_quantile(out.grid, cdf, 0.975);
  out.inputs = std::move(fits);
  return out;
}

std::vector<PooledPosterior> pooled_summary_table(const std::vector<EventSamples>& events, const PriorConfig& prior,
                                                  const std::vector<std::string>& exclude, const GridSpec& grid) {
  if (events.empty()) throw InputError("pooling needs at least one event");
  const auto& names = events.front().coefficients;
  for (const auto& e : events) {
    if (e.coefficients != names) throw InputError("coefficient labels differ across events", e.label);
    if (e.samples.size() != e.coefficients.size()) throw InputError("sample columns do not match labels", e.label);
  }
  std::vector<PooledPosterior> out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (std::find(exclude.begin(), exclude.end(), names[k]) != exclude.end()) continue;
    const NormalPrior& p = names[k] == "alpha0" ? prior.alpha0 : prior.alpha_coeff;
    std::vector<GaussianFit> fits;
    for (const auto& e : events) fits.push_back(fit_gaussian(e.samples[k], e.label));
    out.push_back(pool(std::move(fits), p.mean, prior.sd(p), grid, names[k]));
  }
  return out;
}

}  // namespace spu
