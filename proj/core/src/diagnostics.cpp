#include "spatialpu/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spatialpu/error.hpp"

namespace spu {

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> values, double prob) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, prob);
}

Interval central_interval(std::span<const double> values, double level) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InputError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw InputError("standard deviation needs at least two values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) n = std::min(n, c.size());
  const std::size_t half = n / 2;
  if (half < 2) return std::numeric_limits<double>::quiet_NaN();

  std::vector<double> means, vars;
  for (const auto& c : chains) {
    for (std::size_t part = 0; part < 2; ++part) {
      // Second half taken from the end so odd lengths drop the middle draw.
      const std::size_t start = part == 0 ? 0 : c.size() - half;
      std::span<const double> seq(c.data() + start, half);
      const double m = mean(seq);
      double ss = 0.0;
      for (double v : seq) ss += (v - m) * (v - m);
      means.push_back(m);
      vars.push_back(ss / static_cast<double>(half - 1));
    }
  }
  const double nd = static_cast<double>(half);
  const double grand = mean(means);
  double b = 0.0;
  for (double m : means) b += (m - grand) * (m - grand);
  b *= nd / static_cast<double>(means.size() - 1);
  const double w = mean(vars);
  if (w == 0.0) return b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (nd - 1.0) / nd * w + b / nd;
  return std::sqrt(var_plus / w);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("correlation needs two aligned samples of size >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw InputError("correlation undefined for a zero-variance sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace spu
