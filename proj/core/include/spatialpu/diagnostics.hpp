#pragma once

#include <span>
#include <vector>

namespace spu {

// Linear-interpolation sample quantile (Hyndman-Fan type 7). Input need not
// be sorted.
double quantile(std::span<const double> values, double prob);
double quantile_sorted(std::span<const double> sorted, double prob);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Central `level` interval (e.g. 0.95 -> 2.5% and 97.5% quantiles).
Interval central_interval(std::span<const double> values, double level);

double mean(std::span<const double> values);
double sample_sd(std::span<const double> values);

// Split-R-hat over >= 2 chains: each chain is halved and the classical
// potential scale reduction computed on the 2C half-chains. Identical
// constant chains give exactly 1; returns NaN with fewer than 2 chains or
// fewer than 4 draws per chain.
double split_rhat(const std::vector<std::vector<double>>& chains);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace spu
