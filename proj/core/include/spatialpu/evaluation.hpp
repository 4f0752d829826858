#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatialpu/diagnostics.hpp"

namespace spu {

// `exclude` may be empty (nothing excluded) or one flag per node; nodes with
// a nonzero flag are dropped before any metric is computed.

// Midrank AUC. Throws InputError unless both classes remain.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels,
           std::span<const std::uint8_t> exclude = {});
double rmse(std::span<const double> scores, std::span<const std::uint8_t> labels,
            std::span<const std::uint8_t> exclude = {});

enum class Metric { Auc, Rmse };
const char* to_string(Metric m);

struct MetricReport {
  std::string metric;
  double estimate = 0.0;
  Interval ci95;
  std::size_t iterates = 0;
  std::size_t redraws = 0;  // resamples redrawn because one class was missing
  std::string exclusion;
};

// Node bootstrap of one model's metric. Iterate b draws from its own
// generator seeded with mix_seed(seed, b).
MetricReport bootstrap_metric(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> exclude, Metric metric, std::size_t iterates,
                              std::uint64_t seed);

struct DeltaReport {
  std::string metric;
  double delta = 0.0;  // metric(a) - metric(b)
  Interval ci95;
  double p_value = 1.0;
};

struct ComparisonReport {
  DeltaReport auc;
  DeltaReport rmse;
  std::size_t iterates = 0;
  std::size_t redraws = 0;
};

// Paired node bootstrap: both models are scored on the same resample.
// p = 2 min(P(delta* <= 0), P(delta* >= 0)), floored at 1/iterates.
ComparisonReport bootstrap_compare(std::span<const double> scores_a, std::span<const double> scores_b,
                                   std::span<const std::uint8_t> labels, std::span<const std::uint8_t> exclude,
                                   std::size_t iterates, std::uint64_t seed);

// Paired bootstrap over independent units (e.g. per-trial metrics):
// resamples units and compares mean(a) - mean(b).
DeltaReport bootstrap_paired_means(std::span<const double> a, std::span<const double> b, std::size_t iterates,
                                   std::uint64_t seed, std::string metric = {});

// Two-sided bootstrap p-value from a delta distribution.
double bootstrap_p_value(std::span<const double> deltas);

// ---- calibration and identifiability ---------------------------------------

struct IntervalRecord {
  std::string parameter;
  double level = 0.0;  // e.g. 0.9
  double lo = 0.0;
  double hi = 0.0;
  double truth = 0.0;
};

struct CoverageRow {
  std::string parameter;
  double level = 0.0;
  double coverage = 0.0;
  std::size_t trials = 0;
  bool insufficient = false;  // fewer than min_trials records
};

// Rows sorted by (parameter, level).
std::vector<CoverageRow> calibration_curve(std::span<const IntervalRecord> records, std::size_t min_trials = 30);

// Central intervals at each level from posterior draws.
std::vector<IntervalRecord> interval_records(const std::string& parameter, std::span<const double> draws, double truth,
                                             std::span<const double> levels);

struct RecoveryPair {
  std::string parameter;
  double truth = 0.0;
  double estimate = 0.0;
};

struct IdentifiabilityRow {
  std::string parameter;
  double correlation = 0.0;
  std::size_t trials = 0;
  bool insufficient = false;
};

// Pearson correlation of truth vs estimate per parameter, sorted by name.
// Throws InputError when a parameter's truths have zero variance.
std::vector<IdentifiabilityRow> identifiability(std::span<const RecoveryPair> pairs, std::size_t min_trials = 30);

// ---- allocation ------------------------------------------------------------

struct AllocationEntry {
  std::size_t node = 0;
  std::size_t rank = 0;  // 1-based position after sorting by score
  double weight = 0.0;   // 1, or the shared fraction of the last tie group
};

struct AllocationResult {
  std::size_t k = 0;
  std::vector<AllocationEntry> selected;
  std::vector<std::string> attributes;
  std::vector<double> served;     // population-weighted attribute mean over the selection
  std::vector<double> base_rate;  // same over all eligible nodes
};

// Top-k eligible nodes by score (ties broken toward lower index for rank,
// with equal fractional weights for the tie group straddling position k).
// `attributes` is N x A in raw units; `population` per node.
AllocationResult allocate_topk(std::span<const double> scores, std::span<const std::uint8_t> eligible, std::size_t k,
                               const Eigen::MatrixXd& attributes, const std::vector<std::string>& attribute_names,
                               std::span<const double> population);

}  // namespace spu
