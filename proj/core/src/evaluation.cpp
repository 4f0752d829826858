#include "spatialpu/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "spatialpu/error.hpp"
#include "spatialpu/random.hpp"

namespace spu {

namespace {

struct Scored {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

Scored filter(std::span<const double> scores, std::span<const std::uint8_t> labels,
              std::span<const std::uint8_t> exclude) {
  if (scores.size() != labels.size()) throw InputError("scores and labels have different lengths");
  if (!exclude.empty() && exclude.size() != labels.size()) throw InputError("exclusion mask has the wrong length");
  Scored out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!exclude.empty() && exclude[i]) continue;
    if (!std::isfinite(scores[i])) throw InputError("non-finite score at index " + std::to_string(i));
    out.scores.push_back(scores[i]);
    out.labels.push_back(labels[i] ? 1 : 0);
  }
  return out;
}

// NaN when one class is absent.
double auc_raw(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels,
               std::vector<std::size_t>& order) {
  const std::size_t n = scores.size();
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]]) {
        pos_rank += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nan("");
  const double np = static_cast<double>(n_pos);
  return (pos_rank - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double rmse_raw(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - labels[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(scores.size()));
}

Interval percentile_ci(std::vector<double> values, double point) {
  Interval ci = central_interval(values, 0.95);
  ci.lo = std::min(ci.lo, point);
  ci.hi = std::max(ci.hi, point);
  return ci;
}

// Resample indices for iterate b; redraws (on a fresh stream) while a
// resample lacks one class. Returns the number of redraws.
std::size_t resample(const std::vector<std::uint8_t>& labels, std::uint64_t seed, std::size_t b,
                     std::vector<std::size_t>& idx) {
  const std::size_t n = labels.size();
  idx.resize(n);
  for (std::size_t attempt = 0;; ++attempt) {
    Rng rng(mix_seed(mix_seed(seed, b), attempt));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t pos = 0;
    for (auto& v : idx) {
      v = pick(rng);
      pos += labels[v];
    }
    if (pos > 0 && pos < n) return attempt;
    if (attempt > 1000) throw ModelError("bootstrap could not draw a resample with both classes");
  }
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels, std::span<const std::uint8_t> exclude) {
  const auto d = filter(scores, labels, exclude);
  std::vector<std::size_t> order;
  const double a = auc_raw(d.scores, d.labels, order);
  if (std::isnan(a)) throw InputError("AUC needs both positive and negative labels after exclusion");
  return a;
}

double rmse(std::span<const double> scores, std::span<const std::uint8_t> labels, std::span<const std::uint8_t> exclude) {
  const auto d = filter(scores, labels, exclude);
  if (d.scores.empty()) throw InputError("RMSE has no nodes left after exclusion");
  return rmse_raw(d.scores, d.labels);
}

const char* to_string(Metric m) { return m == Metric::Auc ? "auc" : "rmse"; }

MetricReport bootstrap_metric(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> exclude, Metric metric, std::size_t iterates,
                              std::uint64_t seed) {
  if (iterates == 0) throw InputError("bootstrap needs at least one iterate");
  const auto d = filter(scores, labels, exclude);
  MetricReport out;
  out.metric = to_string(metric);
  out.iterates = iterates;
  out.exclusion = exclude.empty() ? "none" : "training-reported nodes";
  out.estimate = metric == Metric::Auc ? auc(scores, labels, exclude) : rmse(scores, labels, exclude);
  std::vector<double> values(iterates);
  std::vector<std::size_t> idx, order;
  Scored r{std::vector<double>(d.scores.size()), std::vector<std::uint8_t>(d.scores.size())};
  for (std::size_t b = 0; b < iterates; ++b) {
    out.redraws += resample(d.labels, seed, b, idx);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      r.scores[t] = d.scores[idx[t]];
      r.labels[t] = d.labels[idx[t]];
    }
    values[b] = metric == Metric::Auc ? auc_raw(r.scores, r.labels, order) : rmse_raw(r.scores, r.labels);
  }
  out.ci95 = percentile_ci(std::move(values), out.estimate);
  return out;
}

double bootstrap_p_value(std::span<const double> deltas) {
  if (deltas.empty()) throw InputError("no bootstrap deltas");
  std::size_t le = 0, ge = 0;
  for (double d : deltas) {
    le += d <= 0.0;
    ge += d >= 0.0;
  }
  const double n = static_cast<double>(deltas.size());
  const double p = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) / n;
  return std::clamp(p, 1.0 / n, 1.0);
}

ComparisonReport bootstrap_compare(std::span<const double> scores_a, std::span<const double> scores_b,
                                   std::span<const std::uint8_t> labels, std::span<const std::uint8_t> exclude,
                                   std::size_t iterates, std::uint64_t seed) {
  if (iterates == 0) throw InputError("bootstrap needs at least one iterate");
  const auto a = filter(scores_a, labels, exclude);
  const auto b = filter(scores_b, labels, exclude);
  ComparisonReport out;
  out.iterates = iterates;
  std::vector<std::size_t> order;
  const double auc_a = auc_raw(a.scores, a.labels, order);
  const double auc_b = auc_raw(b.scores, b.labels, order);
  if (std::isnan(auc_a)) throw InputError("AUC needs both positive and negative labels after exclusion");
  out.auc.metric = "auc";
  out.rmse.metric = "rmse";
  out.auc.delta = auc_a - auc_b;
  out.rmse.delta = rmse_raw(a.scores, a.labels) - rmse_raw(b.scores, b.labels);

  std::vector<double> d_auc(iterates), d_rmse(iterates);
  std::vector<std::size_t> idx;
  const std::size_t n = a.scores.size();
  Scored ra{std::vector<double>(n), std::vector<std::uint8_t>(n)};
  Scored rb{std::vector<double>(n), std::vector<std::uint8_t>(n)};
  for (std::size_t it = 0; it < iterates; ++it) {
    out.redraws += resample(a.labels, seed, it, idx);
    for (std::size_t t = 0; t < n; ++t) {
      ra.scores[t] = a.scores[idx[t]];
      rb.scores[t] = b.scores[idx[t]];
      ra.labels[t] = rb.labels[t] = a.labels[idx[t]];
    }
    d_auc[it] = auc_raw(ra.scores, ra.labels, order) - auc_raw(rb.scores, rb.labels, order);
    d_rmse[it] = rmse_raw(ra.scores, ra.labels) - rmse_raw(rb.scores, rb.labels);
  }
  out.auc.p_value = bootstrap_p_value(d_auc);
  out.rmse.p_value = bootstrap_p_value(d_rmse);
  out.auc.ci95 = percentile_ci(std::move(d_auc), out.auc.delta);
  out.rmse.ci95 = percentile_ci(std::move(d_rmse), out.rmse.delta);
  return out;
}

DeltaReport bootstrap_paired_means(std::span<const double> a, std::span<const double> b, std::size_t iterates,
                                   std::uint64_t seed, std::string metric) {
  if (a.size() != b.size() || a.empty()) throw InputError("paired samples must be non-empty and aligned");
  if (iterates == 0) throw InputError("bootstrap needs at least one iterate");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  DeltaReport out;
  out.metric = std::move(metric);
  out.delta = mean(diff);
  std::vector<double> deltas(iterates);
  for (std::size_t it = 0; it < iterates; ++it) {
    Rng rng(mix_seed(seed, it));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += diff[pick(rng)];
    deltas[it] = s / static_cast<double>(n);
  }
  out.p_value = bootstrap_p_value(deltas);
  out.ci95 = percentile_ci(std::move(deltas), out.delta);
  return out;
}

// ---- calibration and identifiability ---------------------------------------

std::vector<CoverageRow> calibration_curve(std::span<const IntervalRecord> records, std::size_t min_trials) {
  std::map<std::pair<std::string, double>, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& r : records) {
    auto& [hit, total] = tally[{r.parameter, r.level}];
    hit += (r.lo <= r.truth && r.truth <= r.hi) ? 1 : 0;
    ++total;
  }
  std::vector<CoverageRow> out;
  for (const auto& [key, count] : tally) {
    out.push_back({key.first, key.second, static_cast<double>(count.first) / static_cast<double>(count.second),
                   count.second, count.second < min_trials});
  }
  return out;
}

std::vector<IntervalRecord> interval_records(const std::string& parameter, std::span<const double> draws, double truth,
                                             std::span<const double> levels) {
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<IntervalRecord> out;
  for (double level : levels) {
    const double tail = 0.5 * (1.0 - level);
    out.push_back({parameter, level, quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail), truth});
  }
  return out;
}

std::vector<IdentifiabilityRow> identifiability(std::span<const RecoveryPair> pairs, std::size_t min_trials) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> grouped;
  for (const auto& p : pairs) {
    grouped[p.parameter].first.push_back(p.truth);
    grouped[p.parameter].second.push_back(p.estimate);
  }
  std::vector<IdentifiabilityRow> out;
  for (const auto& [name, xy] : grouped) {
    const auto [lo, hi] = std::minmax_element(xy.first.begin(), xy.first.end());
    if (!(*lo < *hi)) throw InputError("true values have zero variance", name);
    out.push_back({name, pearson_correlation(xy.first, xy.second), xy.first.size(), xy.first.size() < min_trials});
  }
  return out;
}

// ---- allocation ------------------------------------------------------------

AllocationResult allocate_topk(std::span<const double> scores, std::span<const std::uint8_t> eligible, std::size_t k,
                               const Eigen::MatrixXd& attributes, const std::vector<std::string>& attribute_names,
                               std::span<const double> population) {
  const std::size_t n = scores.size();
  if (eligible.size() != n || population.size() != n || static_cast<std::size_t>(attributes.rows()) != n) {
    throw InputError("allocation inputs are misaligned");
  }
  if (static_cast<std::size_t>(attributes.cols()) != attribute_names.size()) {
    throw InputError("attribute names do not match the attribute matrix");
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (eligible[i]) order.push_back(i);
  }
  if (k == 0) throw InputError("k must be positive", "k");
  if (k > order.size()) {
    throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(order.size()) + " eligible nodes",
                     "k");
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double cut = scores[order[k - 1]];
  std::size_t above = 0, tied = 0;
  for (auto i : order) {
    if (scores[i] > cut) {
      ++above;
    } else if (scores[i] == cut) {
      ++tied;
    }
  }
  const double tie_weight = static_cast<double>(k - above) / static_cast<double>(tied);

  AllocationResult out;
  out.k = k;
  out.attributes = attribute_names;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double s = scores[order[r]];
    if (s > cut) {
      out.selected.push_back({order[r], r + 1, 1.0});
    } else if (s == cut) {
      out.selected.push_back({order[r], r + 1, tie_weight});
    }
  }

  const auto a = static_cast<std::size_t>(attributes.cols());
  out.served.assign(a, 0.0);
  out.base_rate.assign(a, 0.0);
  double served_pop = 0.0, base_pop = 0.0;
  for (const auto& e : out.selected) served_pop += e.weight * population[e.node];
  for (auto i : order) base_pop += population[i];
  for (std::size_t c = 0; c < a; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    double s = 0.0, b = 0.0;
    for (const auto& e : out.selected) s += e.weight * population[e.node] * attributes(static_cast<Eigen::Index>(e.node), ci);
    for (auto i : order) b += population[i] * attributes(static_cast<Eigen::Index>(i), ci);
    out.served[c] = served_pop > 0.0 ? s / served_pop : 0.0;
    out.base_rate[c] = base_pop > 0.0 ? b / base_pop : 0.0;
  }
  return out;
}

}  // namespace spu
