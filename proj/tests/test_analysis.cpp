#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "graphs.hpp"
#include "spatialpu/baselines.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/evaluation.hpp"
#include "spatialpu/pooling.hpp"

namespace spu {
namespace {

// ---- pooling ---------------------------------------------------------------

TEST(Pooling, FitGaussian) {
  const std::vector<double> v{-1.0, 1.0};
  const auto f = fit_gaussian(v, "x");
  EXPECT_EQ(f.mean, 0.0);
  EXPECT_NEAR(f.sd, std::sqrt(2.0), 1e-15);
  EXPECT_THROW(fit_gaussian(std::vector<double>{2.0, 2.0}), InputError);
  EXPECT_THROW(fit_gaussian(std::vector<double>{2.0}), InputError);
}

TEST(Pooling, HandWorkedTwoFits) {
  // precision 1/0.25 + 1/1 - 1/1 = 4; mean (4*1 + 2 - 0) / 4.
  const std::vector<GaussianFit> fits{{1.0, 0.5, "a"}, {2.0, 1.0, "b"}};
  const auto p = pool(fits, 0.0, 1.0);
  EXPECT_NEAR(p.mean, 1.5, 1e-6);
  EXPECT_NEAR(p.sd, 0.5, 1e-6);
  EXPECT_NEAR(p.median, 1.5, 1e-4);
  EXPECT_NEAR(p.lo95, 1.5 - 1.959964 * 0.5, 1e-3);
  EXPECT_NEAR(p.hi95, 1.5 + 1.959964 * 0.5, 1e-3);
  const auto cf = pooled_gaussian_closed_form(fits, 0.0, 1.0);
  EXPECT_NEAR(cf.mean, 1.5, 1e-12);
  EXPECT_NEAR(cf.sd, 0.5, 1e-12);
}

TEST(Pooling, SingleFitIsIdentity) {
  const auto p = pool({{0.7, 0.2, "only"}}, 0.0, 0.5);
  EXPECT_NEAR(p.mean, 0.7, 1e-6);
  EXPECT_NEAR(p.sd, 0.2, 1e-6);
}

TEST(Pooling, DensityIntegratesToOne) {
  const auto p = pool({{0.1, 0.3}, {-0.2, 0.4}, {0.3, 0.35}}, 0.0, 0.5);
  double area = 0.0;
  for (std::size_t k = 1; k < p.grid.size(); ++k) {
    area += 0.5 * (p.density[k] + p.density[k - 1]) * (p.grid[k] - p.grid[k - 1]);
  }
  EXPECT_NEAR(area, 1.0, 1e-12);
  EXPECT_EQ(p.grid.size(), 4001u);
}

TEST(Pooling, NonIntegrableRejected) {
  // 1/1 + 1/1 - 1/0.5^2 < 0
  EXPECT_THROW(pool({{0.0, 1.0}, {0.0, 1.0}}, 0.0, 0.5), ModelError);
  EXPECT_THROW(pool({}, 0.0, 1.0), InputError);
}

TEST(Pooling, SummaryTableExcludesAndChecksNames) {
  Rng rng(2);
  auto draws = [&](double m, double s) {
    std::vector<double> v(2000);
    for (auto& x : v) x = m + s * standard_normal(rng);
    return v;
  };
  EventSamples a{"a", {"theta0", "alpha_x"}, {draws(0, 1), draws(0.2, 0.1)}};
  EventSamples b{"b", {"theta0", "alpha_x"}, {draws(1, 1), draws(0.3, 0.1)}};
  const auto table = pooled_summary_table({a, b}, PriorConfig{}, {"theta0"});
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table[0].coefficient, "alpha_x");
  EXPECT_NEAR(table[0].mean, 0.25, 0.02);
  EventSamples c{"c", {"theta0", "alpha_y"}, {draws(0, 1), draws(0, 0.1)}};
  EXPECT_THROW(pooled_summary_table({a, c}, PriorConfig{}, {"theta0"}), InputError);
}

// ---- baselines -------------------------------------------------------------

TEST(Baselines, StarNeighbourFraction) {
  const auto g = testing::star_graph(5);
  const std::vector<std::uint8_t> t{0, 1, 1, 0, 0};
  const auto b = spatial_baseline(t, g);
  EXPECT_DOUBLE_EQ(b.scores[0], 0.5);
  EXPECT_DOUBLE_EQ(b.scores[1], 0.0);
  EXPECT_DOUBLE_EQ(b.scores[3], 0.0);
  const std::vector<std::uint8_t> hub{1, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(spatial_baseline(hub, g).scores[4], 1.0);
}

std::vector<geom::Point> line_points(std::size_t n) {
  std::vector<geom::Point> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({100.0 * static_cast<double>(i), 0.0});
  return p;
}

TEST(Baselines, GpShortLengthScaleShrinksTowardMean) {
  const std::vector<std::uint8_t> y{1, 0, 0, 1, 0, 0, 0, 1};
  const auto pts = line_points(y.size());
  const auto fit = gp_regress(y, pts, {1e-3, 0.2});
  const double m = 3.0 / 8.0;
  double var = 0.0;
  for (auto v : y) var += (v - m) * (v - m);
  var /= 7.0;
  EXPECT_NEAR(fit.mean, m, 1e-15);
  EXPECT_NEAR(fit.signal_variance, var, 1e-12);
  const double shrink = var / (var + 0.04);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(fit.scores[i], m + shrink * (y[i] - m), 1e-6);
}

TEST(Baselines, GpLongLengthScaleGivesMean) {
  const std::vector<std::uint8_t> y{1, 0, 0, 1, 0, 0, 0, 1};
  const auto fit = gp_regress(y, line_points(y.size()), {1e6, 0.1});
  for (double s : fit.scores) EXPECT_NEAR(s, 3.0 / 8.0, 1e-3);
}

TEST(Baselines, GpConstantLabels) {
  const std::vector<std::uint8_t> y(6, 0);
  const auto fit = gp_regress(y, line_points(6), {});
  for (double s : fit.scores) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(fit.log_marginal, -std::numeric_limits<double>::infinity());
}

TEST(Baselines, GpSelectPicksGridMaximum) {
  const std::vector<std::uint8_t> y{1, 1, 1, 0, 0, 0, 0, 1, 1, 0};
  const auto pts = line_points(y.size());
  GPOptions opt;
  const auto best = gp_select(y, pts, opt);
  for (double l : opt.length_scales) {
    for (double s : opt.noises) EXPECT_LE(gp_regress(y, pts, {l, s}, opt).log_marginal, best.log_marginal);
  }
  for (double s : best.scores) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

// ---- evaluation ------------------------------------------------------------

TEST(Evaluation, AucExample) {
  const std::vector<double> s{0.8, 0.6, 0.4, 0.2};
  const std::vector<std::uint8_t> y{1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(auc(s, y), 0.75);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<std::uint8_t>{1, 0, 0}), 0.5);
  const std::vector<std::uint8_t> ex{0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(auc(s, y, ex), 1.0);
  EXPECT_THROW(auc(s, std::vector<std::uint8_t>{1, 1, 1, 1}), InputError);
}

TEST(Evaluation, AucMatchesPairCount) {
  Rng rng(4);
  std::vector<double> s(60);
  std::vector<std::uint8_t> y(60);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::round(uniform01(rng) * 10.0) / 10.0;
    y[i] = uniform01(rng) < 0.4;
  }
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] && !y[j]) {
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
  }
  EXPECT_NEAR(auc(s, y), wins / pairs, 1e-12);
}

TEST(Evaluation, Rmse) {
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{1.0, 0.5}, std::vector<std::uint8_t>{1, 0}), std::sqrt(0.125));
}

TEST(Evaluation, BootstrapDeterministicAndContainsEstimate) {
  Rng rng(8);
  std::vector<double> s(80);
  std::vector<std::uint8_t> y(80);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = uniform01(rng) < 0.3;
    s[i] = 0.3 * y[i] + uniform01(rng);
  }
  const auto a = bootstrap_metric(s, y, {}, Metric::Auc, 500, 11);
  const auto b = bootstrap_metric(s, y, {}, Metric::Auc, 500, 11);
  EXPECT_EQ(a.ci95.lo, b.ci95.lo);
  EXPECT_EQ(a.ci95.hi, b.ci95.hi);
  EXPECT_TRUE(a.ci95.contains(a.estimate));
  EXPECT_EQ(a.iterates, 500u);
}

TEST(Evaluation, PairedComparisonIsAntisymmetric) {
  Rng rng(9);
  std::vector<double> s1(100), s2(100);
  std::vector<std::uint8_t> y(100);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = uniform01(rng) < 0.4;
    s1[i] = 0.5 * y[i] + uniform01(rng);
    s2[i] = uniform01(rng);
  }
  const auto ab = bootstrap_compare(s1, s2, y, {}, 1000, 3);
  const auto ba = bootstrap_compare(s2, s1, y, {}, 1000, 3);
  EXPECT_NEAR(ab.auc.delta, -ba.auc.delta, 1e-15);
  EXPECT_NEAR(ab.auc.ci95.lo, -ba.auc.ci95.hi, 1e-12);
  EXPECT_EQ(ab.auc.p_value, ba.auc.p_value);
  EXPECT_GT(ab.auc.delta, 0.0);
  EXPECT_LT(ab.auc.p_value, 0.01);
  EXPECT_GE(ab.auc.p_value, 1.0 / 1000.0);
  const auto self = bootstrap_compare(s1, s1, y, {}, 200, 3);
  EXPECT_EQ(self.auc.delta, 0.0);
  EXPECT_EQ(self.auc.p_value, 1.0);
}

TEST(Evaluation, PValueFromDeltas) {
  EXPECT_EQ(bootstrap_p_value(std::vector<double>{1, 2, 3, 4}), 0.25);
  EXPECT_EQ(bootstrap_p_value(std::vector<double>{-1, 1, -2, 2}), 1.0);
  EXPECT_NEAR(bootstrap_p_value(std::vector<double>{-1, 1, 2, 3}), 0.5, 1e-15);
}

TEST(Evaluation, CalibrationCurve) {
  std::vector<IntervalRecord> recs;
  for (int t = 0; t < 40; ++t) {
    recs.push_back({"b", 0.9, -1, 1, t < 36 ? 0.0 : 5.0});
    recs.push_back({"a", 0.5, -1, 1, t % 2 ? 0.0 : 5.0});
  }
  const auto rows = calibration_curve(recs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].parameter, "a");
  EXPECT_DOUBLE_EQ(rows[0].coverage, 0.5);
  EXPECT_DOUBLE_EQ(rows[1].coverage, 0.9);
  EXPECT_FALSE(rows[1].insufficient);
  EXPECT_TRUE(calibration_curve(recs, 100)[0].insufficient);
}

TEST(Evaluation, IntervalRecordsNested) {
  std::vector<double> d(1000);
  Rng rng(1);
  for (auto& x : d) x = standard_normal(rng);
  const std::vector<double> levels{0.5, 0.8, 0.95};
  const auto r = interval_records("p", d, 0.0, levels);
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t k = 1; k < r.size(); ++k) {
    EXPECT_LE(r[k].lo, r[k - 1].lo);
    EXPECT_GE(r[k].hi, r[k - 1].hi);
  }
}

TEST(Evaluation, Identifiability) {
  std::vector<RecoveryPair> pairs;
  for (int t = 0; t < 40; ++t) pairs.push_back({"x", double(t), 2.0 * t + 1.0});
  const auto rows = identifiability(pairs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].correlation, 1.0, 1e-12);
  EXPECT_EQ(rows[0].trials, 40u);
  std::vector<RecoveryPair> flat(40, {"y", 1.0, 0.3});
  EXPECT_THROW(identifiability(flat), InputError);
}

TEST(Allocation, ServedFraction) {
  const std::vector<double> scores{0.9, 0.8, 0.1, 0.05};
  const std::vector<std::uint8_t> eligible{1, 1, 1, 1};
  Eigen::MatrixXd attr(4, 1);
  attr << 0.5, 0.1, 0.9, 0.9;
  const std::vector<double> pop{100, 300, 50, 50};
  const auto r = allocate_topk(scores, eligible, 2, attr, {"share"}, pop);
  EXPECT_NEAR(r.served[0], (50.0 + 30.0) / 400.0, 1e-15);
  EXPECT_NEAR(r.base_rate[0], (50.0 + 30.0 + 45.0 + 45.0) / 500.0, 1e-15);
  ASSERT_EQ(r.selected.size(), 2u);
  EXPECT_EQ(r.selected[0].node, 0u);
  EXPECT_EQ(r.selected[1].rank, 2u);
}

TEST(Allocation, TieAtCutoffSharesWeight) {
  const std::vector<double> scores{0.9, 0.5, 0.5, 0.1};
  const std::vector<std::uint8_t> eligible{1, 1, 1, 1};
  Eigen::MatrixXd attr(4, 1);
  attr << 1, 0, 1, 0;
  const std::vector<double> pop{1, 1, 1, 1};
  const auto r = allocate_topk(scores, eligible, 2, attr, {"a"}, pop);
  ASSERT_EQ(r.selected.size(), 3u);
  EXPECT_EQ(r.selected[1].weight, 0.5);
  EXPECT_EQ(r.selected[2].weight, 0.5);
  EXPECT_NEAR(r.served[0], (1.0 + 0.5) / 2.0, 1e-15);
}

TEST(Allocation, EligibilityAndBounds) {
  const std::vector<double> scores{0.9, 0.8, 0.1};
  const std::vector<std::uint8_t> eligible{0, 1, 1};
  Eigen::MatrixXd attr = Eigen::MatrixXd::Zero(3, 1);
  const std::vector<double> pop{1, 1, 1};
  const auto r = allocate_topk(scores, eligible, 1, attr, {"a"}, pop);
  EXPECT_EQ(r.selected[0].node, 1u);
  EXPECT_THROW(allocate_topk(scores, eligible, 3, attr, {"a"}, pop), InputError);
  EXPECT_THROW(allocate_topk(scores, eligible, 0, attr, {"a"}, pop), InputError);
}

}  // namespace
}  // namespace spu
