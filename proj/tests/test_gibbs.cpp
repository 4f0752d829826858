#include <cmath>
#include <algorithm>
#include <limits>
#include <map>
#include <tuple>
#include <numeric>

#include <gtest/gtest.h>

#include "graphs.hpp"
#include "spatialpu/diagnostics.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/gibbs.hpp"
#include "spatialpu/logistic_kernel.hpp"

namespace spu {
namespace {

using testing::grid_graph;

TEST(Config, ThinningArithmetic) {
  MCMCConfig c;
  EXPECT_EQ(c.thin_stride(), 2u);
  EXPECT_EQ(c.retained_per_chain(), 20000u);
  c.thin_keep_fraction = 0.3;
  EXPECT_EQ(c.thin_stride(), 4u);
  c.total_iterations = 10;
  c.burn_in = 3;
  EXPECT_EQ(c.retained_per_chain(), 2u);
}

TEST(Config, Validation) {
  MCMCConfig c;
  c.burn_in = c.total_iterations;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.thin_keep_fraction = 0.0;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.accept_low = 0.7;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.proposal_step = 0.0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(Svea, IdentityProposalHasZeroLogRatio) {
  const IsingStats s{3, 7};
  const IsingParams p{0.2, 0.1};
  EXPECT_EQ(svea_log_acceptance(s, s, p, p, PriorConfig{}), 0.0);
}

TEST(Svea, NegativeCouplingRejected) {
  const IsingStats s{3, 7};
  EXPECT_EQ(svea_log_acceptance(s, s, {0.0, 0.1}, {0.0, -0.01}, PriorConfig{}),
            -std::numeric_limits<double>::infinity());
}

TEST(Svea, LogRatioFormula) {
  const IsingStats a{4, 10}, w{-2, 6};
  const IsingParams cur{0.1, 0.1}, prop{0.3, 0.15};
  const PriorConfig prior;
  const double expected = (0.3 - 0.1) * (4 - (-2)) + (0.15 - 0.1) * (10 - 6) +
                          prior.log_prior_theta(prop) - prior.log_prior_theta(cur);
  EXPECT_NEAR(svea_log_acceptance(a, w, cur, prop, prior), expected, 1e-12);
}

TEST(Svea, TinyStepAlwaysAcceptsNearIdentity) {
  const auto g = grid_graph(3, 3);
  StateVector a(g.size(), 1);
  Rng rng(2);
  SveaUpdater up(g, 5);
  IsingParams p{0.0, 0.1};
  std::size_t accepted = 0;
  for (int k = 0; k < 200; ++k) {
    auto r = up.update(p, a, PriorConfig{}, 1e-9, rng);
    accepted += r.accepted;
    EXPECT_GE(r.params.theta1, 0.0);
  }
  EXPECT_GT(accepted, 190u);
}

TEST(Latent, ConditionalExample) {
  EXPECT_NEAR(latent_conditional(0.5, 0.5), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(latent_conditional(0.5, 0.0), 0.5, 1e-15);
  EXPECT_EQ(latent_conditional(0.5, 1.0), 0.0);
}

TEST(Latent, SweepClampsReportedNodes) {
  const auto g = grid_graph(4, 4);
  Rng rng(8);
  StateVector s(g.size(), -1);
  std::vector<std::uint8_t> t(g.size(), 0);
  t[3] = t[7] = 1;
  std::vector<double> psi(g.size(), 0.9);
  for (int k = 0; k < 50; ++k) {
    sample_latent_states(s, t, {-3.0, 0.0}, psi, g, rng);
    EXPECT_EQ(s[3], 1);
    EXPECT_EQ(s[7], 1);
  }
}

TEST(Latent, SingleNodeFrequencyMatchesConditional) {
  const auto g = testing::path_graph(2);
  std::vector<std::uint8_t> t{1, 0};
  std::vector<double> psi{0.4, 0.4};
  const IsingParams p{0.1, 0.3};
  const double expected = latent_conditional(logistic(2.0 * (0.1 + 0.3)), 0.4);
  Rng rng(4);
  StateVector s{1, -1};
  int up = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    sample_latent_states(s, t, p, psi, g, rng);
    up += s[1] == 1;
  }
  EXPECT_NEAR(static_cast<double>(up) / n, expected, 0.005);
}

TEST(HomogeneousAlpha, ConjugateMean) {
  StateVector s{1, 1, 1, 1, -1, 1};
  std::vector<std::uint8_t> t{1, 1, 0, 0, 0, 1};
  const PriorConfig prior;
  Rng rng(6);
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) sum += sample_homogeneous_alpha(s, t, prior, rng);
  // Beta(1.2 + 3, 0.8 + 2)
  EXPECT_NEAR(sum / n, 4.2 / 7.0, 0.003);
}

TEST(HomogeneousAlpha, ReportOnNegativeNodeThrows) {
  StateVector s{-1, 1};
  std::vector<std::uint8_t> t{1, 0};
  Rng rng(1);
  EXPECT_THROW(sample_homogeneous_alpha(s, t, PriorConfig{}, rng), InputError);
}

CovariateTable one_feature_table(std::size_t n, Rng& rng) {
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) raw(static_cast<Eigen::Index>(i), 0) = standard_normal(rng);
  return standardize_covariates(raw, {"x"}, {"x"});
}

TEST(LogisticKernel, ModeZeroesGradient) {
  Rng rng(12);
  const auto cov = one_feature_table(40, rng);
  Eigen::MatrixXd design(40, 2);
  design.col(0).setOnes();
  design.col(1) = cov.values.col(0);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y(i) = uniform01(rng) < logistic(0.5 + design(i, 1)) ? 1.0 : 0.0;
  LogisticPosterior post(design, y, Eigen::Vector2d(0, 0), Eigen::Vector2d(1.0, 0.5));
  const auto mode = post.mode(Eigen::Vector2d::Zero());
  EXPECT_LT(post.gradient(mode).norm(), 1e-8);
  // Finite-difference check of the gradient away from the mode.
  const Eigen::Vector2d b(0.3, -0.2);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e(k) = h;
    EXPECT_NEAR((post.log_density(b + e) - post.log_density(b - e)) / (2 * h), post.gradient(b)(k), 1e-5);
  }
}

TEST(LogisticKernel, KernelTargetsPosterior) {
  const std::size_t n = 30;
  Rng rng(21);
  const auto cov = one_feature_table(n, rng);
  StateVector s(n, 1);
  s[0] = s[1] = -1;
  std::vector<std::uint8_t> t(n, 0);
  for (std::size_t i = 2; i < n; ++i) t[i] = uniform01(rng) < logistic(0.3 - 0.8 * cov.values(i, 0));
  const PriorConfig prior;

  // Quadrature oracle over (alpha0, alpha1).
  double z = 0.0, m0 = 0.0, m1 = 0.0;
  const int grid = 400;
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      const double x0 = -4.0 + 8.0 * (a + 0.5) / grid, x1 = -4.0 + 8.0 * (b + 0.5) / grid;
      double lp = -0.5 * x0 * x0 - 0.5 * (x1 / 0.5) * (x1 / 0.5);
      for (std::size_t i = 2; i < n; ++i) {
        const double eta = x0 + x1 * cov.values(static_cast<Eigen::Index>(i), 0);
        lp += t[i] ? log_logistic(eta) : log_logistic(-eta);
      }
      const double w = std::exp(lp);
      z += w;
      m0 += w * x0;
      m1 += w * x1;
    }
  }
  m0 /= z;
  m1 /= z;

  Eigen::VectorXd cur = Eigen::Vector2d::Zero();
  double s0 = 0.0, s1 = 0.0;
  const int draws = 40000;
  LogisticKernelStats stats;
  for (int k = 0; k < draws; ++k) {
    cur = sample_heterogeneous_alphas(s, t, cov, cur, prior, 1, rng, &stats);
    s0 += cur(0);
    s1 += cur(1);
  }
  EXPECT_NEAR(s0 / draws, m0, 0.02);
  EXPECT_NEAR(s1 / draws, m1, 0.02);
  EXPECT_GT(static_cast<double>(stats.accepts) / static_cast<double>(stats.proposals), 0.5);
}

TEST(LogisticKernel, NoPositiveNodeDrawsFromPrior) {
  Rng rng(3);
  const auto cov = one_feature_table(10, rng);
  StateVector s(10, -1);
  std::vector<std::uint8_t> t(10, 0);
  LogisticKernelStats stats;
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto d = sample_heterogeneous_alphas(s, t, cov, Eigen::Vector2d::Zero(), PriorConfig{}, 5, rng, &stats);
    sum += d(1);
    sq += d(1) * d(1);
  }
  EXPECT_EQ(stats.prior_draws, static_cast<std::size_t>(n));
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(std::sqrt(sq / n), 0.5, 0.02);
}

struct SmallFit {
  SpatialGraph graph = grid_graph(5, 5);
  std::vector<std::uint8_t> reports;
  CovariateTable covariates;
  SmallFit() {
    Rng rng(99);
    reports.assign(graph.size(), 0);
    for (std::size_t i : {0u, 1u, 6u, 12u, 18u, 24u}) reports[i] = 1;
    covariates = one_feature_table(graph.size(), rng);
  }
  FitInput input() const { return {&graph, reports, &covariates}; }
};

MCMCConfig short_config() {
  MCMCConfig c;
  c.chains = 2;
  c.total_iterations = 600;
  c.burn_in = 200;
  c.sw_burnin = 10;
  c.inner_logistic_steps = 5;
  c.seed = 5;
  return c;
}

TEST(Chain, ClampInvariantAndRetention) {
  const SmallFit f;
  for (auto mode : {ReportingMode::Homogeneous, ReportingMode::Heterogeneous}) {
    const auto chain = run_chain(f.input(), {mode, {}}, short_config(), 17);
    EXPECT_EQ(chain.retained, 200u);
    EXPECT_EQ(chain.theta0.size(), 200u);
    EXPECT_EQ(chain.clamp_violations, 0u);
    EXPECT_EQ(chain.support_violations, 0u);
    for (std::size_t s = 0; s < chain.retained; ++s) {
      for (std::size_t i = 0; i < f.graph.size(); ++i) {
        if (f.reports[i]) EXPECT_TRUE(chain.latent_positive(s, i));
      }
    }
  }
}

TEST(Chain, AdaptationOnlyDuringBurnIn) {
  const SmallFit f;
  auto c = short_config();
  c.proposal_step = 5.0;
  const auto chain = run_chain(f.input(), {ReportingMode::Homogeneous, {}}, c, 1);
  ASSERT_EQ(chain.adaptation.size(), c.burn_in / c.adapt_interval);
  for (const auto& e : chain.adaptation) EXPECT_LE(e.iteration, c.burn_in);
  EXPECT_LT(chain.adaptation.front().step_after, 5.0);
  EXPECT_EQ(chain.final_step, chain.adaptation.back().step_after);
}

TEST(Chain, SeedDeterminism) {
  const SmallFit f;
  const auto c = short_config();
  const auto a = fit_model(f.input(), {ReportingMode::Heterogeneous, {}}, c);
  auto c2 = c;
  c2.threads = 2;
  const auto b = fit_model(f.input(), {ReportingMode::Heterogeneous, {}}, c2);
  ASSERT_EQ(a.chains.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a.chains[k].theta0, b.chains[k].theta0);
    EXPECT_EQ(a.chains[k].reporting, b.chains[k].reporting);
    EXPECT_EQ(a.chains[k].latent_bits, b.chains[k].latent_bits);
  }
  EXPECT_NE(a.chains[0].theta0, a.chains[1].theta0);
}

TEST(Chain, SummaryShapes) {
  const SmallFit f;
  const auto post = fit_model(f.input(), {ReportingMode::Heterogeneous, {}}, short_config());
  EXPECT_EQ(post.parameter_names(), (std::vector<std::string>{"theta0", "theta1", "alpha0", "alpha_x"}));
  const auto sum = summarize(post);
  EXPECT_TRUE(sum.rhat_available);
  ASSERT_EQ(sum.event_probability.size(), f.graph.size());
  for (std::size_t i = 0; i < f.graph.size(); ++i) {
    if (f.reports[i]) EXPECT_EQ(sum.event_probability[i], 1.0);
    EXPECT_LE(sum.report_probability[i], sum.event_probability[i] + 1e-12);
  }
  for (const auto& p : sum.parameters) EXPECT_LE(p.lo95, p.hi95);
  EXPECT_EQ(sum.clamp_violations, 0u);
}

// Exact posterior of (theta0, theta1, alpha) on a 3x3 grid: the latent state
// is summed out and Z computed by enumerating all 512 states, grouped by
// (sum of spins, edge agreement, unreported positives).
struct ExactHomogeneous {
  struct Cell {
    long long s, p;
    int free_pos;
    double count;
  };
  std::vector<Cell> all, valid;
  int reported = 0;
  PriorConfig prior;

  ExactHomogeneous(const SpatialGraph& g, const std::vector<std::uint8_t>& reports, const PriorConfig& pr)
      : prior(pr) {
    const std::size_t n = g.size();
    for (auto r : reports) reported += r;
    std::map<std::tuple<long long, long long, int>, double> za, va;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      long long s = 0, p = 0;
      int free_pos = 0;
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        const int ai = (bits >> i) & 1 ? 1 : -1;
        s += ai;
        if (reports[i] && ai < 0) ok = false;
        if (!reports[i] && ai > 0) ++free_pos;
        for (auto j : g.neighbors(i)) {
          if (j > i) p += ai * (((bits >> j) & 1) ? 1 : -1);
        }
      }
      za[{s, p, 0}] += 1.0;
      if (ok) va[{s, p, free_pos}] += 1.0;
    }
    for (const auto& [k, c] : za) all.push_back({std::get<0>(k), std::get<1>(k), 0, c});
    for (const auto& [k, c] : va) valid.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), c});
  }

  double log_posterior(double t0, double t1, double a) const {
    if (t1 < 0.0 || a <= 0.0 || a >= 1.0) return -std::numeric_limits<double>::infinity();
    auto lse = [](const std::vector<double>& v) {
      const double m = *std::max_element(v.begin(), v.end());
      double acc = 0.0;
      for (double x : v) acc += std::exp(x - m);
      return m + std::log(acc);
    };
    std::vector<double> z, l;
    for (const auto& c : all) z.push_back(std::log(c.count) + t0 * c.s + t1 * c.p);
    for (const auto& c : valid) l.push_back(std::log(c.count) + t0 * c.s + t1 * c.p + c.free_pos * std::log1p(-a));
    const auto sq = [](double x) { return x * x; };
    return lse(l) - lse(z) + reported * std::log(a) - 0.5 * sq(t0 / prior.sd(prior.theta0)) -
           0.5 * sq((t1 - prior.theta1.mean) / prior.sd(prior.theta1)) +
           (prior.homogeneous_alpha.a - 1.0) * std::log(a) + (prior.homogeneous_alpha.b - 1.0) * std::log1p(-a);
  }
};

TEST(Chain, FullPosteriorMatchesExactSamplerOnSmallGrid) {
  const auto g = grid_graph(3, 3);
  const std::vector<std::uint8_t> reports{1, 1, 0, 0, 1, 0, 0, 0, 0};
  PriorConfig prior;
  prior.theta1 = {0.1, 0.3};  // wide enough that the data move theta1
  const ExactHomogeneous exact(g, reports, prior);

  // Random-walk Metropolis on the exact posterior.
  Rng rng(99);
  double t0 = 0.0, t1 = 0.1, a = 0.5, lp = exact.log_posterior(t0, t1, a);
  std::vector<double> x0, x1, xa;
  for (int it = 0; it < 420000; ++it) {
    const double n0 = t0 + 0.35 * standard_normal(rng), n1 = t1 + 0.2 * standard_normal(rng), na = a + 0.25 * standard_normal(rng);
    const double nl = exact.log_posterior(n0, n1, na);
    if (std::log(uniform01(rng)) < nl - lp) {
      t0 = n0, t1 = n1, a = na, lp = nl;
    }
    if (it >= 20000) {
      x0.push_back(t0);
      x1.push_back(t1);
      xa.push_back(a);
    }
  }

  MCMCConfig c;
  c.chains = 4;
  c.total_iterations = 40000;
  c.burn_in = 5000;
  c.seed = 123;
  c.store_latent = false;
  const auto post = fit_model({&g, reports, nullptr}, {ReportingMode::Homogeneous, prior}, c);
  const std::vector<std::vector<double>*> oracle{&x0, &x1, &xa};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto d = post.pooled_draws(k);
    EXPECT_NEAR(mean(d), mean(*oracle[k]), 0.1) << post.parameter_names()[k];
    EXPECT_NEAR(quantile(d, 0.025), quantile(*oracle[k], 0.025), 0.15) << post.parameter_names()[k];
    EXPECT_NEAR(quantile(d, 0.975), quantile(*oracle[k], 0.975), 0.15) << post.parameter_names()[k];
  }
}

TEST(Chain, HeterogeneousNeedsCovariates) {
  const SmallFit f;
  FitInput in{&f.graph, f.reports, nullptr};
  EXPECT_THROW(run_chain(in, {ReportingMode::Heterogeneous, {}}, short_config(), 1), InputError);
}

TEST(Diagnostics, Quantiles) {
  const std::vector<double> v{4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.1), 1.4);
  const auto ci = central_interval(v, 0.5);
  EXPECT_DOUBLE_EQ(ci.lo, 2.0);
  EXPECT_DOUBLE_EQ(ci.hi, 4.0);
}

TEST(Diagnostics, RhatConstantAndSeparated) {
  EXPECT_EQ(split_rhat({{1, 1, 1, 1}, {1, 1, 1, 1}}), 1.0);
  EXPECT_TRUE(std::isnan(split_rhat({{1, 2, 3, 4}})));
  Rng rng(1);
  std::vector<std::vector<double>> mixed(3), split(3);
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 2000; ++k) {
      const double z = standard_normal(rng);
      mixed[c].push_back(z);
      split[c].push_back(z + 3.0 * c);
    }
  }
  EXPECT_LT(split_rhat(mixed), 1.01);
  EXPECT_GT(split_rhat(split), 1.5);
}

TEST(Diagnostics, Correlation) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1};
  EXPECT_NEAR(pearson_correlation(x, y), 1.0, 1e-15);
  EXPECT_NEAR(pearson_correlation(x, z), -1.0, 1e-15);
}

}  // namespace
}  // namespace spu
