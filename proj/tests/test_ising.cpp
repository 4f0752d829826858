#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "graphs.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/ising.hpp"

namespace spu {
namespace {

using testing::cycle_graph;
using testing::grid_graph;
using testing::path_graph;
using testing::star_graph;

// Independent enumeration: explicit double loop over states and edges.
struct Enumerated {
  double log_z = 0.0;
  std::vector<double> marginal;
};

Enumerated enumerate(const SpatialGraph& g, const IsingParams& p) {
  const std::size_t n = g.size();
  std::vector<double> w(1u << n);
  double total = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += p.theta0 * (((m >> i) & 1) ? 1.0 : -1.0);
    for (const auto& edge : g.edges()) {
      const double a = ((m >> edge.u) & 1) ? 1.0 : -1.0;
      const double b = ((m >> edge.v) & 1) ? 1.0 : -1.0;
      e += p.theta1 * a * b;
    }
    w[m] = std::exp(e);
    total += w[m];
  }
  Enumerated out{std::log(total), std::vector<double>(n, 0.0)};
  for (std::size_t m = 0; m < w.size(); ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((m >> i) & 1) out.marginal[i] += w[m] / total;
    }
  }
  return out;
}

TEST(Ising, TwoNodePartitionFunction) {
  const auto g = path_graph(2);
  const IsingParams p{0.0, 0.1};
  EXPECT_NEAR(log_partition_bruteforce(p, g), std::log(2 * std::exp(0.1) + 2 * std::exp(-0.1)), 1e-12);
}

TEST(Ising, IndependentNodesAtZeroCoupling) {
  const auto g = cycle_graph(5);
  const IsingParams p{0.3, 0.0};
  EXPECT_NEAR(log_partition_bruteforce(p, g), 5.0 * std::log(2.0 * std::cosh(0.3)), 1e-12);
  for (double m : exact_marginals(p, g)) EXPECT_NEAR(m, logistic(0.6), 1e-12);
}

TEST(Ising, EnumerationMatchesIndependentOracle) {
  for (const auto& g : {path_graph(5), cycle_graph(6), star_graph(5), grid_graph(3, 3)}) {
    for (double t0 : {-0.5, 0.0, 0.5}) {
      for (double t1 : {0.0, 0.1, 0.3}) {
        const IsingParams p{t0, t1};
        const auto ref = enumerate(g, p);
        EXPECT_NEAR(log_partition_bruteforce(p, g), ref.log_z, 1e-10);
        const auto m = exact_marginals(p, g);
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(m[i], ref.marginal[i], 1e-12);
      }
    }
  }
}

TEST(Ising, SymmetricMarginalsAtZeroField) {
  const auto m = exact_marginals({0.0, 0.3}, star_graph(5));
  for (double v : m) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(Ising, BesagConditionalMatchesJointRatio) {
  const auto g = grid_graph(3, 3);
  const IsingParams p{0.2, 0.25};
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto s = random_state(g.size(), rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto up = s, down = s;
      up[i] = 1;
      down[i] = -1;
      const double lu = unnormalized_log_density(up, p, g);
      const double ld = unnormalized_log_density(down, p, g);
      EXPECT_NEAR(besag_conditional(i, s, p, g), 1.0 / (1.0 + std::exp(ld - lu)), 1e-12);
    }
  }
}

TEST(Ising, StatsOfUniformState) {
  const auto g = grid_graph(3, 4);
  StateVector all_up(g.size(), 1);
  const auto s = ising_stats(all_up, g);
  EXPECT_EQ(s.magnetization, 12);
  EXPECT_EQ(s.edge_agreement, static_cast<long long>(g.edge_count()));
}

TEST(Ising, RejectsBadStates) {
  const auto g = path_graph(3);
  EXPECT_THROW(unnormalized_log_density(StateVector{1, 1}, {0, 0}, g), InputError);
  EXPECT_THROW(unnormalized_log_density(StateVector{1, 0, 1}, {0, 0}, g), InputError);
  EXPECT_THROW(log_partition_bruteforce({0, 0}, grid_graph(5, 5)), InputError);
}

TEST(SwendsenWang, MarginalsMatchEnumeration) {
  const auto g = cycle_graph(6);
  const IsingParams p{0.3, 0.3};
  const auto exact = exact_marginals(p, g);
  SwendsenWang sw(g);
  Rng rng(17);
  auto s = random_state(g.size(), rng);
  sw.sweep(s, p, 100, rng);
  std::vector<double> count(g.size(), 0.0);
  const int sweeps = 40000;
  for (int k = 0; k < sweeps; ++k) {
    sw.sweep(s, p, 1, rng);
    for (std::size_t i = 0; i < g.size(); ++i) count[i] += s[i] == 1;
  }
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(count[i] / sweeps, exact[i], 0.02);
}

TEST(SwendsenWang, DeterministicGivenSeed) {
  const auto g = grid_graph(4, 4);
  Rng a(3), b(3);
  const StateVector init(g.size(), -1);
  EXPECT_EQ(swendsen_wang_sample({0.1, 0.2}, g, init, 25, a), swendsen_wang_sample({0.1, 0.2}, g, init, 25, b));
}

TEST(SwendsenWang, ZeroCouplingIsIndependent) {
  const auto g = grid_graph(5, 4);
  Rng rng(9);
  const double frac = expected_positive_fraction({-0.4, 0.0}, g, 20000, rng, 10);
  EXPECT_NEAR(frac, logistic(-0.8), 0.01);
}

TEST(SwendsenWang, StateStaysValid) {
  const auto g = grid_graph(6, 6);
  Rng rng(1);
  auto s = random_state(g.size(), rng);
  SwendsenWang sw(g);
  sw.sweep(s, {1.5, 0.8}, 30, rng);
  EXPECT_NO_THROW(validate_state(s, g));
}

}  // namespace
}  // namespace spu
