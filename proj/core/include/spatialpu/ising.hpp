#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spatialpu/random.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu {

// Latent event state per node: +1 (event occurred) or -1.
using Spin = std::int8_t;
using StateVector = std::vector<Spin>;

struct IsingParams {
  double theta0 = 0.0;  // incidence-rate location
  double theta1 = 0.0;  // spatial correlation strength, >= 0
};

// Sufficient statistics of a state: sum of spins and the sum of A_i A_j
// over unordered edges. The unnormalized log density is linear in them.
struct IsingStats {
  long long magnetization = 0;
  long long edge_agreement = 0;
};

IsingStats ising_stats(std::span<const Spin> state, const SpatialGraph& graph);

inline double log_density_from_stats(const IsingStats& s, const IsingParams& p) noexcept {
  return p.theta0 * static_cast<double>(s.magnetization) +
         p.theta1 * static_cast<double>(s.edge_agreement);
}

// theta0 * sum_i A_i + theta1 * sum over unordered edges A_i A_j.
double unnormalized_log_density(std::span<const Spin> state, const IsingParams& params,
                                const SpatialGraph& graph);

constexpr std::size_t kMaxEnumerationNodes = 20;

// log Z by full enumeration of the 2^N states (log-sum-exp). N <= 20.
double log_partition_bruteforce(const IsingParams& params, const SpatialGraph& graph);

// Exact Pr(A_i = +1) for every node by enumeration. N <= 20.
std::vector<double> exact_marginals(const IsingParams& params, const SpatialGraph& graph);

// Pr(A_i = +1 | all other nodes) = logistic(2 (theta0 + theta1 * sum_j A_j)).
double besag_conditional(std::size_t i, std::span<const Spin> state, const IsingParams& params,
                         const SpatialGraph& graph);

// Neighbour spin sum, the only state-dependent part of the conditional.
inline int neighbor_sum(std::size_t i, std::span<const Spin> state, const SpatialGraph& graph) noexcept {
  int s = 0;
  for (auto j : graph.neighbors(i)) s += state[j];
  return s;
}

// Uniform ±1 per node.
StateVector random_state(std::size_t n, Rng& rng);

void validate_state(std::span<const Spin> state, const SpatialGraph& graph);

// Swendsen-Wang cluster sampler with an external field. Each sweep
// activates bonds between equal-spin neighbours with probability
// 1 - exp(-2 theta1), labels the bond clusters, and sets each cluster of
// size s to +1 with probability logistic(2 theta0 s). Reusable scratch
// space makes repeated sweeps allocation-free.
class SwendsenWang {
 public:
  explicit SwendsenWang(const SpatialGraph& graph);

  // Performs `sweeps` cluster updates in place.
  void sweep(StateVector& state, const IsingParams& params, std::size_t sweeps, Rng& rng);

 private:
  std::uint32_t find(std::uint32_t x) noexcept;

  const SpatialGraph* graph_;
  std::vector<std::uint32_t> edge_u_, edge_v_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> cluster_size_;
  std::vector<Spin> cluster_spin_;
  std::vector<std::uint64_t> up_threshold_;
  std::vector<std::uint8_t> up_known_;
};

// Functional form of the sampler: copies `init`, runs `sweeps` sweeps.
StateVector swendsen_wang_sample(const IsingParams& params, const SpatialGraph& graph,
                                 const StateVector& init, std::size_t sweeps, Rng& rng);

// Monte-Carlo mean over `samples` draws of the fraction of +1 nodes. Draws
// are taken after `burn_in` sweeps from a random state, one sweep apart.
double expected_positive_fraction(const IsingParams& params, const SpatialGraph& graph,
                                  std::size_t samples, Rng& rng, std::size_t burn_in = 500);

}  // namespace spu
