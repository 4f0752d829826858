#include "spatialpu/ising.hpp"

#include <cmath>
#include <limits>

#include "spatialpu/error.hpp"

namespace spu {

IsingStats ising_stats(std::span<const Spin> state, const SpatialGraph& graph) {
  IsingStats s;
  for (auto a : state) s.magnetization += a;
  for (const auto& e : graph.edges()) s.edge_agreement += state[e.u] * state[e.v];
  return s;
}

void validate_state(std::span<const Spin> state, const SpatialGraph& graph) {
  if (state.size() != graph.size()) {
    throw InputError("state length " + std::to_string(state.size()) + " does not match graph size " +
                     std::to_string(graph.size()));
  }
  for (auto a : state) {
    if (a != 1 && a != -1) throw InputError("state entries must be +1 or -1");
  }
}

double unnormalized_log_density(std::span<const Spin> state, const IsingParams& params,
                                const SpatialGraph& graph) {
  validate_state(state, graph);
  return log_density_from_stats(ising_stats(state, graph), params);
}

namespace {

void check_enumerable(const SpatialGraph& graph) {
  if (graph.size() > kMaxEnumerationNodes) {
    throw InputError("enumeration limited to " + std::to_string(kMaxEnumerationNodes) + " nodes, graph has " +
                     std::to_string(graph.size()));
  }
}

// Calls fn(state, log_weight) for every configuration.
template <typename Fn>
void enumerate_states(const IsingParams& params, const SpatialGraph& graph, Fn fn) {
  const std::size_t n = graph.size();
  StateVector state(n);
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < n; ++i) state[i] = (mask >> i) & 1 ? 1 : -1;
    fn(state, log_density_from_stats(ising_stats(state, graph), params));
  }
}

}  // namespace

double log_partition_bruteforce(const IsingParams& params, const SpatialGraph& graph) {
  check_enumerable(graph);
  // Streaming log-sum-exp.
  double max = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  enumerate_states(params, graph, [&](const StateVector&, double lw) {
    if (lw <= max) {
      acc += std::exp(lw - max);
    } else {
      acc = acc * std::exp(max - lw) + 1.0;
      max = lw;
    }
  });
  return max + std::log(acc);
}

std::vector<double> exact_marginals(const IsingParams& params, const SpatialGraph& graph) {
  check_enumerable(graph);
  const double log_z = log_partition_bruteforce(params, graph);
  std::vector<double> marg(graph.size(), 0.0);
  enumerate_states(params, graph, [&](const StateVector& s, double lw) {
    const double p = std::exp(lw - log_z);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 1) marg[i] += p;
    }
  });
  return marg;
}

double besag_conditional(std::size_t i, std::span<const Spin> state, const IsingParams& params,
                         const SpatialGraph& graph) {
  if (i >= graph.size()) throw InputError("node index out of range");
  const int nb = neighbor_sum(i, state, graph);
  return logistic(2.0 * (params.theta0 + params.theta1 * nb));
}

StateVector random_state(std::size_t n, Rng& rng) {
  StateVector s(n);
  for (auto& a : s) a = (rng() >> 63) ? 1 : -1;
  return s;
}

SwendsenWang::SwendsenWang(const SpatialGraph& graph)
    : graph_(&graph),
      parent_(graph.size()),
      cluster_size_(graph.size()),
      cluster_spin_(graph.size()) {
  edge_u_.reserve(graph.edge_count());
  edge_v_.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) {
    edge_u_.push_back(e.u);
    edge_v_.push_back(e.v);
  }
}

std::uint32_t SwendsenWang::find(std::uint32_t x) noexcept {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void SwendsenWang::sweep(StateVector& state, const IsingParams& params, std::size_t sweeps, Rng& rng) {
  if (params.theta1 < 0.0) throw InputError("Swendsen-Wang requires theta1 >= 0");
  if (state.size() != graph_->size()) throw InputError("state length does not match graph size");
  const std::size_t n = state.size();
  const double p_bond = -std::expm1(-2.0 * params.theta1);
  // Bond when a raw 64-bit draw falls below p_bond * 2^64.
  const std::uint64_t bond_threshold =
      p_bond >= 1.0 ? std::numeric_limits<std::uint64_t>::max()
                    : static_cast<std::uint64_t>(std::ldexp(p_bond, 64));
  const bool bonds = bond_threshold > 0;

  // Up-probability of a cluster of size s, as a threshold on a raw draw,
  // filled on first use.
  up_threshold_.assign(n + 1, 0);
  up_known_.assign(n + 1, 0);
  const auto threshold = [&](std::uint32_t size) {
    if (!up_known_[size]) {
      const double p = logistic(2.0 * params.theta0 * static_cast<double>(size));
      up_threshold_[size] = p >= 1.0 ? std::numeric_limits<std::uint64_t>::max()
                                     : static_cast<std::uint64_t>(std::ldexp(p, 64));
      up_known_[size] = 1;
    }
    return up_threshold_[size];
  };

  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::uint32_t i = 0; i < n; ++i) {
      parent_[i] = i;
      cluster_size_[i] = 0;
    }
    if (bonds) {
      const std::size_t m = edge_u_.size();
      for (std::size_t k = 0; k < m; ++k) {
        const auto u = edge_u_[k], v = edge_v_[k];
        if (state[u] != state[v]) continue;
        if (rng() >= bond_threshold) continue;
        auto ru = find(u), rv = find(v);
        if (ru == rv) continue;
        if (ru > rv) std::swap(ru, rv);
        parent_[rv] = ru;
      }
    }
    for (std::uint32_t i = 0; i < n; ++i) ++cluster_size_[find(i)];
    // Roots are visited in index order, so the draw sequence is determined
    // by the cluster structure alone.
    for (std::uint32_t i = 0; i < n; ++i) {
      if (parent_[i] != i) continue;
      cluster_spin_[i] = rng() < threshold(cluster_size_[i]) ? 1 : -1;
    }
    for (std::uint32_t i = 0; i < n; ++i) state[i] = cluster_spin_[find(i)];
  }
}

StateVector swendsen_wang_sample(const IsingParams& params, const SpatialGraph& graph,
                                 const StateVector& init, std::size_t sweeps, Rng& rng) {
  if (params.theta1 < 0.0) throw InputError("Swendsen-Wang requires theta1 >= 0");
  if (sweeps < 1) throw InputError("Swendsen-Wang needs at least one sweep");
  validate_state(init, graph);
  StateVector state = init;
  SwendsenWang sampler(graph);
  sampler.sweep(state, params, sweeps, rng);
  return state;
}

double expected_positive_fraction(const IsingParams& params, const SpatialGraph& graph,
                                  std::size_t samples, Rng& rng, std::size_t burn_in) {
  if (samples < 1) throw InputError("expected_positive_fraction needs at least one sample");
  if (graph.size() == 0) throw InputError("empty graph");
  SwendsenWang sampler(graph);
  StateVector state = random_state(graph.size(), rng);
  if (burn_in > 0) sampler.sweep(state, params, burn_in, rng);
  double total = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    sampler.sweep(state, params, 1, rng);
    std::size_t up = 0;
    for (auto a : state) up += a == 1;
    total += static_cast<double>(up) / static_cast<double>(graph.size());
  }
  return total / static_cast<double>(samples);
}

}  // namespace spu
