#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatialpu/covariates.hpp"
#include "spatialpu/ising.hpp"
#include "spatialpu/logistic_kernel.hpp"
#include "spatialpu/observation.hpp"
#include "spatialpu/priors.hpp"
#include "spatialpu/random.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu {

struct MCMCConfig {
  std::size_t chains = 3;
  std::size_t total_iterations = 60'000;
  std::size_t burn_in = 20'000;
  double thin_keep_fraction = 0.5;
  std::size_t sw_burnin = 50;
  double proposal_step = 0.2;
  std::size_t adapt_interval = 50;
  double accept_low = 0.25;
  double accept_high = 0.60;
  double adapt_factor = 0.15;
  std::size_t inner_logistic_steps = 50;
  std::uint64_t seed = 0;
  bool store_latent = true;   // keep per-sample A bitsets
  std::size_t threads = 1;    // chains run concurrently when > 1

  // Throws InputError on: zero iterations, burn_in >= total_iterations,
  // keep fraction outside (0, 1], unordered acceptance band, non-positive
  // step or adaptation interval.
  void validate() const;

  // Every thin_stride()-th post-burn-in iteration is retained.
  std::size_t thin_stride() const;
  std::size_t retained_per_chain() const;
};

struct ModelSpec {
  ReportingMode mode = ReportingMode::Heterogeneous;
  PriorConfig prior;
};

// Read-only inputs of a fit. `reports` are the training reports;
// `covariates` is required in heterogeneous mode.
struct FitInput {
  const SpatialGraph* graph = nullptr;
  std::span<const std::uint8_t> reports;
  const CovariateTable* covariates = nullptr;
};

// ---- single updates --------------------------------------------------------

// Log acceptance ratio of the exchange move theta -> proposal given the
// sufficient statistics of the current state A and the auxiliary draw w.
// The partition functions cancel; returns -inf when proposal.theta1 < 0.
double svea_log_acceptance(const IsingStats& state, const IsingStats& auxiliary, const IsingParams& current,
                           const IsingParams& proposal, const PriorConfig& prior);

struct SveaResult {
  IsingParams params;
  bool accepted = false;
};

// Single-variable exchange update of (theta0, theta1). Reuses the
// Swendsen-Wang scratch space across calls.
class SveaUpdater {
 public:
  SveaUpdater(const SpatialGraph& graph, std::size_t sw_burnin);

  // Joint normal random-walk proposal with standard deviation `step` per
  // component; the auxiliary state starts at A and runs sw_burnin sweeps at
  // the proposed parameters.
  SveaResult update(const IsingParams& current, std::span<const Spin> state, const PriorConfig& prior, double step,
                    Rng& rng);

 private:
  const SpatialGraph* graph_;
  std::size_t sw_burnin_;
  SwendsenWang sampler_;
  StateVector auxiliary_;
};

SveaResult svea_update(const IsingParams& current, std::span<const Spin> state, const SpatialGraph& graph,
                       const PriorConfig& prior, double step, std::size_t sw_burnin, Rng& rng);

// Pr(A_i = +1 | rest) for an unreported node: p (1 - psi) / (p (1 - psi) + 1 - p).
double latent_conditional(double besag_p, double psi);

// One systematic-scan sweep in node order; reported nodes are set to +1.
void sample_latent_states(StateVector& state, std::span<const std::uint8_t> reports, const IsingParams& params,
                          std::span<const double> psi, const SpatialGraph& graph, Rng& rng);

// Conjugate Beta update: Beta(a + #{A=+1,T=1}, b + #{A=+1,T=0}). Throws
// InputError when a report sits on a node with A = -1.
double sample_homogeneous_alpha(std::span<const Spin> state, std::span<const std::uint8_t> reports,
                                const PriorConfig& prior, Rng& rng);

// ---- chains ----------------------------------------------------------------

struct AdaptationEvent {
  std::size_t iteration = 0;  // 1-based iteration count at which it ran
  double acceptance_rate = 0.0;
  double step_before = 0.0;
  double step_after = 0.0;
};

struct ChainSamples {
  std::uint64_t seed = 0;
  std::vector<double> theta0;
  std::vector<double> theta1;
  // Row per retained sample; columns follow PosteriorSamples::reporting_names.
  std::vector<std::vector<double>> reporting;

  // Per-sample A as bitsets (bit i set <=> A_i = +1), when stored.
  std::size_t words_per_sample = 0;
  std::vector<std::uint64_t> latent_bits;

  // Running sums over retained samples, per node.
  std::vector<double> positive_count;  // sum of [A_i = +1]
  std::vector<double> psi_sum;         // sum of psi_i
  std::vector<double> report_prob_sum; // sum of [A_i = +1] psi_i
  std::size_t retained = 0;

  std::vector<AdaptationEvent> adaptation;
  double final_step = 0.0;
  std::size_t svea_proposals_burnin = 0, svea_accepts_burnin = 0;
  std::size_t svea_proposals_sampling = 0, svea_accepts_sampling = 0;
  LogisticKernelStats logistic;
  // Retained samples in which some reported node had A_i = -1. Always 0.
  std::size_t clamp_violations = 0;
  // Retained samples with theta1 < 0 or homogeneous alpha outside (0, 1).
  std::size_t support_violations = 0;

  bool latent_positive(std::size_t sample, std::size_t node) const {
    return (latent_bits[sample * words_per_sample + node / 64] >> (node % 64)) & 1ULL;
  }
};

struct PosteriorSamples {
  ModelSpec spec;
  MCMCConfig config;
  std::vector<std::string> reporting_names;  // "alpha" or "alpha0", "alpha_<feature>"...
  std::vector<ChainSamples> chains;

  std::vector<std::string> parameter_names() const;  // theta0, theta1, then reporting names
  std::vector<double> draws(std::size_t chain, std::size_t parameter) const;
  std::vector<double> pooled_draws(std::size_t parameter) const;
};

std::vector<std::string> reporting_parameter_names(ReportingMode mode, const CovariateTable* covariates);

// One chain: priors-initialised parameters, uniform random A clamped to +1
// at reported nodes, then repeated [SVEA -> latent sweep -> reporting
// update]. The proposal step adapts only during burn-in.
ChainSamples run_chain(const FitInput& input, const ModelSpec& spec, const MCMCConfig& config,
                       std::uint64_t chain_seed);

// config.chains chains with seeds mix_seed(config.seed, c).
PosteriorSamples fit_model(const FitInput& input, const ModelSpec& spec, const MCMCConfig& config);

// ---- summaries -------------------------------------------------------------

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  double rhat = 0.0;  // NaN without >= 2 chains
};

struct PosteriorSummary {
  std::vector<ParameterSummary> parameters;
  bool rhat_available = false;
  double max_rhat = 0.0;
  std::vector<double> event_probability;   // Pr(A_i = +1)
  std::vector<double> mean_psi;            // posterior mean psi_i
  std::vector<double> report_probability;  // posterior mean of [A_i = +1] psi_i
  std::vector<double> svea_acceptance;     // per chain, post burn-in
  std::size_t clamp_violations = 0;
};

PosteriorSummary summarize(const PosteriorSamples& samples);

}  // namespace spu
