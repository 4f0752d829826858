#include "spatialpu/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "spatialpu/diagnostics.hpp"
#include "spatialpu/error.hpp"

namespace spu {

void MCMCConfig::validate() const {
  if (chains < 1) throw InputError("at least one chain is required", "chains");
  if (total_iterations < 1) throw InputError("total_iterations must be positive", "total_iterations");
  if (burn_in >= total_iterations) throw InputError("burn_in must be smaller than total_iterations", "burn_in");
  if (!(thin_keep_fraction > 0.0 && thin_keep_fraction <= 1.0)) {
    throw InputError("thin_keep_fraction must lie in (0, 1]", "thin_keep_fraction");
  }
  if (!(accept_low < accept_high) || accept_low < 0.0 || accept_high > 1.0) {
    throw InputError("acceptance band must satisfy 0 <= low < high <= 1", "accept_band");
  }
  if (!(proposal_step > 0.0)) throw InputError("proposal_step must be positive", "proposal_step");
  if (adapt_interval < 1) throw InputError("adapt_interval must be positive", "adapt_interval");
  if (!(adapt_factor > 0.0 && adapt_factor < 1.0)) throw InputError("adapt_factor must lie in (0, 1)", "adapt_factor");
  if (sw_burnin < 1) throw InputError("sw_burnin must be positive", "sw_burnin");
}

std::size_t MCMCConfig::thin_stride() const {
  return static_cast<std::size_t>(std::ceil(1.0 / thin_keep_fraction - 1e-12));
}

std::size_t MCMCConfig::retained_per_chain() const {
  const std::size_t post = total_iterations - burn_in;
  return (post + thin_stride() - 1) / thin_stride();
}

// ---- single updates --------------------------------------------------------

double svea_log_acceptance(const IsingStats& state, const IsingStats& auxiliary, const IsingParams& current,
                           const IsingParams& proposal, const PriorConfig& prior) {
  if (proposal.theta1 < 0.0) return -std::numeric_limits<double>::infinity();
  const double d0 = proposal.theta0 - current.theta0;
  const double d1 = proposal.theta1 - current.theta1;
  // f(A; θ') - f(A; θ) + f(w; θ) - f(w; θ'), linear in the statistics.
  const double likelihood = d0 * static_cast<double>(state.magnetization - auxiliary.magnetization) +
                            d1 * static_cast<double>(state.edge_agreement - auxiliary.edge_agreement);
  return likelihood + prior.log_prior_theta(proposal) - prior.log_prior_theta(current);
}

SveaUpdater::SveaUpdater(const SpatialGraph& graph, std::size_t sw_burnin)
    : graph_(&graph), sw_burnin_(sw_burnin), sampler_(graph), auxiliary_(graph.size()) {}

SveaResult SveaUpdater::update(const IsingParams& current, std::span<const Spin> state, const PriorConfig& prior,
                               double step, Rng& rng) {
  IsingParams proposal{current.theta0 + step * standard_normal(rng), current.theta1 + step * standard_normal(rng)};
  if (proposal.theta1 < 0.0) return {current, false};
  auxiliary_.assign(state.begin(), state.end());
  sampler_.sweep(auxiliary_, proposal, sw_burnin_, rng);
  const double log_ratio =
      svea_log_acceptance(ising_stats(state, *graph_), ising_stats(auxiliary_, *graph_), current, proposal, prior);
  if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) return {proposal, true};
  return {current, false};
}

SveaResult svea_update(const IsingParams& current, std::span<const Spin> state, const SpatialGraph& graph,
                       const PriorConfig& prior, double step, std::size_t sw_burnin, Rng& rng) {
  validate_state(state, graph);
  SveaUpdater updater(graph, sw_burnin);
  return updater.update(current, state, prior, step, rng);
}

double latent_conditional(double besag_p, double psi) {
  const double num = besag_p * (1.0 - psi);
  const double den = num + (1.0 - besag_p);
  return den > 0.0 ? num / den : 0.0;
}

void sample_latent_states(StateVector& state, std::span<const std::uint8_t> reports, const IsingParams& params,
                          std::span<const double> psi, const SpatialGraph& graph, Rng& rng) {
  const std::size_t n = graph.size();
  if (state.size() != n || reports.size() != n || psi.size() != n) {
    throw InputError("state, reports and rates must match the graph size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (reports[i]) {
      state[i] = 1;
      continue;
    }
    // logit of the conditional: 2 (theta0 + theta1 * nb) + log(1 - psi).
    const double field = 2.0 * (params.theta0 + params.theta1 * neighbor_sum(i, state, graph));
    const double q = psi[i] >= 1.0 ? 0.0 : logistic(field + std::log1p(-psi[i]));
    state[i] = uniform01(rng) < q ? 1 : -1;
  }
}

double sample_homogeneous_alpha(std::span<const Spin> state, std::span<const std::uint8_t> reports,
                                const PriorConfig& prior, Rng& rng) {
  if (state.size() != reports.size()) throw InputError("state and reports are misaligned");
  double reported = 0.0, silent = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1) {
      (reports[i] ? reported : silent) += 1.0;
    } else if (reports[i]) {
      throw InputError("report at a node whose latent state is -1");
    }
  }
  double a;
  do {
    a = beta_draw(rng, prior.homogeneous_alpha.a + reported, prior.homogeneous_alpha.b + silent);
  } while (!(a > 0.0 && a < 1.0));
  return a;
}

// ---- chains ----------------------------------------------------------------

std::vector<std::string> reporting_parameter_names(ReportingMode mode, const CovariateTable* covariates) {
  if (mode == ReportingMode::Homogeneous) return {"alpha"};
  if (covariates == nullptr) throw InputError("heterogeneous reporting requires covariates");
  std::vector<std::string> names{"alpha0"};
  for (const auto& f : covariates->feature_names) names.push_back("alpha_" + f);
  return names;
}

std::vector<std::string> PosteriorSamples::parameter_names() const {
  std::vector<std::string> names{"theta0", "theta1"};
  names.insert(names.end(), reporting_names.begin(), reporting_names.end());
  return names;
}

std::vector<double> PosteriorSamples::draws(std::size_t chain, std::size_t parameter) const {
  const auto& c = chains.at(chain);
  if (parameter == 0) return c.theta0;
  if (parameter == 1) return c.theta1;
  std::vector<double> out;
  out.reserve(c.reporting.size());
  for (const auto& row : c.reporting) out.push_back(row.at(parameter - 2));
  return out;
}

std::vector<double> PosteriorSamples::pooled_draws(std::size_t parameter) const {
  std::vector<double> out;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto d = draws(c, parameter);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

namespace {

void check_input(const FitInput& input, const ModelSpec& spec) {
  if (input.graph == nullptr) throw InputError("fit input has no graph");
  if (input.reports.size() != input.graph->size()) throw InputError("reports do not match the graph size");
  if (spec.mode == ReportingMode::Heterogeneous) {
    if (input.covariates == nullptr) throw InputError("heterogeneous reporting requires covariates");
    if (input.covariates->rows() != input.graph->size()) throw InputError("covariates do not match the graph size");
  }
}

void fill_psi(std::vector<double>& psi, ReportingMode mode, std::span<const double> reporting,
              const CovariateTable* covariates) {
  if (mode == ReportingMode::Homogeneous) {
    std::fill(psi.begin(), psi.end(), reporting[0]);
    return;
  }
  const auto m = static_cast<Eigen::Index>(covariates->cols());
  const Eigen::Map<const Eigen::VectorXd> coeffs(reporting.data() + 1, m);
  const Eigen::VectorXd eta = (covariates->values * coeffs).array() + reporting[0];
  for (Eigen::Index i = 0; i < eta.size(); ++i) psi[static_cast<std::size_t>(i)] = logistic(eta(i));
}

}  // namespace

ChainSamples run_chain(const FitInput& input, const ModelSpec& spec, const MCMCConfig& config,
                       std::uint64_t chain_seed) {
  config.validate();
  spec.prior.validate();
  check_input(input, spec);
  const SpatialGraph& graph = *input.graph;
  const std::size_t n = graph.size();
  const auto reports = input.reports;
  Rng rng(chain_seed);

  ChainSamples out;
  out.seed = chain_seed;
  out.positive_count.assign(n, 0.0);
  out.psi_sum.assign(n, 0.0);
  out.report_prob_sum.assign(n, 0.0);
  out.words_per_sample = (n + 63) / 64;
  const std::size_t expected = config.retained_per_chain();
  out.theta0.reserve(expected);
  out.theta1.reserve(expected);
  out.reporting.reserve(expected);
  if (config.store_latent) out.latent_bits.reserve(expected * out.words_per_sample);

  // Initialisation from the priors; A uniform then clamped.
  IsingParams theta = spec.prior.sample_theta(rng);
  const std::size_t m = input.covariates ? input.covariates->cols() : 0;
  std::vector<double> reporting;
  {
    const auto init = spec.prior.sample_reporting(spec.mode, m, rng);
    if (spec.mode == ReportingMode::Homogeneous) {
      reporting = {init.alpha()};
    } else {
      reporting.push_back(init.alpha0());
      for (Eigen::Index k = 0; k < init.coeffs().size(); ++k) reporting.push_back(init.coeffs()(k));
    }
  }
  StateVector state = random_state(n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (reports[i]) state[i] = 1;
  }
  std::vector<double> psi(n);
  fill_psi(psi, spec.mode, reporting, input.covariates);

  SveaUpdater svea(graph, config.sw_burnin);
  double step = config.proposal_step;
  std::size_t window_accepts = 0, window_proposals = 0;
  const std::size_t stride = config.thin_stride();
  std::vector<std::size_t> reported_nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (reports[i]) reported_nodes.push_back(i);
  }

  for (std::size_t it = 0; it < config.total_iterations; ++it) {
    const bool burning = it < config.burn_in;

    const auto res = svea.update(theta, state, spec.prior, step, rng);
    theta = res.params;
    if (burning) {
      ++out.svea_proposals_burnin;
      out.svea_accepts_burnin += res.accepted;
      ++window_proposals;
      window_accepts += res.accepted;
      if ((it + 1) % config.adapt_interval == 0) {
        const double rate = static_cast<double>(window_accepts) / static_cast<double>(window_proposals);
        double next = step;
        if (rate < config.accept_low) {
          next = step * (1.0 - config.adapt_factor);
        } else if (rate > config.accept_high) {
          next = step * (1.0 + config.adapt_factor);
        }
        out.adaptation.push_back({it + 1, rate, step, next});
        step = next;
        window_accepts = window_proposals = 0;
      }
    } else {
      ++out.svea_proposals_sampling;
      out.svea_accepts_sampling += res.accepted;
    }

    sample_latent_states(state, reports, theta, psi, graph, rng);

    if (spec.mode == ReportingMode::Homogeneous) {
      reporting[0] = sample_homogeneous_alpha(state, reports, spec.prior, rng);
    } else {
      const Eigen::Map<const Eigen::VectorXd> current(reporting.data(), static_cast<Eigen::Index>(reporting.size()));
      const Eigen::VectorXd next = sample_heterogeneous_alphas(state, reports, *input.covariates, current, spec.prior,
                                                               config.inner_logistic_steps, rng, &out.logistic);
      std::copy(next.data(), next.data() + next.size(), reporting.begin());
    }
    fill_psi(psi, spec.mode, reporting, input.covariates);

    if (burning || (it - config.burn_in) % stride != 0) continue;

    out.theta0.push_back(theta.theta0);
    out.theta1.push_back(theta.theta1);
    out.reporting.push_back(reporting);
    ++out.retained;
    if (theta.theta1 < 0.0 ||
        (spec.mode == ReportingMode::Homogeneous && !(reporting[0] > 0.0 && reporting[0] < 1.0))) {
      ++out.support_violations;
    }
    for (auto i : reported_nodes) {
      if (state[i] != 1) {
        ++out.clamp_violations;
        break;
      }
    }
    const std::size_t base = out.latent_bits.size();
    if (config.store_latent) out.latent_bits.resize(base + out.words_per_sample, 0);
    for (std::size_t i = 0; i < n; ++i) {
      out.psi_sum[i] += psi[i];
      if (state[i] == 1) {
        out.positive_count[i] += 1.0;
        out.report_prob_sum[i] += psi[i];
        if (config.store_latent) out.latent_bits[base + i / 64] |= 1ULL << (i % 64);
      }
    }
  }
  out.final_step = step;
  return out;
}

PosteriorSamples fit_model(const FitInput& input, const ModelSpec& spec, const MCMCConfig& config) {
  config.validate();
  check_input(input, spec);
  PosteriorSamples samples;
  samples.spec = spec;
  samples.config = config;
  samples.reporting_names = reporting_parameter_names(spec.mode, input.covariates);
  samples.chains.resize(config.chains);
  if (config.threads > 1 && config.chains > 1) {
    std::vector<std::future<ChainSamples>> pending;
    for (std::size_t c = 0; c < config.chains; ++c) {
      pending.push_back(std::async(std::launch::async, [&, c] {
        return run_chain(input, spec, config, mix_seed(config.seed, c));
      }));
    }
    for (std::size_t c = 0; c < config.chains; ++c) samples.chains[c] = pending[c].get();
  } else {
    for (std::size_t c = 0; c < config.chains; ++c) {
      samples.chains[c] = run_chain(input, spec, config, mix_seed(config.seed, c));
    }
  }
  return samples;
}

// ---- summaries -------------------------------------------------------------

PosteriorSummary summarize(const PosteriorSamples& samples) {
  if (samples.chains.empty()) throw InputError("no chains to summarize");
  PosteriorSummary out;
  out.rhat_available = samples.chains.size() >= 2;
  out.max_rhat = out.rhat_available ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  const auto names = samples.parameter_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::vector<std::vector<double>> per_chain;
    for (std::size_t c = 0; c < samples.chains.size(); ++c) per_chain.push_back(samples.draws(c, k));
    std::vector<double> pooled = samples.pooled_draws(k);
    if (pooled.empty()) throw InputError("chains retained no samples");
    std::sort(pooled.begin(), pooled.end());
    ParameterSummary s;
    s.name = names[k];
    s.mean = mean(pooled);
    s.median = quantile_sorted(pooled, 0.5);
    s.sd = pooled.size() >= 2 ? sample_sd(pooled) : 0.0;
    s.lo95 = quantile_sorted(pooled, 0.025);
    s.hi95 = quantile_sorted(pooled, 0.975);
    s.rhat = out.rhat_available ? split_rhat(per_chain) : std::numeric_limits<double>::quiet_NaN();
    if (out.rhat_available && std::isfinite(s.rhat)) out.max_rhat = std::max(out.max_rhat, s.rhat);
    out.parameters.push_back(std::move(s));
  }

  const std::size_t n = samples.chains.front().positive_count.size();
  out.event_probability.assign(n, 0.0);
  out.mean_psi.assign(n, 0.0);
  out.report_probability.assign(n, 0.0);
  double total = 0.0;
  for (const auto& c : samples.chains) {
    total += static_cast<double>(c.retained);
    for (std::size_t i = 0; i < n; ++i) {
      out.event_probability[i] += c.positive_count[i];
      out.mean_psi[i] += c.psi_sum[i];
      out.report_probability[i] += c.report_prob_sum[i];
    }
    out.clamp_violations += c.clamp_violations;
    const double proposals = static_cast<double>(c.svea_proposals_sampling);
    out.svea_acceptance.push_back(proposals > 0 ? static_cast<double>(c.svea_accepts_sampling) / proposals : 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.event_probability[i] /= total;
    out.mean_psi[i] /= total;
    out.report_probability[i] /= total;
  }
  return out;
}

}  // namespace spu
