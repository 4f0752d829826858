#include "spatialpu/synthetic.hpp"

#include <atomic>
#include <limits>
#include <thread>

#include "spatialpu/error.hpp"

namespace spu {

TrialData generate_trial(const SpatialGraph& graph, const CovariateTable* covariates, ReportingMode mode,
                         const PriorConfig& prior, Rng& rng, const GenerateOptions& options) {
  prior.validate();
  if (mode == ReportingMode::Heterogeneous && covariates == nullptr) {
    throw InputError("heterogeneous generation requires covariates");
  }
  TrialData out;
  out.theta = prior.sample_theta(rng);
  const std::size_t m = covariates ? covariates->cols() : 0;
  out.reporting = prior.sample_reporting(mode, m, rng);
  if (options.fixed_feature) {
    if (mode != ReportingMode::Heterogeneous || *options.fixed_feature >= m) {
      throw InputError("fixed feature index is out of range", "fixed_feature");
    }
    Eigen::VectorXd c = out.reporting.coeffs();
    c(static_cast<Eigen::Index>(*options.fixed_feature)) = options.fixed_value;
    out.reporting = ReportingParams::heterogeneous(out.reporting.alpha0(), std::move(c));
  }
  SwendsenWang sampler(graph);
  out.state = random_state(graph.size(), rng);
  sampler.sweep(out.state, out.theta, options.sw_sweeps, rng);
  out.psi = mode == ReportingMode::Heterogeneous ? reporting_rates(out.reporting, *covariates)
                                                  : reporting_rates(out.reporting, graph.size());
  out.reports = simulate_reports(out.state, out.psi, rng);
  return out;
}

std::vector<double> true_parameter_values(const TrialData& trial) {
  std::vector<double> v{trial.theta.theta0, trial.theta.theta1};
  if (trial.reporting.mode() == ReportingMode::Homogeneous) {
    v.push_back(trial.reporting.alpha());
  } else {
    v.push_back(trial.reporting.alpha0());
    for (Eigen::Index k = 0; k < trial.reporting.coeffs().size(); ++k) v.push_back(trial.reporting.coeffs()(k));
  }
  return v;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Homogeneous: return "homogeneous";
    case ModelKind::Heterogeneous: return "heterogeneous";
    case ModelKind::Spatial: return "spatial";
    case ModelKind::GP: return "gp";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::Homogeneous, ModelKind::Heterogeneous, ModelKind::Spatial, ModelKind::GP}) {
    if (text == to_string(k)) return k;
  }
  throw InputError("unknown model '" + std::string(text) + "'", "model");
}

std::string_view to_string(ScoreKind kind) {
  return kind == ScoreKind::EventProbability ? "event-probability" : "report-probability";
}

ScoreKind parse_score_kind(std::string_view text) {
  if (text == "event-probability") return ScoreKind::EventProbability;
  if (text == "report-probability") return ScoreKind::ReportProbability;
  throw InputError("unknown score '" + std::string(text) + "'", "score");
}

std::vector<double> posterior_scores(const PosteriorSummary& summary, ScoreKind kind) {
  return kind == ScoreKind::EventProbability ? summary.event_probability : summary.report_probability;
}

TrialResult run_trial(const SpatialGraph& graph, const CovariateTable& covariates, const ExperimentConfig& config,
                      std::size_t trial) {
  TrialResult out;
  out.trial = trial;
  out.seed = mix_seed(config.seed, trial);
  try {
    Rng rng(mix_seed(out.seed, 0));
    const TrialData data = generate_trial(graph, &covariates, config.generating_mode, config.prior, rng,
                                          config.generate);
    out.truth = true_parameter_values(data);
    out.parameter_names = {"theta0", "theta1"};
    for (const auto& n : reporting_parameter_names(config.generating_mode, &covariates)) {
      out.parameter_names.push_back(n);
    }
    for (std::size_t i = 0; i < graph.size(); ++i) {
      out.reported += data.reports[i];
      out.positive += data.state[i] == 1;
    }
    std::vector<std::uint8_t> labels(graph.size()), eligible(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) {
      labels[i] = data.state[i] == 1;
      eligible[i] = !data.reports[i];
    }

    std::size_t held_out_positive = 0, held_out = 0;
    for (std::size_t i = 0; i < graph.size(); ++i) {
      if (!data.reports[i]) {
        ++held_out;
        held_out_positive += labels[i];
      }
    }
    const bool both_classes = held_out_positive > 0 && held_out_positive < held_out;

    Eigen::MatrixXd equity_attr;
    if (config.equity_k > 0) {
      if (config.equity_feature >= covariates.cols()) throw InputError("equity feature out of range");
      equity_attr = covariates.raw_values.col(static_cast<Eigen::Index>(config.equity_feature));
    }

    for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
      ModelOutcome mo;
      mo.model = config.models[mi];
      switch (mo.model) {
        case ModelKind::Spatial:
          mo.scores = spatial_baseline(data.reports, graph).scores;
          break;
        case ModelKind::GP:
          mo.scores = gp_baseline(data.reports, graph.centroids()).scores;
          break;
        case ModelKind::Homogeneous:
        case ModelKind::Heterogeneous: {
          ModelSpec spec;
          spec.mode = mo.model == ModelKind::Homogeneous ? ReportingMode::Homogeneous : ReportingMode::Heterogeneous;
          spec.prior = config.prior;
          MCMCConfig mc = config.mcmc;
          mc.seed = mix_seed(out.seed, 1 + mi);
          mc.store_latent = false;
          const FitInput input{&graph, data.reports, &covariates};
          const PosteriorSamples samples = fit_model(input, spec, mc);
          const PosteriorSummary summary = summarize(samples);
          mo.scores = posterior_scores(summary, config.score);
          mo.parameters = summary.parameters;
          mo.max_rhat = summary.max_rhat;
          mo.clamp_violations = summary.clamp_violations;
          for (const auto& c : samples.chains) mo.retained_samples += c.retained;
          if (spec.mode == config.generating_mode) {
            const auto names = samples.parameter_names();
            for (std::size_t k = 0; k < names.size(); ++k) {
              const auto recs = interval_records(names[k], samples.pooled_draws(k), out.truth[k], config.levels);
              mo.intervals.insert(mo.intervals.end(), recs.begin(), recs.end());
            }
          }
          break;
        }
      }
      mo.auc = both_classes ? auc(mo.scores, labels, data.reports) : std::numeric_limits<double>::quiet_NaN();
      mo.rmse = rmse(mo.scores, labels, data.reports);
      if (config.equity_k > 0) {
        const auto alloc = allocate_topk(mo.scores, eligible, config.equity_k, equity_attr,
                                         {covariates.feature_names[config.equity_feature]}, covariates.population);
        mo.served = alloc.served[0];
        mo.base_rate = alloc.base_rate[0];
      }
      out.models.push_back(std::move(mo));
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
    out.models.clear();
  }
  return out;
}

ExperimentReport run_experiment(const SpatialGraph& graph, const CovariateTable& covariates,
                                const ExperimentConfig& config) {
  if (config.trials == 0) throw InputError("trials must be positive", "trials");
  config.mcmc.validate();
  config.prior.validate();
  ExperimentReport report;
  report.config = config;
  report.trials.resize(config.trials);
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, config.trials));
  if (workers == 1) {
    for (std::size_t t = 0; t < config.trials; ++t) report.trials[t] = run_trial(graph, covariates, config, t);
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < config.trials; t = next++) {
        report.trials[t] = run_trial(graph, covariates, config, t);
      }
    });
  }
  for (auto& th : pool) th.join();
  return report;
}

}  // namespace spu
