#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatialpu/baselines.hpp"
#include "spatialpu/covariates.hpp"
#include "spatialpu/evaluation.hpp"
#include "spatialpu/gibbs.hpp"
#include "spatialpu/observation.hpp"
#include "spatialpu/priors.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu {

struct GenerateOptions {
  std::size_t sw_sweeps = 500;  // Swendsen-Wang sweeps from a random state
  // Overrides one logistic coefficient (index into the covariate columns)
  // after the prior draw; heterogeneous mode only.
  std::optional<std::size_t> fixed_feature;
  double fixed_value = 0.0;
};

struct TrialData {
  IsingParams theta;
  ReportingParams reporting = ReportingParams::homogeneous(0.5);
  std::vector<double> psi;
  StateVector state;
  ReportVector reports;
};

// Parameters from the priors, A by Swendsen-Wang, T from the reporting model.
TrialData generate_trial(const SpatialGraph& graph, const CovariateTable* covariates, ReportingMode mode,
                         const PriorConfig& prior, Rng& rng, const GenerateOptions& options = {});

// True parameter values in PosteriorSamples::parameter_names() order.
std::vector<double> true_parameter_values(const TrialData& trial);

enum class ModelKind { Homogeneous, Heterogeneous, Spatial, GP };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

enum class ScoreKind { EventProbability, ReportProbability };
std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view text);

struct ExperimentConfig {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  ReportingMode generating_mode = ReportingMode::Heterogeneous;
  std::vector<ModelKind> models{ModelKind::Heterogeneous, ModelKind::Homogeneous, ModelKind::Spatial, ModelKind::GP};
  MCMCConfig mcmc;
  PriorConfig prior;
  GenerateOptions generate;
  ScoreKind score = ScoreKind::EventProbability;
  std::vector<double> levels{0.5, 0.8, 0.9, 0.95};
  // Top-k allocation on a raw covariate column (0 disables).
  std::size_t equity_k = 0;
  std::size_t equity_feature = 0;
  std::size_t threads = 1;
};

struct ModelOutcome {
  ModelKind model = ModelKind::Spatial;
  double auc = 0.0;   // against true A over nodes without a report; NaN when one class is absent
  double rmse = 0.0;
  std::vector<double> scores;
  // Bayesian models only.
  std::vector<ParameterSummary> parameters;
  std::vector<IntervalRecord> intervals;
  double max_rhat = 0.0;
  std::size_t clamp_violations = 0;
  std::size_t retained_samples = 0;
  // Equity allocation, when configured.
  double served = 0.0;
  double base_rate = 0.0;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<std::string> parameter_names;
  std::vector<double> truth;
  std::size_t reported = 0;
  std::size_t positive = 0;
  std::vector<ModelOutcome> models;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
};

// Trial t uses seed mix_seed(config.seed, t); results do not depend on
// thread count or completion order.
ExperimentReport run_experiment(const SpatialGraph& graph, const CovariateTable& covariates,
                                const ExperimentConfig& config);

// Runs one trial of an experiment; errors are recorded in the result.
TrialResult run_trial(const SpatialGraph& graph, const CovariateTable& covariates, const ExperimentConfig& config,
                      std::size_t trial);

// Node scores of a fitted Bayesian model.
std::vector<double> posterior_scores(const PosteriorSummary& summary, ScoreKind kind);

}  // namespace spu
