#include <cmath>

#include "commands.hpp"
#include "spatialpu/baselines.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/serialization.hpp"
#include "spatialpu/synthetic.hpp"

namespace spu::cli {

namespace {

struct Options {
  std::string out = ".";
  GraphFiles graph;
  CovariateFiles covariates;
  PriorOptions prior;
  McmcOptions mcmc;
  std::string dataset;
  std::string model = "heterogeneous";
  std::string score = "report-probability";
  bool no_latent = false;
};

json summary_json(const PosteriorSamples& samples, const PosteriorSummary& s) {
  json params = json::array();
  for (const auto& p : s.parameters) {
    params.push_back({{"name", p.name},
                      {"mean", p.mean},
                      {"median", p.median},
                      {"sd", p.sd},
                      {"lo95", p.lo95},
                      {"hi95", p.hi95},
                      {"rhat", std::isfinite(p.rhat) ? json(p.rhat) : json(nullptr)}});
  }
  json chains = json::array();
  for (std::size_t c = 0; c < samples.chains.size(); ++c) {
    const auto& ch = samples.chains[c];
    chains.push_back({{"seed", ch.seed},
                      {"retained", ch.retained},
                      {"svea_acceptance_burnin", ch.svea_proposals_burnin
                                                     ? double(ch.svea_accepts_burnin) / double(ch.svea_proposals_burnin)
                                                     : 0.0},
                      {"svea_acceptance", s.svea_acceptance[c]},
                      {"final_step", ch.final_step},
                      {"adaptations", ch.adaptation.size()},
                      {"logistic_proposals", ch.logistic.proposals},
                      {"logistic_accepts", ch.logistic.accepts},
                      {"logistic_prior_draws", ch.logistic.prior_draws},
                      {"clamp_violations", ch.clamp_violations},
                      {"support_violations", ch.support_violations}});
  }
  return {{"model", std::string(to_string(samples.spec.mode))},
          {"parameters", params},
          {"rhat_available", s.rhat_available},
          {"max_rhat", s.rhat_available ? json(s.max_rhat) : json(nullptr)},
          {"converged", s.rhat_available ? json(s.max_rhat <= 1.03) : json(nullptr)},
          {"clamp_violations", s.clamp_violations},
          {"chains", chains}};
}

}  // namespace

Command add_fit(CLI::App& root) {
  auto* app = root.add_subcommand("fit", "Fit a model to training reports and write node scores");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  o->graph.add(*echo);
  o->covariates.add(*echo, false);
  o->prior.add(*echo);
  o->mcmc.add(*echo);
  echo->add("dataset", o->dataset, "Dataset CSV (node_id,train[,test])")->required()->check(CLI::ExistingFile);
  echo->add("model", o->model, "homogeneous, heterogeneous, spatial or gp")
      ->check(CLI::IsMember({"homogeneous", "heterogeneous", "spatial", "gp"}));
  echo->add("score", o->score, "Score written to predictions.csv for Bayesian models")
      ->check(CLI::IsMember({"event-probability", "report-probability"}));
  echo->flag("no-latent", o->no_latent, "Skip the per-sample latent bitset files");
  return {app, [o, echo] {
            ensure_directory(o->out);
            Manifest m("fit", echo->effective());
            const SpatialGraph graph = o->graph.load(m);
            m.input("dataset", o->dataset);
            const auto ds = io::read_dataset_csv(o->dataset, graph);
            const ModelKind kind = parse_model_kind(o->model);
            const auto& ids = graph.node_ids();

            if (kind == ModelKind::Spatial || kind == ModelKind::GP) {
              json summary = {{"model", o->model}};
              std::vector<double> scores;
              if (kind == ModelKind::Spatial) {
                scores = spatial_baseline(ds.train, graph).scores;
              } else {
                const GPFit fit = gp_select(ds.train, graph.centroids());
                scores = fit.scores;
                summary["length_scale"] = fit.hyper.length_scale;
                summary["noise"] = fit.hyper.noise;
                summary["mean"] = fit.mean;
                summary["signal_variance"] = fit.signal_variance;
                summary["log_marginal"] = std::isfinite(fit.log_marginal) ? json(fit.log_marginal) : json(nullptr);
                summary["jitter"] = fit.jitter;
              }
              io::write_predictions_csv(join_path(o->out, "predictions.csv"), ids, scores);
              io::write_text(join_path(o->out, "summary.json"), format_json(summary));
              m.output(o->out, "predictions.csv");
              m.output(o->out, "summary.json");
              m.write(o->out);
              return;
            }

            ModelSpec spec;
            spec.mode = kind == ModelKind::Homogeneous ? ReportingMode::Homogeneous : ReportingMode::Heterogeneous;
            spec.prior = o->prior.build();
            std::optional<CovariateTable> cov;
            if (!o->covariates.path.empty()) cov = o->covariates.load(graph, m);
            if (spec.mode == ReportingMode::Heterogeneous && !cov) {
              throw InputError("the heterogeneous model needs --covariates", "covariates");
            }
            MCMCConfig mc = o->mcmc.config;
            mc.store_latent = !o->no_latent;
            const FitInput input{&graph, ds.train, cov && spec.mode == ReportingMode::Heterogeneous ? &*cov : nullptr};
            const PosteriorSamples samples = fit_model(input, spec, mc);
            const PosteriorSummary s = summarize(samples);
            const auto names = samples.parameter_names();
            for (std::size_t c = 0; c < samples.chains.size(); ++c) {
              const std::string chain_csv = "chain_" + std::to_string(c) + ".csv";
              io::write_chain_csv(join_path(o->out, chain_csv), samples.chains[c], names);
              m.output(o->out, chain_csv);
              if (mc.store_latent) {
                const std::string bits = "latent_" + std::to_string(c) + ".bin";
                io::write_latent_bitset(join_path(o->out, bits), samples.chains[c], graph.size());
                m.output(o->out, bits);
              }
            }
            const ScoreKind sk = parse_score_kind(o->score);
            io::write_predictions_csv(join_path(o->out, "predictions.csv"), ids, posterior_scores(s, sk));
            io::write_text(join_path(o->out, "summary.json"), format_json(summary_json(samples, s)));
            std::vector<io::PointFeature> points;
            for (std::size_t i = 0; i < graph.size(); ++i) {
              points.push_back({ids[i],
                                graph.centroids()[i],
                                {{"pr_a", s.event_probability[i]},
                                 {"psi", s.mean_psi[i]},
                                 {"pr_report", s.report_probability[i]},
                                 {"train", double(ds.train[i])}}});
            }
            io::write_geojson_points(join_path(o->out, "nodes.geojson"), points);
            for (const char* f : {"predictions.csv", "summary.json", "nodes.geojson"}) m.output(o->out, f);
            m.notes()["max_rhat"] = s.rhat_available ? json(s.max_rhat) : json(nullptr);
            m.notes()["clamp_violations"] = s.clamp_violations;
            m.write(o->out);
          }};
}

}  // namespace spu::cli
