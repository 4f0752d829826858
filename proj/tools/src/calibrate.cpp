#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/evaluation.hpp"
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
  std::string mode = "heterogeneous";
  std::vector<std::string> models{"heterogeneous", "homogeneous", "spatial", "gp"};
  std::size_t trials = 100;
  std::size_t sw_sweeps = 500;
  std::string score = "event-probability";
  std::vector<double> levels{0.5, 0.8, 0.9, 0.95};
  int fixed_feature = -1;
  double fixed_value = 0.0;
  std::size_t equity_k = 0;
  std::size_t equity_feature = 0;
  std::size_t iterates = 10'000;
  std::size_t trial_threads = 1;
};

json trial_json(const TrialResult& t) {
  json j = {{"trial", t.trial}, {"seed", t.seed}, {"ok", t.ok}};
  if (!t.ok) {
    j["error"] = t.error;
    return j;
  }
  json truth = json::object();
  for (std::size_t k = 0; k < t.parameter_names.size(); ++k) truth[t.parameter_names[k]] = t.truth[k];
  j["truth"] = truth;
  j["reported"] = t.reported;
  j["positive"] = t.positive;
  json models = json::object();
  for (const auto& mo : t.models) {
    json e = {{"auc", mo.auc}, {"rmse", mo.rmse}};
    if (!mo.parameters.empty()) {
      json means = json::object();
      for (const auto& p : mo.parameters) means[p.name] = p.mean;
      e["posterior_mean"] = means;
      e["max_rhat"] = std::isfinite(mo.max_rhat) ? json(mo.max_rhat) : json(nullptr);
      e["clamp_violations"] = mo.clamp_violations;
      e["retained_samples"] = mo.retained_samples;
    }
    if (mo.served != 0.0 || mo.base_rate != 0.0) {
      e["served"] = mo.served;
      e["base_rate"] = mo.base_rate;
    }
    models[std::string(to_string(mo.model))] = e;
  }
  j["models"] = models;
  return j;
}

}  // namespace

Command add_calibrate(CLI::App& root) {
  auto* app = root.add_subcommand("calibrate", "Semi-synthetic trials: calibration, identifiability, AUC tables");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  o->graph.add(*echo);
  o->covariates.add(*echo, true);
  o->prior.add(*echo);
  o->mcmc.add(*echo);
  echo->add("mode", o->mode, "Reporting model generating the data")
      ->check(CLI::IsMember({"homogeneous", "heterogeneous"}));
  echo->add("models", o->models, "Models fitted in every trial")->delimiter(',');
  echo->add("trials", o->trials, "Number of trials");
  echo->add("sw-sweeps", o->sw_sweeps, "Swendsen-Wang sweeps for each latent draw");
  echo->add("score", o->score, "Bayesian score compared with the true latent state")
      ->check(CLI::IsMember({"event-probability", "report-probability"}));
  echo->add("levels", o->levels, "Central interval levels")->delimiter(',');
  echo->add("fixed-feature", o->fixed_feature, "Index of a coefficient fixed to --fixed-value (negative: none)");
  echo->add("fixed-value", o->fixed_value, "Value of the fixed coefficient");
  echo->add("equity-k", o->equity_k, "Top-k allocation size per trial (0: off)");
  echo->add("equity-feature", o->equity_feature, "Covariate column used for the allocation check");
  echo->add("iterates", o->iterates, "Bootstrap iterates over trials");
  echo->add("trial-threads", o->trial_threads, "Concurrent trials");
  return {app, [o, echo] {
            ensure_directory(o->out);
            Manifest m("calibrate", echo->effective());
            const SpatialGraph graph = o->graph.load(m);
            const CovariateTable cov = o->covariates.load(graph, m);
            ExperimentConfig ec;
            ec.trials = o->trials;
            ec.seed = o->mcmc.config.seed;
            ec.generating_mode = parse_reporting_mode(o->mode);
            ec.models.clear();
            for (const auto& name : o->models) ec.models.push_back(parse_model_kind(name));
            ec.mcmc = o->mcmc.config;
            ec.prior = o->prior.build();
            ec.generate.sw_sweeps = o->sw_sweeps;
            if (o->fixed_feature >= 0) {
              ec.generate.fixed_feature = static_cast<std::size_t>(o->fixed_feature);
              ec.generate.fixed_value = o->fixed_value;
            }
            ec.score = parse_score_kind(o->score);
            ec.levels = o->levels;
            ec.equity_k = o->equity_k;
            ec.equity_feature = o->equity_feature;
            ec.threads = o->trial_threads;
            const ExperimentReport rep = run_experiment(graph, cov, ec);

            std::string ndjson;
            std::vector<IntervalRecord> intervals;
            std::vector<RecoveryPair> recovery;
            std::map<std::string, std::vector<double>> auc_by_model, rmse_by_model;
            std::vector<const TrialResult*> ok;
            for (const auto& t : rep.trials) {
              ndjson += trial_json(t).dump() + "\n";
              if (!t.ok) continue;
              ok.push_back(&t);
              for (const auto& mo : t.models) {
                const std::string name(to_string(mo.model));
                if (std::isfinite(mo.auc)) auc_by_model[name].push_back(mo.auc);
                rmse_by_model[name].push_back(mo.rmse);
                intervals.insert(intervals.end(), mo.intervals.begin(), mo.intervals.end());
                if (!mo.intervals.empty()) {
                  for (std::size_t k = 0; k < mo.parameters.size(); ++k) {
                    recovery.push_back({mo.parameters[k].name, t.truth[k], mo.parameters[k].mean});
                  }
                }
              }
            }
            io::write_text(join_path(o->out, "trials.ndjson"), ndjson);
            m.output(o->out, "trials.ndjson");

            std::ostringstream cal;
            csv::write_row(cal, {"parameter", "level", "coverage", "trials"});
            for (const auto& r : calibration_curve(intervals)) {
              csv::write_row(cal, {r.parameter, csv::format_double(r.level), csv::format_double(r.coverage),
                                   std::to_string(r.trials)});
            }
            io::write_text(join_path(o->out, "calibration.csv"), cal.str());
            m.output(o->out, "calibration.csv");

            std::ostringstream ident;
            csv::write_row(ident, {"parameter", "correlation", "trials"});
            if (ok.size() >= 2) {
              for (const auto& r : identifiability(recovery)) {
                csv::write_row(ident, {r.parameter, csv::format_double(r.correlation), std::to_string(r.trials)});
              }
            }
            io::write_text(join_path(o->out, "identifiability.csv"), ident.str());
            m.output(o->out, "identifiability.csv");

            // Per-model means with trial-bootstrap intervals, then paired
            // comparisons of the first model against the rest.
            std::ostringstream auc;
            csv::write_row(auc, {"model", "auc", "auc_lo95", "auc_hi95", "rmse", "rmse_lo95", "rmse_hi95", "auc_trials", "rmse_trials"});
            std::ostringstream cmp;
            csv::write_row(cmp, {"a", "b", "metric", "delta", "lo95", "hi95", "p_value"});
            for (const auto& name : o->models) {
              const auto& a = auc_by_model[name];
              const auto& r = rmse_by_model[name];
              if (a.empty()) continue;
              const auto da = bootstrap_paired_means(a, std::vector<double>(a.size(), 0.0), o->iterates, ec.seed, "auc");
              const auto dr = bootstrap_paired_means(r, std::vector<double>(r.size(), 0.0), o->iterates, ec.seed, "rmse");
              csv::write_row(auc, {name, csv::format_double(da.delta), csv::format_double(da.ci95.lo),
                                   csv::format_double(da.ci95.hi), csv::format_double(dr.delta),
                                   csv::format_double(dr.ci95.lo), csv::format_double(dr.ci95.hi),
                                   std::to_string(a.size()), std::to_string(r.size())});
            }
            if (!o->models.empty() && !ok.empty()) {
              const std::string& first = o->models.front();
              for (std::size_t k = 1; k < o->models.size(); ++k) {
                const std::string& other = o->models[k];
                for (const auto* metric : {"auc", "rmse"}) {
                  const auto& src = std::string(metric) == "auc" ? auc_by_model : rmse_by_model;
                  if (src.at(first).empty()) continue;
                  const auto d = bootstrap_paired_means(src.at(first), src.at(other), o->iterates, ec.seed, metric);
                  csv::write_row(cmp, {first, other, metric, csv::format_double(d.delta), csv::format_double(d.ci95.lo),
                                       csv::format_double(d.ci95.hi), csv::format_double(d.p_value)});
                }
              }
            }
            io::write_text(join_path(o->out, "auc.csv"), auc.str());
            io::write_text(join_path(o->out, "comparisons.csv"), cmp.str());
            m.output(o->out, "auc.csv");
            m.output(o->out, "comparisons.csv");
            m.notes()["trials_ok"] = ok.size();
            m.notes()["trials_failed"] = rep.trials.size() - ok.size();
            m.write(o->out);
          }};
}

}  // namespace spu::cli
