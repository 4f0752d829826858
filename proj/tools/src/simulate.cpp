#include <cstdio>

#include "commands.hpp"
#include "spatialpu/csv.hpp"
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
  std::string mode = "heterogeneous";
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t sw_sweeps = 500;
  int fixed_feature = -1;
  double fixed_value = 0.0;
};

std::string trial_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dataset_%03zu.csv", t);
  return buf;
}

}  // namespace

Command add_simulate(CLI::App& root) {
  auto* app = root.add_subcommand("simulate", "Draw semi-synthetic events and reports on a graph");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  o->graph.add(*echo);
  o->covariates.add(*echo, false);
  o->prior.add(*echo);
  echo->add("mode", o->mode, "Reporting model generating the data")
      ->check(CLI::IsMember({"homogeneous", "heterogeneous"}));
  echo->add("trials", o->trials, "Number of independent datasets");
  echo->add("seed", o->seed, "Master seed");
  echo->add("sw-sweeps", o->sw_sweeps, "Swendsen-Wang sweeps for each latent draw");
  echo->add("fixed-feature", o->fixed_feature, "Index of a coefficient fixed to --fixed-value (negative: none)");
  echo->add("fixed-value", o->fixed_value, "Value of the fixed coefficient");
  return {app, [o, echo] {
            if (o->trials == 0) throw InputError("--trials must be positive", "trials");
            ensure_directory(o->out);
            Manifest m("simulate", echo->effective());
            const SpatialGraph graph = o->graph.load(m);
            const ReportingMode mode = parse_reporting_mode(o->mode);
            std::optional<CovariateTable> cov;
            if (!o->covariates.path.empty()) cov = o->covariates.load(graph, m);
            if (mode == ReportingMode::Heterogeneous && !cov) {
              throw InputError("heterogeneous simulation needs --covariates", "covariates");
            }
            const PriorConfig prior = o->prior.build();
            GenerateOptions gen;
            gen.sw_sweeps = o->sw_sweeps;
            if (o->fixed_feature >= 0) {
              gen.fixed_feature = static_cast<std::size_t>(o->fixed_feature);
              gen.fixed_value = o->fixed_value;
            }
            std::string records;
            for (std::size_t t = 0; t < o->trials; ++t) {
              const std::uint64_t seed = mix_seed(o->seed, t);
              Rng rng(mix_seed(seed, 0));
              const TrialData d = generate_trial(graph, cov ? &*cov : nullptr, mode, prior, rng, gen);
              std::vector<std::uint8_t> truth(graph.size());
              std::size_t reported = 0, positive = 0;
              for (std::size_t i = 0; i < graph.size(); ++i) {
                truth[i] = d.state[i] == 1;
                reported += d.reports[i];
                positive += truth[i];
              }
              // `test` holds the true latent state so evaluate can score against it.
              io::write_dataset_csv(join_path(o->out, trial_name(t)), graph, d.reports, truth);
              m.output(o->out, trial_name(t));
              auto names = std::vector<std::string>{"theta0", "theta1"};
              for (const auto& n : reporting_parameter_names(mode, cov ? &*cov : nullptr)) names.push_back(n);
              const auto values = true_parameter_values(d);
              json params = json::object();
              for (std::size_t k = 0; k < names.size(); ++k) params[names[k]] = values[k];
              records += json{{"trial", t},
                              {"seed", seed},
                              {"dataset", trial_name(t)},
                              {"parameters", params},
                              {"reported", reported},
                              {"positive", positive},
                              {"mean_psi", weighted_mean_rate(d.psi, std::vector<double>(graph.size(), 1.0))}}
                             .dump() +
                         "\n";
            }
            io::write_text(join_path(o->out, "trials.ndjson"), records);
            m.output(o->out, "trials.ndjson");
            m.write(o->out);
          }};
}

}  // namespace spu::cli
