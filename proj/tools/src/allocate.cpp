#include <algorithm>
#include <sstream>

#include "commands.hpp"
#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/evaluation.hpp"
#include "spatialpu/serialization.hpp"

namespace spu::cli {

namespace {

struct Options {
  std::string out = ".";
  GraphFiles graph;
  std::string dataset;
  std::string predictions;
  std::string covariates;
  std::string id_column = "node_id";
  std::string population_column = "population";
  std::vector<std::string> attributes{"white_share"};
  std::size_t k = 100;
  std::vector<std::size_t> k_sweep;
};

}  // namespace

Command add_allocate(CLI::App& root) {
  auto* app = root.add_subcommand("allocate", "Top-k allocation of unreported nodes and served population shares");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  o->graph.add(*echo);
  echo->add("dataset", o->dataset, "Dataset CSV; nodes with training reports are ineligible")
      ->required()
      ->check(CLI::ExistingFile);
  echo->add("predictions", o->predictions, "Scores (node_id,score)")->required()->check(CLI::ExistingFile);
  echo->add("covariates", o->covariates, "Covariate CSV with raw attribute columns")->required()->check(CLI::ExistingFile);
  echo->add("id-column", o->id_column, "Node id column of the covariate CSV");
  echo->add("population-column", o->population_column, "Population column of the covariate CSV");
  echo->add("attributes", o->attributes, "Attribute columns whose served share is reported")->delimiter(',');
  echo->add("k", o->k, "Number of nodes to inspect");
  echo->add("k-sweep", o->k_sweep, "Further k values for equity.csv")->delimiter(',');
  return {app, [o, echo] {
            ensure_directory(o->out);
            Manifest m("allocate", echo->effective());
            const SpatialGraph graph = o->graph.load(m);
            m.input("dataset", o->dataset);
            m.input("predictions", o->predictions);
            m.input("covariates", o->covariates);
            const auto ds = io::read_dataset_csv(o->dataset, graph);
            const auto scores = io::read_predictions_csv(o->predictions, graph);
            const auto raw = read_covariates_csv(o->covariates, o->id_column);
            const auto aligned = align_covariates(raw, graph, o->attributes, o->population_column);
            std::vector<std::uint8_t> eligible(graph.size());
            for (std::size_t i = 0; i < graph.size(); ++i) eligible[i] = !ds.train[i];

            const auto main = allocate_topk(scores, eligible, o->k, aligned.features, o->attributes, aligned.population);
            std::ostringstream alloc;
            csv::write_row(alloc, {"node_id", "rank", "weight"});
            for (const auto& e : main.selected) {
              csv::write_row(alloc, {graph.node_ids()[e.node], std::to_string(e.rank), csv::format_double(e.weight)});
            }
            io::write_text(join_path(o->out, "allocation.csv"), alloc.str());
            m.output(o->out, "allocation.csv");

            std::vector<std::size_t> ks{o->k};
            for (auto k : o->k_sweep) {
              if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
            }
            std::sort(ks.begin(), ks.end());
            std::ostringstream equity;
            csv::write_row(equity, {"k", "attribute", "served", "base_rate"});
            for (auto k : ks) {
              const auto r = allocate_topk(scores, eligible, k, aligned.features, o->attributes, aligned.population);
              for (std::size_t a = 0; a < r.attributes.size(); ++a) {
                csv::write_row(equity, {std::to_string(k), r.attributes[a], csv::format_double(r.served[a]),
                                        csv::format_double(r.base_rate[a])});
              }
            }
            io::write_text(join_path(o->out, "equity.csv"), equity.str());
            m.output(o->out, "equity.csv");
            m.notes()["eligible_nodes"] = std::count(eligible.begin(), eligible.end(), 1);
            m.write(o->out);
          }};
}

}  // namespace spu::cli
