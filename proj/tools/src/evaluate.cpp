#include "commands.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/evaluation.hpp"
#include "spatialpu/serialization.hpp"

namespace spu::cli {

namespace {

struct Options {
  std::string out = ".";
  GraphFiles graph;
  std::string dataset;
  std::vector<std::string> predictions;
  std::vector<std::string> names;
  std::size_t iterates = 10'000;
  std::uint64_t seed = 0;
  bool keep_training_nodes = false;
};

json interval(const Interval& ci) { return json::array({ci.lo, ci.hi}); }

}  // namespace

Command add_evaluate(CLI::App& root) {
  auto* app = root.add_subcommand("evaluate", "AUC and RMSE of node scores against held-out labels");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  o->graph.add(*echo);
  echo->add("dataset", o->dataset, "Dataset CSV; `test` holds the labels")->required()->check(CLI::ExistingFile);
  echo->add("predictions", o->predictions, "Prediction CSVs (node_id,score); repeat or comma-separate")
      ->required()
      ->delimiter(',');
  echo->add("names", o->names, "Model names, one per prediction file")->delimiter(',');
  echo->add("iterates", o->iterates, "Bootstrap iterates");
  echo->add("seed", o->seed, "Bootstrap seed");
  echo->flag("keep-training-nodes", o->keep_training_nodes, "Do not exclude nodes with training reports");
  return {app, [o, echo] {
            ensure_directory(o->out);
            Manifest m("evaluate", echo->effective());
            const SpatialGraph graph = o->graph.load(m);
            m.input("dataset", o->dataset);
            const auto ds = io::read_dataset_csv(o->dataset, graph);
            std::vector<std::string> names = o->names;
            if (names.empty()) {
              for (std::size_t k = 0; k < o->predictions.size(); ++k) names.push_back("model" + std::to_string(k));
            }
            if (names.size() != o->predictions.size()) throw InputError("--names must match --predictions", "names");
            std::vector<std::vector<double>> scores;
            for (std::size_t k = 0; k < names.size(); ++k) {
              m.input("predictions:" + names[k], o->predictions[k]);
              scores.push_back(io::read_predictions_csv(o->predictions[k], graph));
            }
            const std::vector<std::uint8_t> none;
            const std::span<const std::uint8_t> exclude =
                o->keep_training_nodes ? std::span<const std::uint8_t>(none) : std::span<const std::uint8_t>(ds.train);
            json models = json::object();
            for (std::size_t k = 0; k < names.size(); ++k) {
              json entry;
              for (Metric metric : {Metric::Auc, Metric::Rmse}) {
                const auto r = bootstrap_metric(scores[k], ds.test, exclude, metric, o->iterates, o->seed);
                entry[r.metric] = {{"estimate", r.estimate}, {"ci95", interval(r.ci95)}, {"redraws", r.redraws}};
              }
              models[names[k]] = entry;
            }
            json pairs = json::array();
            for (std::size_t a = 0; a < names.size(); ++a) {
              for (std::size_t b = a + 1; b < names.size(); ++b) {
                const auto c = bootstrap_compare(scores[a], scores[b], ds.test, exclude, o->iterates, o->seed);
                pairs.push_back({{"a", names[a]},
                                 {"b", names[b]},
                                 {"delta_auc", c.auc.delta},
                                 {"delta_auc_ci95", interval(c.auc.ci95)},
                                 {"p_auc", c.auc.p_value},
                                 {"delta_rmse", c.rmse.delta},
                                 {"delta_rmse_ci95", interval(c.rmse.ci95)},
                                 {"p_rmse", c.rmse.p_value},
                                 {"redraws", c.redraws}});
              }
            }
            std::size_t evaluated = 0, positives = 0;
            for (std::size_t i = 0; i < graph.size(); ++i) {
              if (!exclude.empty() && exclude[i]) continue;
              ++evaluated;
              positives += ds.test[i];
            }
            const json metrics = {{"exclusion", o->keep_training_nodes ? "none" : "training-reported nodes"},
                                  {"iterates", o->iterates},
                                  {"evaluated_nodes", evaluated},
                                  {"positive_labels", positives},
                                  {"models", models},
                                  {"comparisons", pairs}};
            io::write_text(join_path(o->out, "metrics.json"), format_json(metrics));
            m.output(o->out, "metrics.json");
            m.write(o->out);
          }};
}

}  // namespace spu::cli
