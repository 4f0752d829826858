#include <algorithm>
#include <cctype>
#include <sstream>

#include "commands.hpp"
#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/observation.hpp"
#include "spatialpu/pooling.hpp"
#include "spatialpu/serialization.hpp"

namespace spu::cli {

namespace {

struct Options {
  std::string out = ".";
  std::vector<std::string> events;
  std::vector<std::string> exclude{"theta0", "theta1", "alpha0"};
  PriorOptions prior;
  std::size_t grid_points = 4001;
  double grid_span = 6.0;
  // optional pooled reporting-rate map
  std::string nodes;
  std::string edges;
  CovariateFiles covariates;
};

std::string file_stem(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

}  // namespace

Command add_pool(CLI::App& root) {
  auto* app = root.add_subcommand("pool", "Pool shared reporting coefficients across events");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  echo->add("event", o->events, "LABEL=chain.csv[:chain.csv...]; repeat or comma-separate")->required()->delimiter(',');
  echo->add("exclude", o->exclude, "Event-specific parameters left unpooled")->delimiter(',');
  o->prior.add(*echo);
  echo->add("grid-points", o->grid_points, "Density grid size");
  echo->add("grid-span", o->grid_span, "Grid half-width in multiples of the widest fit sd");
  echo->add("nodes", o->nodes, "Node CSV for a pooled reporting-rate map")->check(CLI::ExistingFile);
  echo->add("edges", o->edges, "Edge CSV for a pooled reporting-rate map")->check(CLI::ExistingFile);
  o->covariates.add(*echo, false);
  return {app, [o, echo] {
            ensure_directory(o->out);
            Manifest m("pool", echo->effective());
            std::vector<EventSamples> events;
            for (const auto& spec : o->events) {
              const auto eq = spec.find('=');
              if (eq == std::string::npos || eq == 0) throw InputError("--event takes LABEL=file[:file...]", "event");
              EventSamples ev;
              ev.label = spec.substr(0, eq);
              std::string rest = spec.substr(eq + 1);
              std::size_t start = 0;
              while (start <= rest.size()) {
                const auto colon = rest.find(':', start);
                const std::string path = rest.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
                m.input(ev.label + ":" + path, path);
                const auto table = io::read_chain_csv(path);
                if (ev.coefficients.empty()) {
                  ev.coefficients = table.names;
                  ev.samples.resize(table.names.size());
                } else if (ev.coefficients != table.names) {
                  throw InputError("chain files of event '" + ev.label + "' have different columns", path);
                }
                for (std::size_t k = 0; k < table.names.size(); ++k) {
                  ev.samples[k].insert(ev.samples[k].end(), table.columns[k].begin(), table.columns[k].end());
                }
                if (colon == std::string::npos) break;
                start = colon + 1;
              }
              events.push_back(std::move(ev));
            }
            const PriorConfig prior = o->prior.build();
            const auto pooled = pooled_summary_table(events, prior, o->exclude, {o->grid_points, o->grid_span});

            std::ostringstream summary;
            csv::write_row(summary, {"coefficient", "mean", "lo95", "hi95"});
            for (const auto& p : pooled) {
              csv::write_row(summary, {p.coefficient, csv::format_double(p.mean), csv::format_double(p.lo95),
                                       csv::format_double(p.hi95)});
              std::ostringstream dens;
              csv::write_row(dens, {"value", "density"});
              for (std::size_t g = 0; g < p.grid.size(); ++g) {
                csv::write_row(dens, {csv::format_double(p.grid[g]), csv::format_double(p.density[g])});
              }
              const std::string name = "density_" + file_stem(p.coefficient) + ".csv";
              io::write_text(join_path(o->out, name), dens.str());
              m.output(o->out, name);
              json fits = json::array();
              for (const auto& f : p.inputs) fits.push_back({{"event", f.source}, {"mean", f.mean}, {"sd", f.sd}});
              m.notes()["fits"][p.coefficient] = fits;
            }
            io::write_text(join_path(o->out, "pooled_summary.csv"), summary.str());
            m.output(o->out, "pooled_summary.csv");

            if (!o->nodes.empty() || !o->edges.empty() || !o->covariates.path.empty()) {
              if (o->nodes.empty() || o->edges.empty() || o->covariates.path.empty()) {
                throw InputError("a pooled rate map needs --nodes, --edges and --covariates", "covariates");
              }
              GraphFiles gf{o->nodes, o->edges};
              const SpatialGraph graph = gf.load(m);
              const CovariateTable cov = o->covariates.load(graph, m);
              Eigen::VectorXd coeffs(static_cast<Eigen::Index>(cov.cols()));
              for (std::size_t k = 0; k < cov.cols(); ++k) {
                const std::string want = "alpha_" + cov.feature_names[k];
                const auto it = std::find_if(pooled.begin(), pooled.end(),
                                             [&](const PooledPosterior& p) { return p.coefficient == want; });
                if (it == pooled.end()) throw InputError("no pooled coefficient '" + want + "'", want);
                coeffs(static_cast<Eigen::Index>(k)) = it->mean;
              }
              io::write_predictions_csv(join_path(o->out, "pooled_psi.csv"), graph.node_ids(),
                                        pooled_reporting_rates(coeffs, cov));
              m.output(o->out, "pooled_psi.csv");
            }
            m.write(o->out);
          }};
}

}  // namespace spu::cli
