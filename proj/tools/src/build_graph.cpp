#include <algorithm>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/geohash.hpp"
#include "spatialpu/serialization.hpp"
#include "spatialpu/synthetic_city.hpp"

namespace spu::cli {

namespace {

struct Options {
  std::string out = ".";
  std::string geometry;
  std::string id_property = "GEOID";
  double tolerance = 1e-6;
  double min_shared_length = 1e-6;
  bool lonlat = false;
  CovariateFiles covariates;
  // geohash mode
  std::vector<double> bounds;
  int resolution = 6;
  double max_water_fraction = -1.0;
  double min_population = -1.0;
  // synthetic mode
  std::string synthetic_grid;
  double cell_size = 1000.0;
  double jitter = 0.2;
  double drop_fraction = 0.0;
  std::uint64_t seed = 1;
};

void write_graph_outputs(const SpatialGraph& graph, const std::string& out, Manifest& m) {
  io::write_graph(graph, join_path(out, "nodes.csv"), join_path(out, "edges.csv"));
  m.output(out, "nodes.csv");
  m.output(out, "edges.csv");
  std::size_t repaired = 0;
  for (const auto& e : graph.edges()) repaired += e.provenance == EdgeProvenance::ConnectivityRepair;
  m.notes()["node_count"] = graph.size();
  m.notes()["edge_count"] = graph.edge_count();
  m.notes()["repair_edges"] = repaired;
}

void run_polygons(const Options& o, Manifest& m) {
  m.input("geometry", o.geometry);
  std::vector<NodeGeometry> shapes = io::read_geojson_polygons(o.geometry, o.id_property);
  if (!o.covariates.path.empty()) {
    m.input("covariates", o.covariates.path);
    const auto raw = read_covariates_csv(o.covariates.path, o.covariates.id_column);
    const auto excl = find_exclusions(raw, o.covariates.features, o.covariates.population_column);
    std::set<std::string> drop(excl.zero_population.begin(), excl.zero_population.end());
    drop.insert(excl.missing_values.begin(), excl.missing_values.end());
    std::set<std::string> known(raw.ids.begin(), raw.ids.end());
    std::vector<std::string> no_row;
    std::erase_if(shapes, [&](const NodeGeometry& g) {
      if (!known.count(g.id)) {
        no_row.push_back(g.id);
        return true;
      }
      return drop.count(g.id) > 0;
    });
    m.notes()["dropped_zero_population"] = excl.zero_population;
    m.notes()["dropped_missing_covariates"] = excl.missing_values;
    m.notes()["dropped_without_covariates"] = no_row;
  }
  if (o.lonlat) shapes = geohash::project_geometries(std::move(shapes));
  const SpatialGraph base = build_adjacency_from_polygons(shapes, {o.tolerance, o.min_shared_length});
  m.notes()["components_before_repair"] = base.component_count();
  write_graph_outputs(repair_connectivity(base), o.out, m);
}

void run_geohash(const Options& o, Manifest& m) {
  if (o.bounds.size() != 4) throw InputError("--bounds takes min_lon,min_lat,max_lon,max_lat", "bounds");
  geohash::Filters filters;
  if (o.max_water_fraction >= 0.0) filters.max_water_fraction = o.max_water_fraction;
  if (o.min_population >= 0.0) filters.min_population = o.min_population;
  geohash::SourceLayer layer;
  const bool have_source = !o.geometry.empty();
  std::vector<std::string> raw_columns;
  if (have_source) {
    m.input("geometry", o.geometry);
    layer.polygons = io::read_geojson_polygons(o.geometry, o.id_property);
    if (o.covariates.path.empty()) throw InputError("geohash aggregation needs --covariates for population", "covariates");
    m.input("covariates", o.covariates.path);
    const auto raw = read_covariates_csv(o.covariates.path, o.covariates.id_column);
    const Eigen::VectorXd pop = evaluate_feature(raw, o.covariates.population_column);
    std::vector<Eigen::VectorXd> cols;
    for (const auto& c : raw.columns) {
      if (c == o.covariates.population_column) continue;
      raw_columns.push_back(c);
      cols.push_back(evaluate_feature(raw, c));
    }
    layer.feature_names = raw_columns;
    for (const auto& g : layer.polygons) {
      const auto it = std::find(raw.ids.begin(), raw.ids.end(), g.id);
      if (it == raw.ids.end()) throw InputError("no covariate row for polygon '" + g.id + "'", g.id);
      const auto r = static_cast<Eigen::Index>(it - raw.ids.begin());
      layer.population.push_back(pop(r));
      std::vector<double> row;
      for (const auto& c : cols) row.push_back(c(r));
      layer.covariates.push_back(std::move(row));
    }
  } else if (filters.max_water_fraction || filters.min_population) {
    throw InputError("water and population filters need --geometry and --covariates", "geometry");
  }
  const geohash::LonLatBox box{o.bounds[0], o.bounds[1], o.bounds[2], o.bounds[3]};
  const auto grid = geohash::build_grid(box, o.resolution, filters, have_source ? &layer : nullptr);
  write_graph_outputs(grid.graph, o.out, m);
  m.notes()["dropped_by_water"] = grid.dropped_by_water;
  m.notes()["dropped_by_population"] = grid.dropped_by_population;
  RawCovariates cells;
  cells.ids = grid.graph.node_ids();
  cells.columns = {"population", "water_fraction"};
  cells.columns.insert(cells.columns.end(), grid.feature_names.begin(), grid.feature_names.end());
  cells.values.resize(static_cast<Eigen::Index>(cells.ids.size()), static_cast<Eigen::Index>(cells.columns.size()));
  for (std::size_t i = 0; i < cells.ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    cells.values(r, 0) = grid.population[i];
    cells.values(r, 1) = grid.water_fraction[i];
    for (std::size_t k = 0; k < grid.feature_names.size(); ++k) {
      cells.values(r, static_cast<Eigen::Index>(k + 2)) = grid.covariates[i][k];
    }
  }
  io::write_covariates_csv(join_path(o.out, "covariates.csv"), cells);
  m.output(o.out, "covariates.csv");
}

void run_synthetic(const Options& o, Manifest& m) {
  CityOptions co;
  char x = 0;
  std::istringstream ss(o.synthetic_grid);
  if (!(ss >> co.rows >> x >> co.cols) || (x != 'x' && x != 'X')) {
    throw InputError("--synthetic-grid takes ROWSxCOLS, e.g. 16x16", "synthetic-grid");
  }
  co.cell_size = o.cell_size;
  co.jitter = o.jitter;
  co.drop_fraction = o.drop_fraction;
  co.seed = o.seed;
  const auto city = make_synthetic_city(co);
  io::write_geojson_polygons(join_path(o.out, "geometry.geojson"), city.geometries, o.id_property);
  io::write_covariates_csv(join_path(o.out, "covariates.csv"), city.covariates);
  m.output(o.out, "geometry.geojson");
  m.output(o.out, "covariates.csv");
  const SpatialGraph base = build_adjacency_from_polygons(city.geometries, {o.tolerance, o.min_shared_length});
  m.notes()["components_before_repair"] = base.component_count();
  write_graph_outputs(repair_connectivity(base), o.out, m);
}

}  // namespace

Command add_build_graph(CLI::App& root) {
  auto* app = root.add_subcommand("build-graph", "Build the adjacency graph from polygons, a geohash grid, or a synthetic city");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  echo->add("geometry", o->geometry, "GeoJSON FeatureCollection of node polygons")->check(CLI::ExistingFile);
  echo->add("id-property", o->id_property, "Feature property holding the node id");
  echo->add("tolerance", o->tolerance, "Distance tolerance for shared borders");
  echo->add("min-shared-length", o->min_shared_length, "Minimum shared border length for an edge");
  echo->flag("lonlat", o->lonlat, "Geometry is lon/lat: project to metres before building edges (tolerances in metres)");
  o->covariates.add(*echo, false);
  echo->add("bounds", o->bounds, "Geohash mode: min_lon,min_lat,max_lon,max_lat")->delimiter(',');
  echo->add("resolution", o->resolution, "Geohash precision (4-7)");
  echo->add("max-water-fraction", o->max_water_fraction, "Drop cells above this water share (negative: off)");
  echo->add("min-population", o->min_population, "Drop cells below this population (negative: off)");
  echo->add("synthetic-grid", o->synthetic_grid, "Synthetic city of ROWSxCOLS jittered cells");
  echo->add("cell-size", o->cell_size, "Synthetic cell size in metres");
  echo->add("jitter", o->jitter, "Synthetic vertex jitter as a share of the cell size");
  echo->add("drop-fraction", o->drop_fraction, "Share of synthetic cells removed");
  echo->add("seed", o->seed, "Synthetic city seed");
  return {app, [o, echo] {
            const int modes = !o->synthetic_grid.empty() + !o->bounds.empty() +
                              (o->bounds.empty() && o->synthetic_grid.empty() && !o->geometry.empty());
            if (modes != 1) {
              throw CLI::ValidationError("build-graph needs exactly one of --geometry, --bounds, --synthetic-grid");
            }
            ensure_directory(o->out);
            Manifest m("build-graph", echo->effective());
            if (!o->synthetic_grid.empty()) {
              run_synthetic(*o, m);
            } else if (!o->bounds.empty()) {
              run_geohash(*o, m);
            } else {
              run_polygons(*o, m);
            }
            m.write(o->out);
          }};
}

}  // namespace spu::cli
