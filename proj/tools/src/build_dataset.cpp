#include "commands.hpp"
#include "spatialpu/dataset.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/serialization.hpp"

namespace spu::cli {

namespace {

struct Options {
  std::string out = ".";
  GraphFiles graph;
  std::string reports;
  std::string geometry;
  std::string id_property = "GEOID";
  std::string time_column = "created_date";
  std::string node_column;
  std::string x_column = "longitude";
  std::string y_column = "latitude";
  std::string utc_offset = "+00:00";
  double cutoff_fraction = 0.08;
  std::string cutoff_time;
  std::string window_start;
  std::string window_end;
};

}  // namespace

Command add_build_dataset(CLI::App& root) {
  auto* app = root.add_subcommand("build-dataset", "Split timestamped reports into training and test indicators");
  auto o = std::make_shared<Options>();
  auto echo = std::make_shared<OptionEcho>(app);
  echo->add("out", o->out, "Output directory");
  o->graph.add(*echo);
  echo->add("reports", o->reports, "Report CSV")->required()->check(CLI::ExistingFile);
  echo->add("geometry", o->geometry, "GeoJSON polygons for locating point reports")->check(CLI::ExistingFile);
  echo->add("id-property", o->id_property, "Feature property holding the node id");
  echo->add("time-column", o->time_column, "Timestamp column");
  echo->add("node-column", o->node_column, "Node id column (point columns are used when empty)");
  echo->add("x-column", o->x_column, "Point x / longitude column");
  echo->add("y-column", o->y_column, "Point y / latitude column");
  echo->add("utc-offset", o->utc_offset, "Offset applied to timestamps without one, e.g. -04:00");
  echo->add("cutoff-fraction", o->cutoff_fraction, "Share of nodes reporting at the training cutoff");
  echo->add("cutoff-time", o->cutoff_time, "Explicit training cutoff (overrides the fraction)");
  echo->add("window-start", o->window_start, "First instant of the study window (inclusive)");
  echo->add("window-end", o->window_end, "End of the study window (exclusive)");
  return {app, [o, echo] {
            ensure_directory(o->out);
            Manifest m("build-dataset", echo->effective());
            const SpatialGraph graph = o->graph.load(m);
            m.input("reports", o->reports);
            const int offset = parse_utc_offset(o->utc_offset);
            ReportColumns cols{o->time_column, o->node_column, o->x_column, o->y_column, offset};
            const ReportFile file = read_reports_csv(o->reports, cols);
            std::vector<NodeGeometry> shapes;
            if (!o->geometry.empty()) {
              m.input("geometry", o->geometry);
              shapes = io::read_geojson_polygons(o->geometry, o->id_property);
            }
            const auto resolved = resolve_reports(file.reports, graph, o->geometry.empty() ? nullptr : &shapes);
            CutoffRule rule{o->cutoff_fraction, std::nullopt};
            if (!o->cutoff_time.empty()) rule.at = parse_timestamp(o->cutoff_time, offset);
            Window window;
            if (!o->window_start.empty()) window.start = parse_timestamp(o->window_start, offset);
            if (!o->window_end.empty()) window.end = parse_timestamp(o->window_end, offset);
            const EventDataset ds = build_dataset(resolved, graph.size(), rule, window);
            io::write_dataset_csv(join_path(o->out, "dataset.csv"), graph, ds.train, ds.test);
            m.output(o->out, "dataset.csv");
            auto& n = m.notes();
            n["nodes"] = graph.size();
            n["train_nodes"] = ds.train_count;
            n["test_nodes"] = ds.test_count;
            n["cutoff"] = format_timestamp(ds.cutoff);
            n["reports_read"] = file.reports.size();
            n["rows_missing_fields"] = file.skipped_missing;
            n["unmatched_node_ids"] = resolved.unmatched_ids;
            n["points_outside_polygons"] = resolved.uncontained_points;
            n["outside_window"] = ds.outside_window;
            n["warnings"] = ds.warnings;
            m.write(o->out);
          }};
}

}  // namespace spu::cli
