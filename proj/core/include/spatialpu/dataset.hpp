#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spatialpu/observation.hpp"
#include "spatialpu/spatial_graph.hpp"
#include "spatialpu/timestamp.hpp"

namespace spu {

// One raw report: either a node id or a point to be located.
struct RawReport {
  std::optional<std::string> node_id;
  std::optional<geom::Point> point;
  Timestamp time;
};

struct ReportColumns {
  std::string time = "created_date";
  std::string node_id;  // used when non-empty
  std::string x = "longitude";
  std::string y = "latitude";
  int default_offset_minutes = 0;  // for timestamps without an explicit offset
};

struct ReportFile {
  std::vector<RawReport> reports;
  std::size_t skipped_missing = 0;  // rows without a timestamp or location
};

ReportFile read_reports_csv(const std::string& path, const ReportColumns& columns);

// Resolves point reports to the containing polygon. Ids that do not name a
// graph node and points outside every polygon are counted and dropped.
struct ResolvedReports {
  std::vector<std::size_t> node;
  std::vector<Timestamp> time;
  std::size_t unmatched_ids = 0;
  std::size_t uncontained_points = 0;
};

ResolvedReports resolve_reports(const std::vector<RawReport>& reports, const SpatialGraph& graph,
                                const std::vector<NodeGeometry>* geometries);

struct CutoffRule {
  double fraction = 0.08;                  // ignored when `at` is set
  std::optional<Timestamp> at;
};

struct Window {
  std::optional<Timestamp> start;  // inclusive
  std::optional<Timestamp> end;    // exclusive
};

struct EventDataset {
  ReportVector train;
  ReportVector test;
  Timestamp cutoff;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t outside_window = 0;
  std::vector<std::string> warnings;
};

// Training: nodes with a report at or before the cutoff. Test: nodes with a
// report after it, inside the window. With a fractional rule the cutoff is
// the earliest report time at which the share of reporting nodes reaches
// the fraction.
EventDataset build_dataset(const ResolvedReports& reports, std::size_t node_count, const CutoffRule& rule,
                           const Window& window = {});

}  // namespace spu
