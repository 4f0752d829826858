#include "spatialpu/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"

namespace spu {

ReportFile read_reports_csv(const std::string& path, const ReportColumns& columns) {
  const csv::Table table = csv::read_file(path);
  const std::size_t tcol = table.column(columns.time);
  std::optional<std::size_t> idcol, xcol, ycol;
  if (!columns.node_id.empty()) {
    idcol = table.column(columns.node_id);
  } else {
    xcol = table.column(columns.x);
    ycol = table.column(columns.y);
  }
  ReportFile out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string context = path + " row " + std::to_string(r + 2);
    if (csv::is_missing(row[tcol])) {
      ++out.skipped_missing;
      continue;
    }
    RawReport rep;
    rep.time = parse_timestamp(row[tcol], columns.default_offset_minutes);
    if (idcol) {
      if (csv::is_missing(row[*idcol])) {
        ++out.skipped_missing;
        continue;
      }
      rep.node_id = row[*idcol];
    } else {
      if (csv::is_missing(row[*xcol]) || csv::is_missing(row[*ycol])) {
        ++out.skipped_missing;
        continue;
      }
      rep.point = geom::Point{csv::parse_double(row[*xcol], context), csv::parse_double(row[*ycol], context)};
    }
    out.reports.push_back(std::move(rep));
  }
  return out;
}

ResolvedReports resolve_reports(const std::vector<RawReport>& reports, const SpatialGraph& graph,
                                const std::vector<NodeGeometry>* geometries) {
  ResolvedReports out;
  std::vector<std::size_t> geom_node;
  std::vector<geom::BBox> boxes;
  if (geometries) {
    for (const auto& g : *geometries) {
      geom_node.push_back(graph.contains(g.id) ? graph.index_of(g.id) : graph.size());
      boxes.push_back(geom::bbox(g.shape));
    }
  }
  for (const auto& r : reports) {
    std::optional<std::size_t> node;
    if (r.node_id) {
      if (graph.contains(*r.node_id)) {
        node = graph.index_of(*r.node_id);
      } else {
        ++out.unmatched_ids;
      }
    } else if (r.point) {
      if (geometries == nullptr) throw InputError("point reports need polygon geometry");
      const geom::BBox pt{r.point->x, r.point->y, r.point->x, r.point->y};
      for (std::size_t g = 0; g < geometries->size(); ++g) {
        if (geom_node[g] < graph.size() && boxes[g].intersects(pt) && geom::contains((*geometries)[g].shape, *r.point)) {
          node = geom_node[g];
          break;
        }
      }
      if (!node) ++out.uncontained_points;
    }
    if (node) {
      out.node.push_back(*node);
      out.time.push_back(r.time);
    }
  }
  return out;
}

EventDataset build_dataset(const ResolvedReports& reports, std::size_t node_count, const CutoffRule& rule,
                           const Window& window) {
  if (reports.node.size() != reports.time.size()) throw InputError("report nodes and times are misaligned");
  if (node_count == 0) throw InputError("graph has no nodes");
  if (!rule.at && !(rule.fraction > 0.0 && rule.fraction <= 1.0)) {
    throw InputError("cutoff fraction must lie in (0, 1]; a zero threshold gives an empty training set",
                     "cutoff_fraction");
  }
  EventDataset out;
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < reports.node.size(); ++r) {
    if (reports.node[r] >= node_count) throw InputError("report refers to a node outside the graph");
    const Timestamp t = reports.time[r];
    if ((window.start && t < *window.start) || (window.end && !(t < *window.end))) {
      ++out.outside_window;
      continue;
    }
    order.push_back(r);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reports.time[a] < reports.time[b]; });

  if (rule.at) {
    out.cutoff = *rule.at;
  } else {
    const auto needed = static_cast<std::size_t>(std::ceil(rule.fraction * static_cast<double>(node_count) - 1e-9));
    std::vector<std::uint8_t> seen(node_count, 0);
    std::size_t distinct = 0;
    bool reached = false;
    for (auto r : order) {
      if (!seen[reports.node[r]]) {
        seen[reports.node[r]] = 1;
        ++distinct;
      }
      if (distinct >= needed) {
        out.cutoff = reports.time[r];
        reached = true;
        break;
      }
    }
    if (!reached) {
      throw InputError("reporting share never reaches the cutoff fraction; maximum attained is " +
                           std::to_string(static_cast<double>(distinct) / static_cast<double>(node_count)),
                       "cutoff_fraction");
    }
  }

  out.train.assign(node_count, 0);
  out.test.assign(node_count, 0);
  for (auto r : order) {
    (reports.time[r] <= out.cutoff ? out.train : out.test)[reports.node[r]] = 1;
  }
  out.train_count = static_cast<std::size_t>(std::count(out.train.begin(), out.train.end(), 1));
  out.test_count = static_cast<std::size_t>(std::count(out.test.begin(), out.test.end(), 1));
  if (out.train_count == 0) throw InputError("training set is empty at the chosen cutoff", "cutoff");
  if (out.test_count == 0) out.warnings.push_back("no reports after the cutoff; the test set is empty");
  return out;
}

}  // namespace spu
