#include "spatialpu/spatial_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

#include "spatialpu/error.hpp"

namespace spu {

std::string_view to_string(EdgeProvenance p) {
  return p == EdgeProvenance::SharedBorder ? "shared-border" : "connectivity-repair";
}

EdgeProvenance parse_edge_provenance(std::string_view text) {
  if (text == "shared-border") return EdgeProvenance::SharedBorder;
  if (text == "connectivity-repair") return EdgeProvenance::ConnectivityRepair;
  throw InputError("unknown edge provenance '" + std::string(text) + "'", std::string(text));
}

SpatialGraph::SpatialGraph(std::vector<std::string> node_ids, std::vector<geom::Point> centroids,
                           std::vector<double> land_area, std::vector<Edge> edges)
    : node_ids_(std::move(node_ids)),
      centroids_(std::move(centroids)),
      land_area_(std::move(land_area)),
      edges_(std::move(edges)) {
  const std::size_t n = node_ids_.size();
  if (centroids_.size() != n || land_area_.size() != n) {
    throw InputError("node attribute arrays do not match the node count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(node_ids_[i], i).second) {
      throw InputError("duplicate node id '" + node_ids_[i] + "'", node_ids_[i]);
    }
  }
  for (auto& e : edges_) {
    if (e.u >= n || e.v >= n) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop at node '" + node_ids_[e.u] + "'", node_ids_[e.u]);
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].u == edges_[k - 1].u && edges_[k].v == edges_[k - 1].v) {
      throw InputError("duplicate edge " + node_ids_[edges_[k].u] + " - " + node_ids_[edges_[k].v]);
    }
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.u]++] = e.v;
    adjacency_[fill[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

bool SpatialGraph::adjacent(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
}

std::size_t SpatialGraph::index_of(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw InputError("unknown node id '" + std::string(id) + "'", std::string(id));
  return it->second;
}

bool SpatialGraph::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

std::vector<std::uint32_t> SpatialGraph::component_labels() const {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> label(size(), unset);
  std::uint32_t next = 0;
  std::vector<std::uint32_t> stack;
  for (std::size_t s = 0; s < size(); ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : neighbors(v)) {
        if (label[w] == unset) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

std::size_t SpatialGraph::component_count() const {
  const auto labels = component_labels();
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

SpatialGraph SpatialGraph::induced_subgraph(std::span<const std::size_t> keep) const {
  std::vector<std::size_t> order(keep.begin(), keep.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::vector<std::int64_t> remap(size(), -1);
  std::vector<std::string> ids;
  std::vector<geom::Point> cents;
  std::vector<double> areas;
  for (std::size_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = static_cast<std::int64_t>(k);
    ids.push_back(node_ids_[order[k]]);
    cents.push_back(centroids_[order[k]]);
    areas.push_back(land_area_[order[k]]);
  }
  std::vector<Edge> edges;
  for (const auto& e : edges_) {
    if (remap[e.u] >= 0 && remap[e.v] >= 0) {
      edges.push_back({static_cast<std::uint32_t>(remap[e.u]), static_cast<std::uint32_t>(remap[e.v]),
                       e.provenance});
    }
  }
  return SpatialGraph(std::move(ids), std::move(cents), std::move(areas), std::move(edges));
}

SpatialGraph build_adjacency_from_polygons(const std::vector<NodeGeometry>& geometries,
                                           const AdjacencyOptions& options) {
  const std::size_t n = geometries.size();
  std::vector<std::string> ids;
  std::vector<geom::Point> cents;
  std::vector<double> areas;
  std::vector<geom::BBox> boxes;
  std::vector<std::vector<geom::Segment>> segments;
  ids.reserve(n);
  for (const auto& g : geometries) {
    if (auto reason = geom::validate(g.shape)) {
      throw InputError("invalid geometry for node '" + g.id + "': " + *reason, g.id);
    }
    const auto ac = geom::area_centroid(g.shape);
    ids.push_back(g.id);
    cents.push_back(ac.centroid);
    areas.push_back(ac.area);
    boxes.push_back(geom::bbox(g.shape));
    segments.push_back(geom::boundary_segments(g.shape));
  }
  {
    std::vector<std::string> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) throw InputError("duplicate node id '" + *dup + "'", *dup);
  }

  // Sweep over x-sorted boxes to find candidate pairs.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return boxes[a].min_x < boxes[b].min_x; });
  const double pad = options.tolerance;
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = order[a];
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t j = order[b];
      if (boxes[j].min_x > boxes[i].max_x + pad) break;
      if (!boxes[i].intersects(boxes[j], pad)) continue;
      const double shared = geom::shared_boundary_length(segments[i], segments[j], options.tolerance);
      if (shared > options.min_shared_length) {
        edges.push_back({static_cast<std::uint32_t>(std::min(i, j)),
                         static_cast<std::uint32_t>(std::max(i, j)), EdgeProvenance::SharedBorder});
      }
    }
  }
  return SpatialGraph(std::move(ids), std::move(cents), std::move(areas), std::move(edges));
}

SpatialGraph repair_connectivity(const SpatialGraph& graph) {
  const auto labels = graph.component_labels();
  const std::size_t n = graph.size();
  if (n == 0 || *std::max_element(labels.begin(), labels.end()) == 0) return graph;

  // Closest-pair-first merging across components is Kruskal's algorithm on
  // the cross-component node pairs with the initial components pre-merged.
  struct Pair {
    double d;
    std::uint32_t i, j;
  };
  std::vector<Pair> pairs;
  const auto& c = graph.centroids();
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (labels[i] != labels[j]) pairs.push_back({geom::distance(c[i], c[j]), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.d, a.i, a.j) < std::tie(b.d, b.i, b.j);
  });

  const std::size_t comps = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::uint32_t> parent(comps);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Edge> edges = graph.edges();
  std::size_t remaining = comps;
  for (const auto& p : pairs) {
    if (remaining == 1) break;
    const auto a = find(labels[p.i]), b = find(labels[p.j]);
    if (a == b) continue;
    parent[std::max(a, b)] = std::min(a, b);
    edges.push_back({p.i, p.j, EdgeProvenance::ConnectivityRepair});
    --remaining;
  }
  return SpatialGraph(graph.node_ids(), graph.centroids(), graph.land_area(), std::move(edges));
}

}  // namespace spu
