#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatialpu/geometry.hpp"

namespace spu {

enum class EdgeProvenance : std::uint8_t { SharedBorder, ConnectivityRepair };

std::string_view to_string(EdgeProvenance p);
EdgeProvenance parse_edge_provenance(std::string_view text);

struct Edge {
  std::uint32_t u = 0;  // u < v
  std::uint32_t v = 0;
  EdgeProvenance provenance = EdgeProvenance::SharedBorder;
};

// Undirected, simple graph over nodes with planar (projected, metre)
// centroids and land areas. Immutable once built; adjacency is stored in
// CSR form for the samplers.
class SpatialGraph {
 public:
  SpatialGraph() = default;

  // Throws InputError on duplicate ids, self-loops, duplicate edges, or
  // out-of-range endpoints. Edge endpoints are normalised to u < v and the
  // edge list sorted.
  SpatialGraph(std::vector<std::string> node_ids, std::vector<geom::Point> centroids,
               std::vector<double> land_area, std::vector<Edge> edges);

  std::size_t size() const noexcept { return node_ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
  const std::vector<geom::Point>& centroids() const noexcept { return centroids_; }
  const std::vector<double>& land_area() const noexcept { return land_area_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  bool adjacent(std::size_t i, std::size_t j) const;

  // Index of a node id; throws InputError when unknown.
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

  // Component label per node (labels dense, ordered by lowest member).
  std::vector<std::uint32_t> component_labels() const;
  std::size_t component_count() const;
  bool is_connected() const { return component_count() <= 1; }

  // Graph restricted to `keep` (indices, any order); output keeps input order.
  SpatialGraph induced_subgraph(std::span<const std::size_t> keep) const;

 private:
  std::vector<std::string> node_ids_;
  std::vector<geom::Point> centroids_;
  std::vector<double> land_area_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct AdjacencyOptions {
  // Perpendicular distance under which boundary segments count as collinear.
  double tolerance = 1e-6;
  // Minimum shared boundary length for two nodes to be adjacent (rook rule).
  double min_shared_length = 1e-6;
};

struct NodeGeometry {
  std::string id;
  geom::MultiPolygon shape;
};

// Rook adjacency: nodes are adjacent when their boundaries share a segment
// of positive length; point contact does not count. Centroid and land area
// come from the geometry. The result may be disconnected.
SpatialGraph build_adjacency_from_polygons(const std::vector<NodeGeometry>& geometries,
                                           const AdjacencyOptions& options = {});

// Greedy closest-components-first merging: while more than one component
// remains, join the globally closest pair of nodes (centroid distance) that
// lie in different components. Ties go to the lowest (i, j). Added edges are
// tagged ConnectivityRepair. Connected input is returned unchanged.
SpatialGraph repair_connectivity(const SpatialGraph& graph);

}  // namespace spu
