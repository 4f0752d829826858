#pragma once

#include <string>
#include <vector>

#include "spatialpu/spatial_graph.hpp"

namespace spu::testing {

inline SpatialGraph make_graph(std::size_t n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::string> ids;
  std::vector<geom::Point> centroids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("n" + std::to_string(i));
    centroids.push_back({static_cast<double>(i) * 100.0, 0.0});
  }
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
  return SpatialGraph(ids, centroids, std::vector<double>(n, 1.0), edges);
}

inline SpatialGraph path_graph(std::size_t n) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_graph(n, e);
}

inline SpatialGraph cycle_graph(std::size_t n) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return make_graph(n, e);
}

// Node 0 is the hub.
inline SpatialGraph star_graph(std::size_t n) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return make_graph(n, e);
}

inline SpatialGraph grid_graph(std::size_t rows, std::size_t cols, double spacing = 100.0) {
  std::vector<std::string> ids;
  std::vector<geom::Point> centroids;
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto i = static_cast<std::uint32_t>(r * cols + c);
      ids.push_back("g" + std::to_string(r) + "_" + std::to_string(c));
      centroids.push_back({static_cast<double>(c) * spacing, static_cast<double>(r) * spacing});
      if (c + 1 < cols) edges.push_back({i, i + 1});
      if (r + 1 < rows) edges.push_back({i, static_cast<std::uint32_t>(i + cols)});
    }
  }
  return SpatialGraph(ids, centroids, std::vector<double>(ids.size(), 1.0), edges);
}

}  // namespace spu::testing
