#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatialpu/geometry.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu::geohash {

// Longitude/latitude bounding box in degrees (x = lon, y = lat).
using LonLatBox = geom::BBox;

std::string encode(double lat, double lon, int precision);

// Cell bounds in degrees.
LonLatBox decode(std::string_view hash);

enum class Direction { North, South, East, West };

// Edge-sharing neighbour; wraps in longitude, std::nullopt past a pole.
std::optional<std::string> neighbor(std::string_view hash, Direction dir);

// Four rook neighbours that exist (N, S, E, W order).
std::vector<std::string> rook_neighbors(std::string_view hash);

struct CellIndex {
  long long ix = 0;  // longitude column
  long long iy = 0;  // latitude row
};

CellIndex cell_index(std::string_view hash);
std::string hash_of(CellIndex cell, int precision);

struct Filters {
  std::optional<double> max_water_fraction;
  std::optional<double> min_population;
};

// Polygon layer (lon/lat degrees) whose population and covariates are
// projected onto the grid. Tract polygons count as land.
struct SourceLayer {
  std::vector<NodeGeometry> polygons;
  std::vector<double> population;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> covariates;  // row per polygon
};

struct Grid {
  SpatialGraph graph;  // ids are geohash strings; centroids/areas projected (m, m²)
  std::vector<double> population;
  std::vector<double> water_fraction;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> covariates;  // row per cell, NaN when no population overlaps
  std::size_t dropped_by_water = 0;
  std::size_t dropped_by_population = 0;
};

// One node per cell of the given resolution intersecting `bounds`, with
// rook adjacency between edge-sharing cells, filters applied in order
// (water, then population), and connectivity repaired. Cell population is
// the area-share of each overlapping polygon's population; cell covariates
// are averages of the polygon covariates weighted by that population.
// Throws InputError naming the filter that left the grid empty.
Grid build_grid(const LonLatBox& bounds, int resolution, const Filters& filters,
                const SourceLayer* source = nullptr);

// Local equirectangular projection about `origin` (degrees) to metres.
geom::Point project(double lon, double lat, double origin_lon, double origin_lat);

// Projects lon/lat polygons about the centre of their joint bounding box.
std::vector<NodeGeometry> project_geometries(std::vector<NodeGeometry> shapes);

}  // namespace spu::geohash
