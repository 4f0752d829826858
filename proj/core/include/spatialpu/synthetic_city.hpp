#pragma once

#include <cstdint>
#include <vector>

#include "spatialpu/covariates.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu {

// A jittered grid of quadrilateral "tracts" with smooth, correlated
// demographic fields. Used for fixtures, benchmarks and the simulation
// suites when no real geometry is at hand.
struct CityOptions {
  std::size_t rows = 16;
  std::size_t cols = 16;
  double cell_size = 1000.0;   // metres
  double jitter = 0.2;         // vertex jitter as a fraction of cell_size
  double drop_fraction = 0.0;  // cells removed at random (may split the city)
  std::uint64_t seed = 1;
};

struct SyntheticCity {
  std::vector<NodeGeometry> geometries;
  // Columns: population, median_age, median_income, bachelors_share,
  // white_share, owner_occupied_share.
  RawCovariates covariates;
};

SyntheticCity make_synthetic_city(const CityOptions& options);

// Rook adjacency plus connectivity repair over the city's cells.
SpatialGraph city_graph(const SyntheticCity& city);

// Standardized default feature set of the city, in graph order.
CovariateTable city_covariates(const SyntheticCity& city, const SpatialGraph& graph);

}  // namespace spu
