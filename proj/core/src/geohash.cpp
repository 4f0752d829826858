#include "spatialpu/geohash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "spatialpu/error.hpp"

namespace spu::geohash {
namespace {

constexpr std::string_view kAlphabet = "0123456789bcdefghjkmnpqrstuvwxyz";
constexpr double kEarthRadius = 6371008.8;

int lon_bits(int precision) { return (5 * precision + 1) / 2; }
int lat_bits(int precision) { return (5 * precision) / 2; }

int char_value(char c) {
  const auto pos = kAlphabet.find(c);
  if (pos == std::string_view::npos) {
    throw InputError("invalid geohash character '" + std::string(1, c) + "'");
  }
  return static_cast<int>(pos);
}

double cell_width(int precision) { return 360.0 / std::ldexp(1.0, lon_bits(precision)); }
double cell_height(int precision) { return 180.0 / std::ldexp(1.0, lat_bits(precision)); }

LonLatBox cell_box(CellIndex c, int precision) {
  const double w = cell_width(precision), h = cell_height(precision);
  return {-180.0 + static_cast<double>(c.ix) * w, -90.0 + static_cast<double>(c.iy) * h,
          -180.0 + static_cast<double>(c.ix + 1) * w, -90.0 + static_cast<double>(c.iy + 1) * h};
}

}  // namespace

CellIndex cell_index(std::string_view hash) {
  if (hash.empty()) throw InputError("empty geohash");
  CellIndex c;
  bool is_lon = true;
  for (char ch : hash) {
    const int v = char_value(ch);
    for (int b = 4; b >= 0; --b) {
      const int bit = (v >> b) & 1;
      if (is_lon) {
        c.ix = (c.ix << 1) | bit;
      } else {
        c.iy = (c.iy << 1) | bit;
      }
      is_lon = !is_lon;
    }
  }
  return c;
}

std::string hash_of(CellIndex cell, int precision) {
  const int nlon = lon_bits(precision), nlat = lat_bits(precision);
  std::string out;
  out.reserve(static_cast<std::size_t>(precision));
  int lon_pos = nlon - 1, lat_pos = nlat - 1;
  bool is_lon = true;
  int acc = 0, count = 0;
  for (int k = 0; k < 5 * precision; ++k) {
    int bit;
    if (is_lon) {
      bit = static_cast<int>((cell.ix >> lon_pos--) & 1);
    } else {
      bit = static_cast<int>((cell.iy >> lat_pos--) & 1);
    }
    is_lon = !is_lon;
    acc = (acc << 1) | bit;
    if (++count == 5) {
      out.push_back(kAlphabet[static_cast<std::size_t>(acc)]);
      acc = 0;
      count = 0;
    }
  }
  return out;
}

std::string encode(double lat, double lon, int precision) {
  if (precision < 1 || precision > 12) throw InputError("geohash precision must be in [1, 12]");
  if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
    throw InputError("coordinate outside the lon/lat domain");
  }
  const long long nx = 1LL << lon_bits(precision), ny = 1LL << lat_bits(precision);
  CellIndex c;
  c.ix = std::min(nx - 1, static_cast<long long>(std::floor((lon + 180.0) / cell_width(precision))));
  c.iy = std::min(ny - 1, static_cast<long long>(std::floor((lat + 90.0) / cell_height(precision))));
  return hash_of(c, precision);
}

LonLatBox decode(std::string_view hash) {
  return cell_box(cell_index(hash), static_cast<int>(hash.size()));
}

std::optional<std::string> neighbor(std::string_view hash, Direction dir) {
  const int p = static_cast<int>(hash.size());
  CellIndex c = cell_index(hash);
  const long long nx = 1LL << lon_bits(p), ny = 1LL << lat_bits(p);
  switch (dir) {
    case Direction::North:
      if (c.iy + 1 >= ny) return std::nullopt;
      ++c.iy;
      break;
    case Direction::South:
      if (c.iy == 0) return std::nullopt;
      --c.iy;
      break;
    case Direction::East:
      c.ix = (c.ix + 1) % nx;
      break;
    case Direction::West:
      c.ix = (c.ix + nx - 1) % nx;
      break;
  }
  return hash_of(c, p);
}

std::vector<std::string> rook_neighbors(std::string_view hash) {
  std::vector<std::string> out;
  for (auto d : {Direction::North, Direction::South, Direction::East, Direction::West}) {
    if (auto h = neighbor(hash, d)) out.push_back(*h);
  }
  return out;
}

geom::Point project(double lon, double lat, double origin_lon, double origin_lat) {
  constexpr double rad = std::numbers::pi / 180.0;
  return {kEarthRadius * std::cos(origin_lat * rad) * (lon - origin_lon) * rad,
          kEarthRadius * (lat - origin_lat) * rad};
}

std::vector<NodeGeometry> project_geometries(std::vector<NodeGeometry> shapes) {
  if (shapes.empty()) return shapes;
  geom::BBox box = geom::bbox(shapes.front().shape);
  for (const auto& g : shapes) box.expand(geom::bbox(g.shape));
  const double lon0 = 0.5 * (box.min_x + box.max_x);
  const double lat0 = 0.5 * (box.min_y + box.max_y);
  for (auto& g : shapes) {
    for (auto& poly : g.shape) {
      for (auto& p : poly.outer) p = project(p.x, p.y, lon0, lat0);
      for (auto& hole : poly.holes) {
        for (auto& p : hole) p = project(p.x, p.y, lon0, lat0);
      }
    }
  }
  return shapes;
}

Grid build_grid(const LonLatBox& bounds, int resolution, const Filters& filters,
                const SourceLayer* source) {
  if (resolution < 4 || resolution > 7) throw InputError("geohash resolution must be in [4, 7]");
  if (!(bounds.min_x <= bounds.max_x && bounds.min_y <= bounds.max_y)) {
    throw InputError("empty bounding box");
  }
  if ((filters.max_water_fraction || filters.min_population) && source == nullptr) {
    throw InputError("geohash filters require a polygon source layer with population", "source");
  }
  if (source) {
    const std::size_t m = source->polygons.size();
    if (source->population.size() != m || source->covariates.size() != m) {
      throw InputError("source layer arrays are misaligned", "source");
    }
  }

  const double w = cell_width(resolution), h = cell_height(resolution);
  const long long ix0 = static_cast<long long>(std::floor((bounds.min_x + 180.0) / w));
  const long long iy0 = static_cast<long long>(std::floor((bounds.min_y + 90.0) / h));
  const long long ix1 = std::max(ix0, static_cast<long long>(std::ceil((bounds.max_x + 180.0) / w)) - 1);
  const long long iy1 = std::max(iy0, static_cast<long long>(std::ceil((bounds.max_y + 90.0) / h)) - 1);
  const long long ncols = ix1 - ix0 + 1, nrows = iy1 - iy0 + 1;
  const auto ncells = static_cast<std::size_t>(ncols * nrows);
  auto slot = [&](long long ix, long long iy) { return static_cast<std::size_t>((iy - iy0) * ncols + (ix - ix0)); };

  std::vector<double> land(ncells, 0.0), pop(ncells, 0.0), weight(ncells, 0.0);
  std::size_t nfeat = source ? source->feature_names.size() : 0;
  std::vector<std::vector<double>> cov(ncells, std::vector<double>(nfeat, 0.0));
  if (source) {
    for (std::size_t t = 0; t < source->polygons.size(); ++t) {
      const auto& shape = source->polygons[t].shape;
      const double tract_area = geom::area_centroid(shape).area;
      if (!(tract_area > 0.0)) continue;
      const auto tb = geom::bbox(shape);
      const long long a0 = std::max(ix0, static_cast<long long>(std::floor((tb.min_x + 180.0) / w)));
      const long long a1 = std::min(ix1, static_cast<long long>(std::floor((tb.max_x + 180.0) / w)));
      const long long b0 = std::max(iy0, static_cast<long long>(std::floor((tb.min_y + 90.0) / h)));
      const long long b1 = std::min(iy1, static_cast<long long>(std::floor((tb.max_y + 90.0) / h)));
      for (long long iy = b0; iy <= b1; ++iy) {
        for (long long ix = a0; ix <= a1; ++ix) {
          const double overlap = geom::clipped_area(shape, cell_box({ix, iy}, resolution));
          if (overlap <= 0.0) continue;
          const std::size_t s = slot(ix, iy);
          land[s] += overlap;
          const double share = source->population[t] * overlap / tract_area;
          pop[s] += share;
          weight[s] += share;
          for (std::size_t f = 0; f < nfeat; ++f) cov[s][f] += share * source->covariates[t][f];
        }
      }
    }
  }

  const double cell_deg_area = w * h;
  std::vector<double> water(ncells, 0.0);
  std::vector<bool> keep(ncells, true);
  Grid grid;
  for (std::size_t s = 0; s < ncells; ++s) {
    water[s] = source ? std::clamp(1.0 - land[s] / cell_deg_area, 0.0, 1.0) : 0.0;
  }
  std::size_t alive = ncells;
  if (filters.max_water_fraction) {
    for (std::size_t s = 0; s < ncells; ++s) {
      if (keep[s] && water[s] > *filters.max_water_fraction) {
        keep[s] = false;
        --alive;
        ++grid.dropped_by_water;
      }
    }
    if (alive == 0) throw InputError("every geohash cell exceeds the max water fraction filter", "max_water_fraction");
  }
  if (filters.min_population) {
    for (std::size_t s = 0; s < ncells; ++s) {
      if (keep[s] && pop[s] < *filters.min_population) {
        keep[s] = false;
        --alive;
        ++grid.dropped_by_population;
      }
    }
    if (alive == 0) throw InputError("every geohash cell falls below the min population filter", "min_population");
  }

  const double origin_lon = 0.5 * (bounds.min_x + bounds.max_x);
  const double origin_lat = 0.5 * (bounds.min_y + bounds.max_y);
  std::vector<long long> node_of(ncells, -1);
  std::vector<std::string> ids;
  std::vector<geom::Point> cents;
  std::vector<double> areas;
  for (long long iy = iy0; iy <= iy1; ++iy) {
    for (long long ix = ix0; ix <= ix1; ++ix) {
      const std::size_t s = slot(ix, iy);
      if (!keep[s]) continue;
      node_of[s] = static_cast<long long>(ids.size());
      const auto box = cell_box({ix, iy}, resolution);
      const auto lo = project(box.min_x, box.min_y, origin_lon, origin_lat);
      const auto hi = project(box.max_x, box.max_y, origin_lon, origin_lat);
      ids.push_back(hash_of({ix, iy}, resolution));
      cents.push_back({0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)});
      areas.push_back((hi.x - lo.x) * (hi.y - lo.y) * (1.0 - water[s]));
      grid.population.push_back(pop[s]);
      grid.water_fraction.push_back(water[s]);
      std::vector<double> row(nfeat, std::numeric_limits<double>::quiet_NaN());
      if (weight[s] > 0.0) {
        for (std::size_t f = 0; f < nfeat; ++f) row[f] = cov[s][f] / weight[s];
      }
      grid.covariates.push_back(std::move(row));
    }
  }
  std::vector<Edge> edges;
  for (long long iy = iy0; iy <= iy1; ++iy) {
    for (long long ix = ix0; ix <= ix1; ++ix) {
      const auto a = node_of[slot(ix, iy)];
      if (a < 0) continue;
      if (ix + 1 <= ix1) {
        const auto b = node_of[slot(ix + 1, iy)];
        if (b >= 0) edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), EdgeProvenance::SharedBorder});
      }
      if (iy + 1 <= iy1) {
        const auto b = node_of[slot(ix, iy + 1)];
        if (b >= 0) edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), EdgeProvenance::SharedBorder});
      }
    }
  }
  if (source) grid.feature_names = source->feature_names;
  grid.graph = repair_connectivity(SpatialGraph(std::move(ids), std::move(cents), std::move(areas), std::move(edges)));
  return grid;
}

}  // namespace spu::geohash
