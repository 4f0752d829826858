#include "spatialpu/synthetic_city.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "spatialpu/error.hpp"
#include "spatialpu/random.hpp"

namespace spu {

namespace {

// Sum of a few random plane waves with wavelengths of 3-10 cells.
class SmoothField {
 public:
  SmoothField(Rng& rng, double cell) {
    for (int k = 0; k < 5; ++k) {
      const double angle = 2.0 * std::numbers::pi * uniform01(rng);
      const double wavelength = cell * (3.0 + 7.0 * uniform01(rng));
      const double freq = 2.0 * std::numbers::pi / wavelength;
      waves_.push_back({freq * std::cos(angle), freq * std::sin(angle), 2.0 * std::numbers::pi * uniform01(rng)});
    }
  }
  double operator()(double x, double y) const {
    double s = 0.0;
    for (const auto& w : waves_) s += std::cos(w.kx * x + w.ky * y + w.phase);
    return s / std::sqrt(0.5 * static_cast<double>(waves_.size()));
  }

 private:
  struct Wave {
    double kx, ky, phase;
  };
  std::vector<Wave> waves_;
};

}  // namespace

SyntheticCity make_synthetic_city(const CityOptions& options) {
  if (options.rows == 0 || options.cols == 0) throw InputError("city needs at least one row and column");
  if (!(options.cell_size > 0.0)) throw InputError("cell_size must be positive", "cell_size");
  if (!(options.jitter >= 0.0 && options.jitter < 0.5)) throw InputError("jitter must lie in [0, 0.5)", "jitter");
  if (!(options.drop_fraction >= 0.0 && options.drop_fraction < 1.0)) {
    throw InputError("drop_fraction must lie in [0, 1)", "drop_fraction");
  }
  Rng rng(mix_seed(options.seed, 0));
  const std::size_t vr = options.rows + 1, vc = options.cols + 1;
  std::vector<geom::Point> vertex(vr * vc);
  for (std::size_t r = 0; r < vr; ++r) {
    for (std::size_t c = 0; c < vc; ++c) {
      const double jx = (uniform01(rng) * 2.0 - 1.0) * options.jitter * options.cell_size;
      const double jy = (uniform01(rng) * 2.0 - 1.0) * options.jitter * options.cell_size;
      vertex[r * vc + c] = {static_cast<double>(c) * options.cell_size + jx,
                            static_cast<double>(r) * options.cell_size + jy};
    }
  }

  const SmoothField z1(rng, options.cell_size), z2(rng, options.cell_size), z3(rng, options.cell_size);
  SyntheticCity city;
  city.covariates.columns = {"population", "median_age", "median_income",
                             "bachelors_share", "white_share", "owner_occupied_share"};
  std::vector<std::array<double, 6>> rows;
  for (std::size_t r = 0; r < options.rows; ++r) {
    for (std::size_t c = 0; c < options.cols; ++c) {
      const bool drop = uniform01(rng) < options.drop_fraction;
      const double e[6] = {standard_normal(rng), standard_normal(rng), standard_normal(rng),
                           standard_normal(rng), standard_normal(rng), standard_normal(rng)};
      if (drop) continue;
      geom::Ring ring{vertex[r * vc + c], vertex[r * vc + c + 1], vertex[(r + 1) * vc + c + 1],
                      vertex[(r + 1) * vc + c]};
      const double x = (static_cast<double>(c) + 0.5) * options.cell_size;
      const double y = (static_cast<double>(r) + 0.5) * options.cell_size;
      const double a = z1(x, y), b = z2(x, y), d = z3(x, y);
      std::string id = "c" + std::to_string(r) + "_" + std::to_string(c);
      city.geometries.push_back({id, {geom::Polygon{ring, {}}}});
      city.covariates.ids.push_back(std::move(id));
      rows.push_back({500.0 + 3500.0 * std::exp(0.5 * a + 0.5 * e[0]), 38.0 + 4.0 * b + 4.0 * e[1],
                      60000.0 * std::exp(0.3 * d + 0.15 * a + 0.3 * e[2]), logistic(-0.5 + 0.7 * d + 0.6 * e[3]),
                      logistic(0.2 + 0.6 * d - 0.4 * a + 0.7 * e[4]), logistic(-0.3 - 0.5 * a + 0.4 * b + 0.6 * e[5])});
    }
  }
  if (rows.empty()) throw InputError("every cell was dropped", "drop_fraction");
  city.covariates.values.resize(static_cast<Eigen::Index>(rows.size()), 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) city.covariates.values(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return city;
}

SpatialGraph city_graph(const SyntheticCity& city) {
  return repair_connectivity(build_adjacency_from_polygons(city.geometries));
}

CovariateTable city_covariates(const SyntheticCity& city, const SpatialGraph& graph) {
  const auto aligned = align_covariates(city.covariates, graph, default_feature_selection());
  return standardize_covariates(aligned.features, default_feature_selection(), default_feature_selection(),
                                aligned.population);
}

}  // namespace spu
