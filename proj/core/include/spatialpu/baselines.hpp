#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spatialpu/geometry.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu {

struct BaselinePrediction {
  std::string model;
  std::vector<double> scores;  // in [0, 1], node order
};

// Fraction of each node's neighbors with a training report.
BaselinePrediction spatial_baseline(std::span<const std::uint8_t> reports, const SpatialGraph& graph);

struct GPHyper {
  double length_scale = 1000.0;  // same units as the centroids
  double noise = 0.1;            // observation noise standard deviation
};

struct GPOptions {
  std::vector<double> length_scales{1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5), 1e4, std::pow(10.0, 4.5)};
  std::vector<double> noises{0.05, 0.1, 0.2};
  double initial_jitter = 1e-8;
  double max_jitter = 1e-4;
};

struct GPFit {
  GPHyper hyper;
  double mean = 0.0;             // constant prior mean (training label mean)
  double signal_variance = 0.0;  // training label variance
  double log_marginal = 0.0;
  double jitter = 0.0;
  std::vector<double> scores;
};

// Regression on the 0/1 labels with a squared-exponential kernel, constant
// mean equal to the label mean and signal variance equal to the label
// variance. Posterior means at the training inputs, clipped to [0, 1].
// Throws ModelError if the kernel stays singular after jitter escalation.
GPFit gp_regress(std::span<const std::uint8_t> reports, std::span<const geom::Point> centroids, const GPHyper& hyper,
                 const GPOptions& options = {});

// Hyperparameters maximizing the marginal likelihood over the option grid;
// ties go to the first grid entry.
GPFit gp_select(std::span<const std::uint8_t> reports, std::span<const geom::Point> centroids,
                const GPOptions& options = {});

BaselinePrediction gp_baseline(std::span<const std::uint8_t> reports, std::span<const geom::Point> centroids,
                               const GPOptions& options = {});

}  // namespace spu
