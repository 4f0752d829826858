#include "spatialpu/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "spatialpu/error.hpp"

namespace spu {

BaselinePrediction spatial_baseline(std::span<const std::uint8_t> reports, const SpatialGraph& graph) {
  if (reports.size() != graph.size()) throw InputError("reports do not match the graph size");
  BaselinePrediction out{"spatial", std::vector<double>(graph.size(), 0.0)};
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto nb = graph.neighbors(i);
    if (nb.empty()) throw InputError("node has no neighbors", graph.node_ids()[i]);
    std::size_t hits = 0;
    for (auto j : nb) hits += reports[j] ? 1 : 0;
    out.scores[i] = static_cast<double>(hits) / static_cast<double>(nb.size());
  }
  return out;
}

GPFit gp_regress(std::span<const std::uint8_t> reports, std::span<const geom::Point> centroids, const GPHyper& hyper,
                 const GPOptions& options) {
  const std::size_t n = reports.size();
  if (centroids.size() != n) throw InputError("centroids do not match the reports");
  if (n == 0) throw InputError("no training points");
  if (!(hyper.length_scale > 0.0) || !(hyper.noise >= 0.0)) throw InputError("invalid GP hyperparameters");

  GPFit fit;
  fit.hyper = hyper;
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = reports[i] ? 1.0 : 0.0;
  fit.mean = y.mean();
  const Eigen::VectorXd r = y.array() - fit.mean;
  fit.signal_variance = n > 1 ? r.squaredNorm() / static_cast<double>(n - 1) : 0.0;
  if (fit.signal_variance == 0.0) {
    // Constant labels: the posterior mean is the label everywhere.
    fit.scores.assign(n, std::clamp(fit.mean, 0.0, 1.0));
    fit.log_marginal = -std::numeric_limits<double>::infinity();
    return fit;
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd k(ni, ni);
  const double inv = 1.0 / (2.0 * hyper.length_scale * hyper.length_scale);
  for (Eigen::Index i = 0; i < ni; ++i) {
    k(i, i) = fit.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double dx = centroids[static_cast<std::size_t>(i)].x - centroids[static_cast<std::size_t>(j)].x;
      const double dy = centroids[static_cast<std::size_t>(i)].y - centroids[static_cast<std::size_t>(j)].y;
      k(i, j) = k(j, i) = fit.signal_variance * std::exp(-(dx * dx + dy * dy) * inv);
    }
  }
  const double noise_var = hyper.noise * hyper.noise;
  for (double jitter = options.initial_jitter; jitter <= options.max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd c = k;
    c.diagonal().array() += noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::MatrixXd& l = llt.matrixLLT();
    if ((l.diagonal().array() <= 0.0).any()) continue;
    const Eigen::VectorXd weights = llt.solve(r);
    const Eigen::VectorXd post = (k * weights).array() + fit.mean;
    fit.jitter = jitter;
    fit.log_marginal = -0.5 * r.dot(weights) - l.diagonal().array().log().sum() -
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    fit.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) fit.scores[i] = std::clamp(post(static_cast<Eigen::Index>(i)), 0.0, 1.0);
    return fit;
  }
  throw ModelError("GP kernel matrix is singular even with jitter " + std::to_string(options.max_jitter));
}

GPFit gp_select(std::span<const std::uint8_t> reports, std::span<const geom::Point> centroids,
                const GPOptions& options) {
  if (options.length_scales.empty() || options.noises.empty()) throw InputError("empty GP hyperparameter grid");
  GPFit best;
  bool have = false;
  for (double ls : options.length_scales) {
    for (double noise : options.noises) {
      GPFit f = gp_regress(reports, centroids, {ls, noise}, options);
      if (!have || f.log_marginal > best.log_marginal) {
        best = std::move(f);
        have = true;
      }
    }
  }
  return best;
}

BaselinePrediction gp_baseline(std::span<const std::uint8_t> reports, std::span<const geom::Point> centroids,
                               const GPOptions& options) {
  return {"gp", gp_select(reports, centroids, options).scores};
}

}  // namespace spu
