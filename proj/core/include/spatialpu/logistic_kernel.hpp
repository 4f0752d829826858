#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "spatialpu/covariates.hpp"
#include "spatialpu/ising.hpp"
#include "spatialpu/priors.hpp"
#include "spatialpu/random.hpp"

namespace spu {

// Bayesian logistic regression posterior with independent normal priors.
// The design matrix carries the intercept as its first column.
class LogisticPosterior {
 public:
  LogisticPosterior(Eigen::MatrixXd design, Eigen::VectorXd labels, Eigen::VectorXd prior_mean,
                    Eigen::VectorXd prior_sd);

  Eigen::Index dim() const { return prior_mean_.size(); }
  Eigen::Index rows() const { return design_.rows(); }

  double log_density(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  // Negative Hessian (posterior precision at beta).
  Eigen::MatrixXd precision(const Eigen::VectorXd& beta) const;

  // Damped Newton from `start` to the (unique) posterior mode.
  Eigen::VectorXd mode(const Eigen::VectorXd& start) const;

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd labels_;
  Eigen::VectorXd prior_mean_;
  Eigen::VectorXd prior_precision_;
};

struct LogisticKernelStats {
  std::size_t proposals = 0;
  std::size_t accepts = 0;
  std::size_t prior_draws = 0;  // outer calls with no A_i = +1 node
};

// Builds the conditional posterior of [alpha0, alpha_1..alpha_M] given the
// reports on the nodes whose latent state is +1.
LogisticPosterior reporting_posterior(std::span<const Spin> state, std::span<const std::uint8_t> reports,
                                      const CovariateTable& covariates, const PriorConfig& prior);

// Runs `inner_steps` independence Metropolis-Hastings steps whose target is
// the conditional posterior above, starting from `current`. The proposal is
// a multivariate Student-t (4 degrees of freedom) centred at the posterior
// mode with the inverse mode precision as scale; the mode is a function of
// (A, T, X) only, so the kernel leaves the posterior invariant. With no
// positive node the conditional is the prior and a fresh prior draw is
// returned.
Eigen::VectorXd sample_heterogeneous_alphas(std::span<const Spin> state, std::span<const std::uint8_t> reports,
                                            const CovariateTable& covariates, const Eigen::VectorXd& current,
                                            const PriorConfig& prior, std::size_t inner_steps, Rng& rng,
                                            LogisticKernelStats* stats = nullptr);

}  // namespace spu
