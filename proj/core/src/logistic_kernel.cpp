#include "spatialpu/logistic_kernel.hpp"

#include <cmath>
#include <limits>

#include "spatialpu/error.hpp"

namespace spu {
namespace {

constexpr double kProposalDof = 4.0;

}  // namespace

LogisticPosterior::LogisticPosterior(Eigen::MatrixXd design, Eigen::VectorXd labels, Eigen::VectorXd prior_mean,
                                     Eigen::VectorXd prior_sd)
    : design_(std::move(design)), labels_(std::move(labels)), prior_mean_(std::move(prior_mean)) {
  if (design_.cols() != prior_mean_.size() || prior_sd.size() != prior_mean_.size() ||
      labels_.size() != design_.rows()) {
    throw InputError("logistic posterior dimensions are inconsistent");
  }
  prior_precision_ = prior_sd.array().square().inverse();
}

double LogisticPosterior::log_density(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd eta = design_ * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += labels_(i) > 0.5 ? log_logistic(eta(i)) : log_logistic(-eta(i));
  }
  const Eigen::VectorXd d = beta - prior_mean_;
  return ll - 0.5 * (d.array().square() * prior_precision_.array()).sum();
}

Eigen::VectorXd LogisticPosterior::gradient(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd eta = design_ * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid(i) = labels_(i) - logistic(eta(i));
  return design_.transpose() * resid - (prior_precision_.array() * (beta - prior_mean_).array()).matrix();
}

Eigen::MatrixXd LogisticPosterior::precision(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd eta = design_ * beta;
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double p = logistic(eta(i));
    w(i) = p * (1.0 - p);
  }
  Eigen::MatrixXd h = design_.transpose() * w.asDiagonal() * design_;
  h.diagonal() += prior_precision_;
  return h;
}

Eigen::VectorXd LogisticPosterior::mode(const Eigen::VectorXd& start) const {
  Eigen::VectorXd beta = start;
  double current = log_density(beta);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd step = precision(beta).llt().solve(gradient(beta));
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    double value = log_density(next);
    while (value < current && scale > 1e-6) {
      scale *= 0.5;
      next = beta + scale * step;
      value = log_density(next);
    }
    const double moved = (next - beta).norm();
    beta = next;
    current = value;
    if (moved < 1e-11 * (1.0 + beta.norm())) break;
  }
  return beta;
}

LogisticPosterior reporting_posterior(std::span<const Spin> state, std::span<const std::uint8_t> reports,
                                      const CovariateTable& covariates, const PriorConfig& prior) {
  const std::size_t n = state.size();
  if (reports.size() != n || covariates.rows() != n) throw InputError("state, reports and covariates are misaligned");
  const std::size_t m = covariates.cols();
  std::size_t n_pos = 0;
  for (auto a : state) n_pos += a == 1;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n_pos), static_cast<Eigen::Index>(m + 1));
  Eigen::VectorXd labels(static_cast<Eigen::Index>(n_pos));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] != 1) continue;
    design(r, 0) = 1.0;
    design.row(r).tail(static_cast<Eigen::Index>(m)) = covariates.values.row(static_cast<Eigen::Index>(i));
    labels(r) = reports[i] ? 1.0 : 0.0;
    ++r;
  }
  return LogisticPosterior(std::move(design), std::move(labels), prior.logistic_prior_mean(m),
                           prior.logistic_prior_sd(m));
}

Eigen::VectorXd sample_heterogeneous_alphas(std::span<const Spin> state, std::span<const std::uint8_t> reports,
                                            const CovariateTable& covariates, const Eigen::VectorXd& current,
                                            const PriorConfig& prior, std::size_t inner_steps, Rng& rng,
                                            LogisticKernelStats* stats) {
  const auto m = static_cast<Eigen::Index>(covariates.cols());
  if (current.size() != m + 1) throw InputError("coefficient vector does not match the covariate count");
  const auto post = reporting_posterior(state, reports, covariates, prior);
  if (post.rows() == 0) {
    if (stats) ++stats->prior_draws;
    const Eigen::VectorXd mean = prior.logistic_prior_mean(static_cast<std::size_t>(m));
    const Eigen::VectorXd sd = prior.logistic_prior_sd(static_cast<std::size_t>(m));
    Eigen::VectorXd draw(m + 1);
    for (Eigen::Index k = 0; k <= m; ++k) draw(k) = mean(k) + sd(k) * standard_normal(rng);
    return draw;
  }

  const Eigen::VectorXd center = post.mode(current);
  const Eigen::MatrixXd prec = post.precision(center);
  const Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) throw ModelError("logistic posterior precision is not positive definite");
  const double d = static_cast<double>(m + 1);
  const Eigen::MatrixXd upper = llt.matrixU();

  // Log proposal density up to a constant: delta' P delta = |U delta|^2.
  auto log_proposal = [&](const Eigen::VectorXd& beta) {
    const double q = (upper * (beta - center)).squaredNorm();
    return -0.5 * (kProposalDof + d) * std::log1p(q / kProposalDof);
  };

  Eigen::VectorXd beta = current;
  double log_weight = post.log_density(beta) - log_proposal(beta);
  std::chi_squared_distribution<double> chi2(kProposalDof);
  for (std::size_t step = 0; step < inner_steps; ++step) {
    Eigen::VectorXd z(m + 1);
    for (Eigen::Index k = 0; k <= m; ++k) z(k) = standard_normal(rng);
    const double scale = std::sqrt(kProposalDof / chi2(rng));
    // U' U = P, so U^{-1} z has covariance P^{-1}.
    const Eigen::VectorXd proposal =
        center + scale * llt.matrixU().solve(z);
    const double proposal_weight = post.log_density(proposal) - log_proposal(proposal);
    if (stats) ++stats->proposals;
    if (std::log(uniform01(rng)) < proposal_weight - log_weight) {
      beta = proposal;
      log_weight = proposal_weight;
      if (stats) ++stats->accepts;
    }
  }
  return beta;
}

}  // namespace spu
