#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "basisrisk/tail_metrics.hpp"

namespace basisrisk {

struct GpdFit {
  double threshold = 0.0;
  double gamma = 0.0;
  double sigma = 1.0;
  std::int64_t n_excess = 0;
  double log_likelihood = 0.0;
  double se_gamma = 0.0;
  double se_sigma = 0.0;
};

// Survival (1 + gamma x / sigma)^(-1/gamma), continuous exponential limit at
// gamma = 0.
double gpd_survival(double x, double gamma, double sigma);

Eigen::ArrayXd sample_gpd(std::int64_t n, double gamma, double sigma,
                          std::uint64_t seed, std::uint64_t stream = 0);

// Maximum likelihood on excesses (all positive, at least 30), via the
// one-dimensional profile over eta = gamma / sigma; standard errors from the
// observed information.
GpdFit fit_gpd(const Eigen::ArrayXd& excesses);

// Threshold at the empirical quantile, GPD on the exceedances above it.
GpdFit pot_fit(const Eigen::ArrayXd& values, double quantile_level);

struct QqPoint {
  double theoretical = 0.0;
  double empirical = 0.0;
};

// Empirical quantiles against mean-scaled exponential quantiles
// -log(1 - i/(n+1)).
std::vector<QqPoint> qq_exponential(const Eigen::ArrayXd& excesses);

// POT tail index of z = x - y.
GpdFit tail_index_of_difference(const PairedSample& sample,
                                double quantile_level);

double gpd_log_likelihood(const Eigen::ArrayXd& excesses, double gamma,
                          double sigma);

}  // namespace basisrisk
