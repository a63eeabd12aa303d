#pragma once

#include <cstdint>

#include "basisrisk/tail_metrics.hpp"

namespace basisrisk {

struct GaussianPairSpec {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double rho = 0.0;

  void validate() const;
};

// Hazard rate pdf/survival of a N(mu, var) variable at s, stable deep into
// the upper tail (standardized arguments up to 40 and beyond).
double gaussian_hazard(double s, double mu, double var);

// E[X - Y | X >= s], exact.
double cond_mean_diff_exact(const GaussianPairSpec& spec, double s);
// Leading-order equivalent (mu_x - mu_y) + (1 - rho sigma_y/sigma_x)(s - mu_x).
double cond_mean_diff_asymptotic(const GaussianPairSpec& spec, double s);

// E[(X - Y)^2 | X >= s], exact, assembled from the conditional law of Y
// given X.
double cond_sq_diff_exact(const GaussianPairSpec& spec, double s);
// Leading term (1 - rho sigma_y/sigma_x)^2 s^2 / sigma_x^2.
double cond_sq_diff_asymptotic(const GaussianPairSpec& spec, double s);

PairedSample sample_bivariate_gaussian(const GaussianPairSpec& spec,
                                       std::int64_t n, std::uint64_t seed);

}  // namespace basisrisk
