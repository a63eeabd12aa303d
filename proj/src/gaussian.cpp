#include "basisrisk/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "basisrisk/rng.hpp"
#include "basisrisk/stats.hpp"

namespace basisrisk {

namespace {

// Conditional first and second moments of the standard normal above z.
double truncated_z_mean(double z) { return 1.0 / mills_ratio(z); }
double truncated_z_sq(double z) { return 1.0 + z / mills_ratio(z); }

}  // namespace

void GaussianPairSpec::validate() const {
  if (!(sigma_x > 0.0 && sigma_y > 0.0)) {
    throw std::domain_error("GaussianPairSpec: sigmas must be positive");
  }
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::domain_error("GaussianPairSpec: rho must be in (-1,1)");
  }
}

double gaussian_hazard(double s, double mu, double var) {
  if (!(var > 0.0)) throw std::domain_error("gaussian_hazard: variance must be positive");
  const double sigma = std::sqrt(var);
  const double z = (s - mu) / sigma;
  return 1.0 / (sigma * mills_ratio(z));
}

double cond_mean_diff_exact(const GaussianPairSpec& spec, double s) {
  spec.validate();
  const double k = spec.rho * spec.sigma_y / spec.sigma_x;
  const double h = gaussian_hazard(s, spec.mu_x, spec.sigma_x * spec.sigma_x);
  return (spec.mu_x - spec.mu_y) +
         (1.0 - k) * spec.sigma_x * spec.sigma_x * h;
}

double cond_mean_diff_asymptotic(const GaussianPairSpec& spec, double s) {
  spec.validate();
  const double k = spec.rho * spec.sigma_y / spec.sigma_x;
  return (spec.mu_x - spec.mu_y) + (1.0 - k) * (s - spec.mu_x);
}

double cond_sq_diff_exact(const GaussianPairSpec& spec, double s) {
  spec.validate();
  const double z = (s - spec.mu_x) / spec.sigma_x;
  const double m1z = truncated_z_mean(z);
  const double m2z = truncated_z_sq(z);

  // Moments of X above s from the standardized ones.
  const double m1x = spec.mu_x + spec.sigma_x * m1z;
  const double m2x = spec.mu_x * spec.mu_x +
                     2.0 * spec.mu_x * spec.sigma_x * m1z +
                     spec.sigma_x * spec.sigma_x * m2z;

  // Y given X is normal with mean mu_y + k (X - mu_x) and variance
  // sigma_y^2 (1 - rho^2); everything below follows by the tower rule.
  const double k = spec.rho * spec.sigma_y / spec.sigma_x;
  const double resid_var = spec.sigma_y * spec.sigma_y * (1.0 - spec.rho * spec.rho);

  const double e_y = spec.mu_y + k * (m1x - spec.mu_x);
  const double e_xy = spec.mu_y * m1x + k * (m2x - spec.mu_x * m1x);
  const double e_y2 = resid_var + spec.mu_y * spec.mu_y +
                      2.0 * spec.mu_y * k * (m1x - spec.mu_x) +
                      k * k * (m2x - 2.0 * spec.mu_x * m1x + spec.mu_x * spec.mu_x);
  (void)e_y;
  return m2x + e_y2 - 2.0 * e_xy;
}

double cond_sq_diff_asymptotic(const GaussianPairSpec& spec, double s) {
  spec.validate();
  const double k = spec.rho * spec.sigma_y / spec.sigma_x;
  return (1.0 - k) * (1.0 - k) * s * s / (spec.sigma_x * spec.sigma_x);
}

PairedSample sample_bivariate_gaussian(const GaussianPairSpec& spec,
                                       std::int64_t n, std::uint64_t seed) {
  spec.validate();
  if (n <= 0) throw std::domain_error("sample_bivariate_gaussian: n must be positive");
  Rng r1(seed, 0), r2(seed, 1);
  const double tail = std::sqrt(1.0 - spec.rho * spec.rho);
  PairedSample out;
  out.x = Eigen::ArrayXd(n);
  out.y = Eigen::ArrayXd(n);
  out.seed = seed;
  out.label = "bivariate_gaussian";
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z1 = r1.normal();
    const double z2 = r2.normal();
    out.x[i] = spec.mu_x + spec.sigma_x * z1;
    out.y[i] = spec.mu_y + spec.sigma_y * (spec.rho * z1 + tail * z2);
  }
  return out;
}

}  // namespace basisrisk
