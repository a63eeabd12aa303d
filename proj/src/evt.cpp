#include "basisrisk/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "basisrisk/rng.hpp"
#include "basisrisk/stats.hpp"

namespace basisrisk {

namespace {

constexpr double kEtaZero = 1e-11;  // |eta| below this is the exponential fit

// Profile parameter eta = gamma / sigma. For fixed eta the inner maximum is
// gamma(eta) = mean(log1p(eta x)), giving the reduced objective below.
double profile_gamma(const Eigen::ArrayXd& x, double eta) {
  return (eta * x).log1p().mean();
}

double profile_loglik(const Eigen::ArrayXd& x, double eta) {
  const auto n = static_cast<double>(x.size());
  if (std::abs(eta) < kEtaZero) {
    return -n * (std::log(x.mean()) + 1.0);
  }
  const double g = profile_gamma(x, eta);
  if (!(g / eta > 0.0)) return -std::numeric_limits<double>::infinity();
  return -n * (std::log(g / eta) + g + 1.0);
}

}  // namespace

double gpd_survival(double x, double gamma, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("gpd_survival: sigma must be positive");
  if (x < 0.0) throw std::domain_error("gpd_survival: x must be nonnegative");
  if (gamma == 0.0) return std::exp(-x / sigma);
  const double u = gamma * x / sigma;
  if (1.0 + u <= 0.0) {
    if (gamma < 0.0) throw std::domain_error("gpd_survival: x beyond the support bound");
    return 0.0;
  }
  // exp(-log1p(u)/gamma) keeps the exponential limit smooth as gamma -> 0.
  return std::exp(-std::log1p(u) / gamma);
}

Eigen::ArrayXd sample_gpd(std::int64_t n, double gamma, double sigma,
                          std::uint64_t seed, std::uint64_t stream) {
  if (n <= 0) throw std::domain_error("sample_gpd: n must be positive");
  if (!(sigma > 0.0)) throw std::domain_error("sample_gpd: sigma must be positive");
  Rng rng(seed, stream);
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double e = rng.exponential();
    out[i] = (gamma == 0.0) ? sigma * e : sigma * std::expm1(gamma * e) / gamma;
  }
  return out;
}

double gpd_log_likelihood(const Eigen::ArrayXd& excesses, double gamma,
                          double sigma) {
  const auto n = static_cast<double>(excesses.size());
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  if (std::abs(gamma) < 1e-12) {
    return -n * std::log(sigma) - excesses.sum() / sigma;
  }
  const Eigen::ArrayXd t = 1.0 + (gamma / sigma) * excesses;
  if ((t <= 0.0).any()) return -std::numeric_limits<double>::infinity();
  return -n * std::log(sigma) - (1.0 + 1.0 / gamma) * t.log().sum();
}

GpdFit fit_gpd(const Eigen::ArrayXd& excesses) {
  const Eigen::Index n = excesses.size();
  if (n < 30) throw std::domain_error("fit_gpd: needs at least 30 excesses");
  if ((excesses <= 0.0).any()) {
    throw std::domain_error("fit_gpd: excesses must be strictly positive");
  }
  const double xmax = excesses.maxCoeff();
  const double xmin = excesses.minCoeff();
  if (xmax == xmin) throw std::domain_error("fit_gpd: degenerate all-equal excesses");
  const double mean = excesses.mean();

  // Coarse scan over eta, log-spaced on both sides of zero within the domain
  // eta > -1/xmax, then golden-section refinement around the best cell.
  std::vector<double> etas;
  etas.push_back(0.0);
  for (int k = -60; k <= 40; ++k) {
    const double mag = std::pow(10.0, 0.1 * static_cast<double>(k)) / mean;
    etas.push_back(mag);
    const double neg = -mag;
    if (neg > -1.0 / xmax) etas.push_back(neg);
  }
  etas.push_back(-(1.0 - 1e-9) / xmax);
  std::sort(etas.begin(), etas.end());

  double best_eta = 0.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double ll = profile_loglik(excesses, etas[i]);
    if (ll > best_ll) {
      best_ll = ll;
      best_eta = etas[i];
      best_idx = i;
    }
  }
  if (!std::isfinite(best_ll)) {
    throw std::runtime_error("fit_gpd: profile likelihood not finite anywhere (n=" +
                             std::to_string(n) + ")");
  }
  const double lo = etas[best_idx > 0 ? best_idx - 1 : 0];
  const double hi = etas[std::min(best_idx + 1, etas.size() - 1)];
  if (hi > lo) {
    const double span = hi - lo;
    best_eta = golden_section_min(
        [&](double eta) { return -profile_loglik(excesses, eta); }, lo, hi,
        1e-10 * std::max(1.0, span), 500);
  }

  GpdFit fit;
  fit.n_excess = n;
  if (std::abs(best_eta) < kEtaZero) {
    fit.gamma = 0.0;
    fit.sigma = mean;
  } else {
    fit.gamma = profile_gamma(excesses, best_eta);
    fit.sigma = fit.gamma / best_eta;
  }
  fit.log_likelihood = gpd_log_likelihood(excesses, fit.gamma, fit.sigma);
  if (!std::isfinite(fit.log_likelihood) || !(fit.sigma > 0.0)) {
    throw std::runtime_error(
        "fit_gpd: optimizer failed to converge (eta=" + std::to_string(best_eta) +
        ", gamma=" + std::to_string(fit.gamma) + ", sigma=" + std::to_string(fit.sigma) + ")");
  }

  // Observed information by central differences on the full likelihood.
  const double hg = 1e-5 * std::max(1.0, std::abs(fit.gamma));
  const double hs = 1e-5 * fit.sigma;
  const auto ll = [&](double g, double s) {
    return gpd_log_likelihood(excesses, g, s);
  };
  const double l0 = fit.log_likelihood;
  const double dgg = (ll(fit.gamma + hg, fit.sigma) - 2.0 * l0 +
                      ll(fit.gamma - hg, fit.sigma)) / (hg * hg);
  const double dss = (ll(fit.gamma, fit.sigma + hs) - 2.0 * l0 +
                      ll(fit.gamma, fit.sigma - hs)) / (hs * hs);
  const double dgs = (ll(fit.gamma + hg, fit.sigma + hs) -
                      ll(fit.gamma + hg, fit.sigma - hs) -
                      ll(fit.gamma - hg, fit.sigma + hs) +
                      ll(fit.gamma - hg, fit.sigma - hs)) / (4.0 * hg * hs);
  const double det = dgg * dss - dgs * dgs;
  if (std::isfinite(det) && det > 0.0 && dgg < 0.0) {
    fit.se_gamma = std::sqrt(-dss / det);
    fit.se_sigma = std::sqrt(-dgg / det);
  } else {
    fit.se_gamma = std::numeric_limits<double>::quiet_NaN();
    fit.se_sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

GpdFit pot_fit(const Eigen::ArrayXd& values, double quantile_level) {
  if (!(quantile_level > 0.5 && quantile_level < 1.0)) {
    throw std::domain_error("pot_fit: quantile level must be in (0.5, 1)");
  }
  const double u = empirical_quantile(values, quantile_level);
  std::vector<double> exc;
  exc.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > u) exc.push_back(values[i] - u);
  }
  Eigen::ArrayXd excesses =
      Eigen::Map<Eigen::ArrayXd>(exc.data(), static_cast<Eigen::Index>(exc.size()));
  GpdFit fit = fit_gpd(excesses);
  fit.threshold = u;
  return fit;
}

std::vector<QqPoint> qq_exponential(const Eigen::ArrayXd& excesses) {
  if (excesses.size() < 2) throw std::domain_error("qq_exponential: needs >= 2 excesses");
  const Eigen::ArrayXd sorted = sorted_copy(excesses);
  const double mean = sorted.mean();
  const auto n = static_cast<double>(sorted.size());
  std::vector<QqPoint> out(static_cast<std::size_t>(sorted.size()));
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 1.0) / (n + 1.0);
    out[static_cast<std::size_t>(i)] = {-std::log(1.0 - p) * mean, sorted[i]};
  }
  return out;
}

GpdFit tail_index_of_difference(const PairedSample& sample,
                                double quantile_level) {
  sample.validate();
  return pot_fit(sample.x - sample.y, quantile_level);
}

}  // namespace basisrisk
