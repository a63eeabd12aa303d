#include "basisrisk/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "basisrisk/rng.hpp"
#include "basisrisk/stats.hpp"

namespace basisrisk {

namespace {

// Substream ids per sampler component, so draw counts in one component never
// shift another and every family is replayable from the master seed alone.
enum Stream : std::uint64_t {
  kStreamPrimary = 0,
  kStreamSecondary = 1,
  kStreamFrailty = 2,
};

void check_prob(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(what) + " must be in [0,1]");
  }
}

double clayton_value(double v, double w, double delta) {
  if (v == 0.0 || w == 0.0) return 0.0;
  if (v == 1.0) return w;
  if (w == 1.0) return v;
  const double s = std::pow(v, -delta) + std::pow(w, -delta) - 1.0;
  if (s <= 0.0) return 0.0;  // only reachable for delta < 0
  return std::pow(s, -1.0 / delta);
}

double gumbel_value(double v, double w, double delta) {
  if (v == 0.0 || w == 0.0) return 0.0;
  if (v == 1.0) return w;
  if (w == 1.0) return v;
  const double a = std::pow(-std::log(v), delta);
  const double b = std::pow(-std::log(w), delta);
  return std::exp(-std::pow(a + b, 1.0 / delta));
}

double frank_value(double v, double w, double delta) {
  if (v == 0.0 || w == 0.0) return 0.0;
  if (v == 1.0) return w;
  if (w == 1.0) return v;
  return -std::log1p(std::expm1(-delta * v) * std::expm1(-delta * w) /
                     std::expm1(-delta)) /
         delta;
}

double gaussian_value(double v, double w, double rho) {
  if (v == 0.0 || w == 0.0) return 0.0;
  if (v == 1.0) return w;
  if (w == 1.0) return v;
  return bivariate_normal_cdf(normal_quantile(v), normal_quantile(w), rho);
}

// First Debye function D1(x) = (1/x) * integral_0^x t / (e^t - 1) dt.
double debye1(double x) {
  if (x == 0.0) return 1.0;
  const auto integrand = [](double t) {
    if (std::abs(t) < 1e-8) return 1.0 - 0.5 * t;  // t/(e^t - 1) near 0
    return t / std::expm1(t);
  };
  return integrate(integrand, 0.0, x, 1e-12) / x;
}

double frank_tau_of_delta(double delta) {
  return 1.0 - (4.0 / delta) * (1.0 - debye1(delta));
}

UniformPairs sample_independence(std::int64_t n, std::uint64_t seed) {
  Rng r1(seed, kStreamPrimary), r2(seed, kStreamSecondary);
  UniformPairs out{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.v[i] = r1.uniform();
    out.w[i] = r2.uniform();
  }
  return out;
}

UniformPairs sample_comonotone(std::int64_t n, std::uint64_t seed) {
  Rng r1(seed, kStreamPrimary);
  UniformPairs out{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.v[i] = r1.uniform();
    out.w[i] = out.v[i];
  }
  return out;
}

// Conditional-distribution inversion: w solves C_{2|1}(w | v) = p.
UniformPairs sample_frank(std::int64_t n, double delta, std::uint64_t seed) {
  Rng r1(seed, kStreamPrimary), r2(seed, kStreamSecondary);
  UniformPairs out{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  const double em = std::expm1(-delta);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = r1.uniform();
    const double p = r2.uniform();
    const double a = std::exp(-delta * v);
    out.v[i] = v;
    out.w[i] = -std::log1p(p * em / (a - p * (a - 1.0))) / delta;
  }
  return out;
}

// Positive stable S(alpha, 1) by the Chambers-Mallows-Stuck form, used as the
// Archimedean frailty: U = exp(-(E/S)^alpha) has the Gumbel copula.
UniformPairs sample_gumbel(std::int64_t n, double delta, std::uint64_t seed) {
  if (delta == 1.0) return sample_independence(n, seed);
  Rng re1(seed, kStreamPrimary), re2(seed, kStreamSecondary), rs(seed, kStreamFrailty);
  UniformPairs out{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  const double alpha = 1.0 / delta;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = rs.uniform() * std::numbers::pi;
    const double w = rs.exponential();
    const double a = std::pow(std::pow(std::sin(alpha * t), alpha) *
                                  std::pow(std::sin((1.0 - alpha) * t), 1.0 - alpha) /
                                  std::sin(t),
                              1.0 / (1.0 - alpha));
    const double stable = std::pow(a / w, (1.0 - alpha) / alpha);
    out.v[i] = std::exp(-std::pow(re1.exponential() / stable, alpha));
    out.w[i] = std::exp(-std::pow(re2.exponential() / stable, alpha));
  }
  return out;
}

UniformPairs sample_clayton_survival(std::int64_t n, double delta,
                                     std::uint64_t seed) {
  UniformPairs out{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  if (delta > 0.0) {
    // Gamma frailty for standard Clayton, then the survival flip.
    Rng re1(seed, kStreamPrimary), re2(seed, kStreamSecondary), rg(seed, kStreamFrailty);
    const double inv = -1.0 / delta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double g = rg.gamma(1.0 / delta);
      const double u1 = std::pow(1.0 + re1.exponential() / g, inv);
      const double u2 = std::pow(1.0 + re2.exponential() / g, inv);
      out.v[i] = 1.0 - u1;
      out.w[i] = 1.0 - u2;
    }
    return out;
  }
  // Negative-dependence corner: conditional inversion of standard Clayton.
  Rng r1(seed, kStreamPrimary), r2(seed, kStreamSecondary);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = r1.uniform();
    const double p = r2.uniform();
    const double w = std::pow(
        std::max(std::pow(v, -delta) * (std::pow(p, -delta / (1.0 + delta)) - 1.0) + 1.0,
                 0.0),
        -1.0 / delta);
    out.v[i] = 1.0 - v;
    out.w[i] = 1.0 - w;
  }
  return out;
}

UniformPairs sample_gaussian(std::int64_t n, double rho, std::uint64_t seed) {
  Rng r1(seed, kStreamPrimary), r2(seed, kStreamSecondary);
  UniformPairs out{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  const double tail = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z1 = r1.normal();
    const double z2 = r2.normal();
    out.v[i] = normal_cdf(z1);
    out.w[i] = normal_cdf(rho * z1 + tail * z2);
  }
  return out;
}

}  // namespace

std::string family_name(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::ClaytonSurvival: return "clayton_survival";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::Frank: return "frank";
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Comonotone: return "comonotone";
  }
  throw std::logic_error("unknown copula family");
}

CopulaFamily family_from_name(const std::string& name) {
  if (name == "clayton_survival" || name == "clayton-survival" || name == "clayton")
    return CopulaFamily::ClaytonSurvival;
  if (name == "gumbel") return CopulaFamily::Gumbel;
  if (name == "frank") return CopulaFamily::Frank;
  if (name == "gaussian") return CopulaFamily::Gaussian;
  if (name == "independence") return CopulaFamily::Independence;
  if (name == "comonotone") return CopulaFamily::Comonotone;
  throw std::domain_error("unknown copula family: " + name);
}

void CopulaSpec::validate() const {
  switch (family) {
    case CopulaFamily::ClaytonSurvival:
      if (!(parameter >= -1.0) || parameter == 0.0) {
        throw std::domain_error("ClaytonSurvival: delta must be >= -1 and nonzero");
      }
      return;
    case CopulaFamily::Gumbel:
      if (!(parameter >= 1.0)) throw std::domain_error("Gumbel: delta must be >= 1");
      return;
    case CopulaFamily::Frank:
      if (parameter == 0.0 || !std::isfinite(parameter)) {
        throw std::domain_error("Frank: delta must be finite and nonzero");
      }
      return;
    case CopulaFamily::Gaussian:
      if (!(parameter > -1.0 && parameter < 1.0)) {
        throw std::domain_error("Gaussian: rho must be in (-1,1)");
      }
      return;
    case CopulaFamily::Independence:
    case CopulaFamily::Comonotone:
      return;
  }
  throw std::logic_error("unknown copula family");
}

double copula_value(const CopulaSpec& spec, double v, double w) {
  spec.validate();
  check_prob(v, "copula_value: v");
  check_prob(w, "copula_value: w");
  switch (spec.family) {
    case CopulaFamily::Independence:
      return v * w;
    case CopulaFamily::Comonotone:
      return std::min(v, w);
    case CopulaFamily::Frank:
      return frank_value(v, w, spec.parameter);
    case CopulaFamily::Gumbel:
      return gumbel_value(v, w, spec.parameter);
    case CopulaFamily::Gaussian:
      return gaussian_value(v, w, spec.parameter);
    case CopulaFamily::ClaytonSurvival:
      // Survival transform of standard Clayton.
      return v + w - 1.0 + clayton_value(1.0 - v, 1.0 - w, spec.parameter);
  }
  throw std::logic_error("unknown copula family");
}

double survival_copula_value(const CopulaSpec& spec, double v, double w) {
  check_prob(v, "survival_copula_value: v");
  check_prob(w, "survival_copula_value: w");
  return v + w - 1.0 + copula_value(spec, 1.0 - v, 1.0 - w);
}

UniformPairs sample_copula(const CopulaSpec& spec, std::int64_t n,
                           std::uint64_t seed) {
  spec.validate();
  if (n <= 0) throw std::domain_error("sample_copula: n must be positive");
  switch (spec.family) {
    case CopulaFamily::Independence: return sample_independence(n, seed);
    case CopulaFamily::Comonotone: return sample_comonotone(n, seed);
    case CopulaFamily::Frank: return sample_frank(n, spec.parameter, seed);
    case CopulaFamily::Gumbel: return sample_gumbel(n, spec.parameter, seed);
    case CopulaFamily::ClaytonSurvival:
      return sample_clayton_survival(n, spec.parameter, seed);
    case CopulaFamily::Gaussian: return sample_gaussian(n, spec.parameter, seed);
  }
  throw std::logic_error("unknown copula family");
}

double tau_to_param(CopulaFamily family, double tau) {
  switch (family) {
    case CopulaFamily::ClaytonSurvival:
      if (!(tau > 0.0 && tau < 1.0)) {
        throw std::domain_error("tau_to_param(ClaytonSurvival): tau must be in (0,1)");
      }
      return 2.0 * tau / (1.0 - tau);
    case CopulaFamily::Gumbel:
      if (!(tau > 0.0 && tau < 1.0)) {
        throw std::domain_error("tau_to_param(Gumbel): tau must be in (0,1)");
      }
      return 1.0 / (1.0 - tau);
    case CopulaFamily::Frank: {
      if (!(tau > -1.0 && tau < 1.0) || tau == 0.0) {
        throw std::domain_error("tau_to_param(Frank): tau must be in (-1,1), nonzero");
      }
      const double sign = tau > 0.0 ? 1.0 : -1.0;
      const double target = std::abs(tau);
      const double delta = find_root(
          [target](double d) { return frank_tau_of_delta(d) - target; }, 1e-6,
          50.0, 1e-13, 300);
      return sign * delta;
    }
    case CopulaFamily::Gaussian:
      if (!(tau > -1.0 && tau < 1.0)) {
        throw std::domain_error("tau_to_param(Gaussian): tau must be in (-1,1)");
      }
      return std::sin(0.5 * std::numbers::pi * tau);
    case CopulaFamily::Independence:
      if (tau != 0.0) throw std::domain_error("tau_to_param(Independence): tau must be 0");
      return 0.0;
    case CopulaFamily::Comonotone:
      if (tau != 1.0) throw std::domain_error("tau_to_param(Comonotone): tau must be 1");
      return 0.0;
  }
  throw std::logic_error("unknown copula family");
}

double param_to_tau(CopulaFamily family, double parameter) {
  CopulaSpec{family, parameter}.validate();
  switch (family) {
    case CopulaFamily::ClaytonSurvival:
      // Kendall tau is invariant under the survival flip.
      return parameter / (parameter + 2.0);
    case CopulaFamily::Gumbel:
      return (parameter - 1.0) / parameter;
    case CopulaFamily::Frank:
      return frank_tau_of_delta(parameter);
    case CopulaFamily::Gaussian:
      return 2.0 * std::asin(parameter) / std::numbers::pi;
    case CopulaFamily::Independence:
      return 0.0;
    case CopulaFamily::Comonotone:
      return 1.0;
  }
  throw std::logic_error("unknown copula family");
}

double upper_tail_dependence(const CopulaSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case CopulaFamily::Gumbel:
      return 2.0 - std::pow(2.0, 1.0 / spec.parameter);
    case CopulaFamily::ClaytonSurvival:
      return spec.parameter > 0.0 ? std::pow(2.0, -1.0 / spec.parameter) : 0.0;
    case CopulaFamily::Frank:
    case CopulaFamily::Gaussian:
    case CopulaFamily::Independence:
      return 0.0;
    case CopulaFamily::Comonotone:
      return 1.0;
  }
  throw std::logic_error("unknown copula family");
}

double pi_plus_analytic(const CopulaSpec& spec, const MarginSpec& margin_theta,
                        const MarginSpec& margin_x, double t0, double x0) {
  const double st = margin_theta.survival(t0);
  const double sx = margin_x.survival(x0);
  if (sx == 0.0) throw std::domain_error("pi_plus_analytic: S_X(x0) is zero");
  return survival_copula_value(spec, st, sx) / sx;
}

double pi_minus_analytic(const CopulaSpec& spec, const MarginSpec& margin_theta,
                         const MarginSpec& margin_x, double t0, double x0) {
  const double st = margin_theta.survival(t0);
  const double sx = margin_x.survival(x0);
  const double fx = 1.0 - sx;
  if (fx == 0.0) throw std::domain_error("pi_minus_analytic: F_X(x0) is zero");
  return (st - survival_copula_value(spec, st, sx)) / fx;
}

double pi_minus_complement_analytic(const CopulaSpec& spec,
                                    const MarginSpec& margin_theta,
                                    const MarginSpec& margin_x, double t0,
                                    double x0) {
  return 1.0 - pi_minus_analytic(spec, margin_theta, margin_x, t0, x0);
}

}  // namespace basisrisk
