#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "basisrisk/margins.hpp"

namespace basisrisk {

enum class CopulaFamily {
  ClaytonSurvival,
  Gumbel,
  Frank,
  Gaussian,
  Independence,
  Comonotone,
};

std::string family_name(CopulaFamily family);
CopulaFamily family_from_name(const std::string& name);

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::Independence;
  // delta for the archimedean families, rho for Gaussian; unused otherwise.
  double parameter = 0.0;

  void validate() const;
};

struct UniformPairs {
  Eigen::ArrayXd v;
  Eigen::ArrayXd w;
};

// Joint CDF C(v, w).
double copula_value(const CopulaSpec& spec, double v, double w);

// Survival copula C*(v, w) = v + w - 1 + C(1-v, 1-w) = P(U >= 1-v, W >= 1-w).
double survival_copula_value(const CopulaSpec& spec, double v, double w);

UniformPairs sample_copula(const CopulaSpec& spec, std::int64_t n,
                           std::uint64_t seed);

double tau_to_param(CopulaFamily family, double tau);
double param_to_tau(CopulaFamily family, double parameter);

// lim_{u -> 0} C*(u, u) / u.
double upper_tail_dependence(const CopulaSpec& spec);

// P(theta >= t0 | X >= x0) = C*(S_theta(t0), S_X(x0)) / S_X(x0).
double pi_plus_analytic(const CopulaSpec& spec, const MarginSpec& margin_theta,
                        const MarginSpec& margin_x, double t0, double x0);

// The displayed formula (S_theta(t0) - C*(S_theta(t0), S_X(x0))) / F_X(x0),
// which equals P(theta >= t0 | X < x0).
double pi_minus_analytic(const CopulaSpec& spec, const MarginSpec& margin_theta,
                         const MarginSpec& margin_x, double t0, double x0);

// P(theta < t0 | X < x0), the complement of the displayed formula.
double pi_minus_complement_analytic(const CopulaSpec& spec,
                                    const MarginSpec& margin_theta,
                                    const MarginSpec& margin_x, double t0,
                                    double x0);

}  // namespace basisrisk
