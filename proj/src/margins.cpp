#include "basisrisk/margins.hpp"

#include <cmath>
#include <stdexcept>

#include "basisrisk/rng.hpp"
#include "basisrisk/stats.hpp"

namespace basisrisk {

void ParetoSpec::validate() const {
  if (!(u > 0.0)) throw std::domain_error("ParetoSpec: scale u must be positive");
  if (!(b > 0.0)) throw std::domain_error("ParetoSpec: shape b must be positive");
}

void PayoffTransform::validate() const {
  if (!(beta > 0.0)) throw std::domain_error("PayoffTransform: beta must be positive");
  if (!std::isfinite(alpha)) throw std::domain_error("PayoffTransform: alpha must be finite");
}

double TransformedParetoSpec::scale() const {
  return std::pow(base.u, transform.beta) * std::exp(transform.alpha);
}

void TransformedParetoSpec::validate() const {
  base.validate();
  transform.validate();
}

double pareto_survival(double t, const ParetoSpec& spec) {
  spec.validate();
  if (t < spec.u) throw std::domain_error("pareto_survival: t below the scale u");
  return std::pow(spec.u / t, spec.b);
}

double pareto_quantile(double p, const ParetoSpec& spec) {
  spec.validate();
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::domain_error("pareto_quantile: p must be in [0,1)");
  }
  return spec.u * std::pow(1.0 - p, -1.0 / spec.b);
}

Eigen::ArrayXd sample_pareto(std::int64_t n, const ParetoSpec& spec,
                             std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  if (n <= 0) throw std::domain_error("sample_pareto: n must be positive");
  Rng rng(seed, stream);
  Eigen::ArrayXd out(n);
  const double inv_b = 1.0 / spec.b;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = spec.u * std::pow(1.0 - rng.uniform(), -inv_b);
  }
  return out;
}

double payoff_transform(double theta, const PayoffTransform& t) {
  t.validate();
  if (!(theta > 0.0)) throw std::domain_error("payoff_transform: theta must be positive");
  return std::exp(t.alpha) * std::pow(theta, t.beta);
}

Eigen::ArrayXd payoff_transform(const Eigen::ArrayXd& theta,
                                const PayoffTransform& t) {
  t.validate();
  if ((theta <= 0.0).any()) {
    throw std::domain_error("payoff_transform: theta must be positive");
  }
  return std::exp(t.alpha) * theta.pow(t.beta);
}

std::optional<double> transformed_moment(const TransformedParetoSpec& spec,
                                         int k) {
  spec.validate();
  if (k < 1) throw std::domain_error("transformed_moment: order k must be >= 1");
  const double kb = static_cast<double>(k) * spec.transform.beta;
  if (spec.base.b <= kb) return std::nullopt;
  return std::exp(static_cast<double>(k) * spec.transform.alpha) * spec.base.b *
         std::pow(spec.base.u, kb) / (spec.base.b - kb);
}

MarginSpec::MarginSpec(ParetoSpec spec) : spec_(spec) { spec.validate(); }

MarginSpec::MarginSpec(TransformedParetoSpec spec) : spec_(spec) { spec.validate(); }

MarginSpec::MarginSpec(GaussianMargin spec) : spec_(spec) {
  if (!(spec.sigma > 0.0)) throw std::domain_error("GaussianMargin: sigma must be positive");
}

double MarginSpec::survival(double t) const {
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ParetoSpec>) {
          if (t <= s.u) return 1.0;
          return std::pow(s.u / t, s.b);
        } else if constexpr (std::is_same_v<T, TransformedParetoSpec>) {
          const double scale = s.scale();
          if (t <= scale) return 1.0;
          return std::pow(scale / t, s.shape());
        } else {
          return normal_ccdf((t - s.mu) / s.sigma);
        }
      },
      spec_);
}

}  // namespace basisrisk
