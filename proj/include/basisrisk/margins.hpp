#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <variant>

namespace basisrisk {

struct ParetoSpec {
  double u = 1.0;  // scale, same units as the variable
  double b = 1.0;  // shape

  void validate() const;
};

struct PayoffTransform {
  double alpha = 0.0;  // intercept, log-dollars
  double beta = 1.0;   // exponent

  void validate() const;
};

// Variable exp(alpha) * theta^beta for theta ~ Pareto(u, b); again Pareto,
// with shape b / beta and scale u^beta * exp(alpha).
struct TransformedParetoSpec {
  ParetoSpec base;
  PayoffTransform transform;

  double shape() const { return base.b / transform.beta; }
  double scale() const;
  double tail_index() const { return transform.beta / base.b; }
  void validate() const;
};

double pareto_survival(double t, const ParetoSpec& spec);
double pareto_quantile(double p, const ParetoSpec& spec);
Eigen::ArrayXd sample_pareto(std::int64_t n, const ParetoSpec& spec,
                             std::uint64_t seed, std::uint64_t stream = 0);

double payoff_transform(double theta, const PayoffTransform& t);
Eigen::ArrayXd payoff_transform(const Eigen::ArrayXd& theta,
                                const PayoffTransform& t);

// k-th raw moment of the transformed variable; empty when the moment
// diverges (b <= k * beta).
std::optional<double> transformed_moment(const TransformedParetoSpec& spec,
                                         int k);

struct GaussianMargin {
  double mu = 0.0;
  double sigma = 1.0;
};

// Univariate margin descriptor used by the analytic trigger probabilities.
class MarginSpec {
 public:
  MarginSpec(ParetoSpec spec);                // NOLINT(google-explicit-constructor)
  MarginSpec(TransformedParetoSpec spec);     // NOLINT(google-explicit-constructor)
  MarginSpec(GaussianMargin spec);            // NOLINT(google-explicit-constructor)

  double survival(double t) const;
  double cdf(double t) const { return 1.0 - survival(t); }

 private:
  std::variant<ParetoSpec, TransformedParetoSpec, GaussianMargin> spec_;
};

}  // namespace basisrisk
