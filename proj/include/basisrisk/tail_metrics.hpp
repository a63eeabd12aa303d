#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace basisrisk {

struct PairedSample {
  Eigen::ArrayXd x;  // actual loss
  Eigen::ArrayXd y;  // parametric payout (or index)
  std::uint64_t seed = 0;
  std::string label;

  void validate() const;
  std::int64_t size() const { return x.size(); }
};

struct ExcessEstimate {
  double s = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;  // NaN when n_exceed < 2
  std::int64_t n_exceed = 0;
  bool flagged = false;  // n_exceed < 100, undefined s.e., or empty point
};

struct ExcessCurve {
  std::vector<double> levels;  // quantile level per point; NaN for raw grids
  std::vector<ExcessEstimate> points;
  std::string grid_rule;
};

enum class ExcessMetric { Mean, Square };

// Default quantile levels for excess curves: 0.50 to 0.95 in steps of 0.05,
// then 0.99.
const std::vector<double>& default_curve_levels();

ExcessEstimate conditional_mean_diff(const PairedSample& sample, double s);
ExcessEstimate conditional_sq_diff(const PairedSample& sample, double s);

ExcessCurve excess_curve(const PairedSample& sample, const Eigen::ArrayXd& grid,
                         ExcessMetric metric);
ExcessCurve excess_curve_at_levels(const PairedSample& sample,
                                   const std::vector<double>& levels,
                                   ExcessMetric metric);

double kendall_tau(const PairedSample& sample);

struct ProbEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_condition = 0;
};

// P(y >= t0 | x >= x0) with binomial standard error.
ProbEstimate pi_plus_empirical(const PairedSample& sample, double t0, double x0);
// P(y < t0 | x < x0): the prose definition, not the displayed formula.
ProbEstimate pi_minus_empirical(const PairedSample& sample, double t0, double x0);

struct TailDepEstimate {
  double lambda_hat = 0.0;
  std::int64_t n_joint = 0;
  double tail_level = 0.0;
  bool flagged = false;  // n * u < 50
};

TailDepEstimate upper_tail_dep_empirical(const PairedSample& sample, double u);

// Piecewise-constant estimate of psi(x) = E[Y | X = x] over equal-count bins.
class BinnedConditionalMean {
 public:
  BinnedConditionalMean(std::vector<double> lower_edges,
                        std::vector<double> centers, std::vector<double> means,
                        std::vector<double> std_errors,
                        std::vector<std::int64_t> counts);

  double operator()(double x) const;

  std::size_t bins() const { return means_.size(); }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& std_errors() const { return std_errors_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }

 private:
  std::vector<double> lower_edges_;
  std::vector<double> centers_;
  std::vector<double> means_;
  std::vector<double> std_errors_;
  std::vector<std::int64_t> counts_;
};

BinnedConditionalMean conditional_mean_regression(const PairedSample& sample,
                                                  int n_bins);

}  // namespace basisrisk
