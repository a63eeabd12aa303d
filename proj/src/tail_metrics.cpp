#include "basisrisk/tail_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "basisrisk/stats.hpp"

namespace basisrisk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kLowCountFlag = 100;

ExcessEstimate conditional_moment(const PairedSample& sample, double s,
                                  ExcessMetric metric) {
  sample.validate();
  double sum = 0.0, sumsq = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index i = 0; i < sample.x.size(); ++i) {
    if (sample.x[i] >= s) {
      const double d = sample.x[i] - sample.y[i];
      const double value = (metric == ExcessMetric::Mean) ? d : d * d;
      sum += value;
      sumsq += value * value;
      ++n;
    }
  }
  if (n == 0) {
    throw std::domain_error("conditional excess estimate: no exceedances at s");
  }
  ExcessEstimate est;
  est.s = s;
  est.n_exceed = n;
  est.estimate = sum / static_cast<double>(n);
  if (n >= 2) {
    const double var =
        std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) /
                          static_cast<double>(n - 1));
    est.std_error = std::sqrt(var / static_cast<double>(n));
  } else {
    est.std_error = kNaN;
    est.flagged = true;
  }
  if (n < kLowCountFlag) est.flagged = true;
  return est;
}

}  // namespace

void PairedSample::validate() const {
  if (x.size() != y.size()) {
    throw std::invalid_argument("PairedSample: x and y lengths differ");
  }
  if (x.size() < 1) throw std::invalid_argument("PairedSample: empty sample");
  if (!x.isFinite().all() || !y.isFinite().all()) {
    throw std::invalid_argument("PairedSample: non-finite entries");
  }
}

const std::vector<double>& default_curve_levels() {
  static const std::vector<double> levels = {0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
                                             0.80, 0.85, 0.90, 0.95, 0.99};
  return levels;
}

ExcessEstimate conditional_mean_diff(const PairedSample& sample, double s) {
  return conditional_moment(sample, s, ExcessMetric::Mean);
}

ExcessEstimate conditional_sq_diff(const PairedSample& sample, double s) {
  return conditional_moment(sample, s, ExcessMetric::Square);
}

ExcessCurve excess_curve(const PairedSample& sample, const Eigen::ArrayXd& grid,
                         ExcessMetric metric) {
  if (grid.size() == 0) throw std::invalid_argument("excess_curve: empty grid");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("excess_curve: grid must be strictly increasing");
    }
  }
  ExcessCurve curve;
  curve.grid_rule = "explicit thresholds";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    curve.levels.push_back(kNaN);
    try {
      curve.points.push_back(conditional_moment(sample, grid[i], metric));
    } catch (const std::domain_error&) {
      ExcessEstimate empty;
      empty.s = grid[i];
      empty.estimate = kNaN;
      empty.std_error = kNaN;
      empty.n_exceed = 0;
      empty.flagged = true;
      curve.points.push_back(empty);
    }
  }
  return curve;
}

ExcessCurve excess_curve_at_levels(const PairedSample& sample,
                                   const std::vector<double>& levels,
                                   ExcessMetric metric) {
  if (levels.empty()) throw std::invalid_argument("excess_curve: empty level grid");
  sample.validate();
  const Eigen::ArrayXd sorted = sorted_copy(sample.x);
  ExcessCurve curve;
  curve.grid_rule = "empirical quantiles of x";
  double prev = -std::numeric_limits<double>::infinity();
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("excess_curve: levels must be in (0,1)");
    }
    const double s = empirical_quantile_sorted(sorted, level);
    if (s <= prev) continue;  // duplicate threshold from a short sample
    prev = s;
    curve.levels.push_back(level);
    curve.points.push_back(conditional_moment(sample, s, metric));
  }
  return curve;
}

double kendall_tau(const PairedSample& sample) {
  sample.validate();
  return kendall_tau_fast(sample.x, sample.y);
}

ProbEstimate pi_plus_empirical(const PairedSample& sample, double t0, double x0) {
  sample.validate();
  std::int64_t n_cond = 0, n_hit = 0;
  for (Eigen::Index i = 0; i < sample.x.size(); ++i) {
    if (sample.x[i] >= x0) {
      ++n_cond;
      if (sample.y[i] >= t0) ++n_hit;
    }
  }
  if (n_cond == 0) throw std::domain_error("pi_plus_empirical: empty conditioning event");
  const double p = static_cast<double>(n_hit) / static_cast<double>(n_cond);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_cond)), n_cond};
}

ProbEstimate pi_minus_empirical(const PairedSample& sample, double t0, double x0) {
  sample.validate();
  std::int64_t n_cond = 0, n_hit = 0;
  for (Eigen::Index i = 0; i < sample.x.size(); ++i) {
    if (sample.x[i] < x0) {
      ++n_cond;
      if (sample.y[i] < t0) ++n_hit;
    }
  }
  if (n_cond == 0) throw std::domain_error("pi_minus_empirical: empty conditioning event");
  const double p = static_cast<double>(n_hit) / static_cast<double>(n_cond);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_cond)), n_cond};
}

TailDepEstimate upper_tail_dep_empirical(const PairedSample& sample, double u) {
  sample.validate();
  if (!(u > 0.0 && u <= 0.5)) {
    throw std::domain_error("upper_tail_dep_empirical: u must be in (0, 0.5]");
  }
  const auto n = static_cast<double>(sample.size());
  const double qx = empirical_quantile(sample.x, 1.0 - u);
  const double qy = empirical_quantile(sample.y, 1.0 - u);
  std::int64_t joint = 0;
  for (Eigen::Index i = 0; i < sample.x.size(); ++i) {
    if (sample.x[i] > qx && sample.y[i] > qy) ++joint;
  }
  TailDepEstimate est;
  est.n_joint = joint;
  est.tail_level = u;
  est.lambda_hat = static_cast<double>(joint) / (n * u);
  est.flagged = n * u < 50.0;
  return est;
}

BinnedConditionalMean::BinnedConditionalMean(
    std::vector<double> lower_edges, std::vector<double> centers,
    std::vector<double> means, std::vector<double> std_errors,
    std::vector<std::int64_t> counts)
    : lower_edges_(std::move(lower_edges)),
      centers_(std::move(centers)),
      means_(std::move(means)),
      std_errors_(std::move(std_errors)),
      counts_(std::move(counts)) {}

double BinnedConditionalMean::operator()(double x) const {
  // Last bin whose lower edge is <= x; queries below the first edge get the
  // first bin.
  const auto it =
      std::upper_bound(lower_edges_.begin(), lower_edges_.end(), x);
  const auto idx = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, (it - lower_edges_.begin()) - 1));
  return means_[idx];
}

BinnedConditionalMean conditional_mean_regression(const PairedSample& sample,
                                                  int n_bins) {
  sample.validate();
  if (n_bins < 2) throw std::domain_error("conditional_mean_regression: n_bins >= 2");
  const auto n = static_cast<std::size_t>(sample.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample.x[static_cast<Eigen::Index>(a)] <
           sample.x[static_cast<Eigen::Index>(b)];
  });

  std::vector<double> edges, centers, means, ses;
  std::vector<std::int64_t> counts;
  const auto bins = static_cast<std::size_t>(n_bins);
  std::size_t start = 0;
  for (std::size_t bin = 0; bin < bins && start < n; ++bin) {
    std::size_t stop = (bin + 1 == bins) ? n : (n * (bin + 1)) / bins;
    if (stop <= start) stop = start + 1;
    if (stop > n) stop = n;
    // A bin of fewer than 2 points merges with its neighbor.
    if (stop - start < 2 && !means.empty()) {
      stop = std::min(n, start + (stop - start));
    }
    double sx = 0.0, sy = 0.0, syy = 0.0;
    for (std::size_t i = start; i < stop; ++i) {
      const auto idx = static_cast<Eigen::Index>(order[i]);
      sx += sample.x[idx];
      sy += sample.y[idx];
      syy += sample.y[idx] * sample.y[idx];
    }
    const auto count = static_cast<double>(stop - start);
    if (stop - start < 2 && !means.empty()) {
      // Merge into the previous bin.
      const double prev_n = static_cast<double>(counts.back());
      const double merged_n = prev_n + count;
      means.back() = (means.back() * prev_n + sy) / merged_n;
      centers.back() = (centers.back() * prev_n + sx) / merged_n;
      counts.back() = static_cast<std::int64_t>(merged_n);
    } else {
      edges.push_back(sample.x[static_cast<Eigen::Index>(order[start])]);
      centers.push_back(sx / count);
      means.push_back(sy / count);
      const double var = std::max(0.0, (syy - sy * sy / count) /
                                           std::max(1.0, count - 1.0));
      ses.push_back(std::sqrt(var / count));
      counts.push_back(static_cast<std::int64_t>(stop - start));
    }
    start = stop;
  }
  return BinnedConditionalMean(std::move(edges), std::move(centers),
                               std::move(means), std::move(ses),
                               std::move(counts));
}

}  // namespace basisrisk
