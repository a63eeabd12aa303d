#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace basisrisk {

double normal_pdf(double z);
double normal_cdf(double z);
double normal_ccdf(double z);

// Inverse of normal_cdf (Wichura's AS241 double-precision rational fits).
double normal_quantile(double p);

// Mills ratio ccdf(z)/pdf(z), stable for arbitrarily large z: the erfc form
// underflows near z = 37, so the deep tail switches to a continued fraction.
double mills_ratio(double z);

// Adaptive Gauss-Kronrod 7/15 quadrature to absolute tolerance abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

// Root of f on [lo, hi] by secant steps safeguarded with bisection.
// Requires a sign change over the bracket.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12, int max_iter = 200);

// Minimizer of f on [lo, hi] by golden-section search.
double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-10, int max_iter = 500);

// Standard bivariate normal CDF P(Z1 <= h, Z2 <= k) with correlation rho,
// via the single-integral identity over the correlation parameter.
double bivariate_normal_cdf(double h, double k, double rho);

// Kendall tau-b. The fast version counts discordances by merge sort in
// O(n log n); the brute-force version enumerates all pairs and assembles the
// same final expression, so the two agree to the last bit.
double kendall_tau_fast(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);
double kendall_tau_brute(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

// Lower-tail empirical quantile: smallest order statistic with at least
// ceil(p * n) observations at or below it.
double empirical_quantile(const Eigen::ArrayXd& values, double p);
Eigen::ArrayXd sorted_copy(const Eigen::ArrayXd& values);
double empirical_quantile_sorted(const Eigen::ArrayXd& sorted, double p);

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF, and the
// asymptotic critical value at significance alpha.
double ks_statistic(const Eigen::ArrayXd& values,
                    const std::function<double(double)>& cdf);
double ks_two_sample(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);
double ks_critical(std::int64_t n, double alpha);
double ks_two_sample_critical(std::int64_t n, std::int64_t m, double alpha);

// Least-squares slope of y against x.
double least_squares_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

}  // namespace basisrisk
