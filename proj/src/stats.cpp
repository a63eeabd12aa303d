#include "basisrisk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace basisrisk {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kSqrt2 = 1.4142135623730950488;

// Nodes and weights of the 15-point Kronrod rule on [-1,1]; the embedded
// 7-point Gauss rule uses the odd-index nodes.
constexpr double kKronrodX[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
constexpr double kKronrodW[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
constexpr double kGaussW[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct PanelResult {
  double value;
  double error;
};

PanelResult gauss_kronrod(const std::function<double(double)>& f, double a,
                          double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * kKronrodX[i]);
    kronrod += kKronrodW[i] * fx;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fx;
  }
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::abs(kronrod - gauss)};
}

void integrate_panel(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int depth, double* total) {
  const PanelResult r = gauss_kronrod(f, a, b);
  if (r.error <= abs_tol || depth >= 50) {
    *total += r.value;
    return;
  }
  const double c = 0.5 * (a + b);
  integrate_panel(f, a, c, abs_tol * 0.5, depth + 1, total);
  integrate_panel(f, c, b, abs_tol * 0.5, depth + 1, total);
}

// Counts pairs (i, j), i < j, with values[i] > values[j]; merge sort.
std::int64_t count_inversions(std::vector<double>& values,
                              std::vector<double>& scratch, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t count = count_inversions(values, scratch, lo, mid) +
                       count_inversions(values, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (values[i] <= values[j]) {
      scratch[k++] = values[i++];
    } else {
      count += static_cast<std::int64_t>(mid - i);
      scratch[k++] = values[j++];
    }
  }
  while (i < mid) scratch[k++] = values[i++];
  while (j < hi) scratch[k++] = values[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return count;
}

std::int64_t tie_pairs(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::int64_t pairs = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i < values.size() && values[i] == values[i - 1]) {
      ++run;
    } else {
      pairs += static_cast<std::int64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

double tau_b_from_counts(std::int64_t numerator, std::int64_t n0,
                         std::int64_t n1, std::int64_t n2) {
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                       std::sqrt(static_cast<double>(n0 - n2));
  if (denom == 0.0) throw std::domain_error("kendall tau undefined: all ties");
  return static_cast<double>(numerator) / denom;
}

}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_ccdf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                  0.24178072517745061177) * r + 1.27045825245236838258) * r +
                3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                  0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                  1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

double mills_ratio(double z) {
  if (z < 8.0) {
    return normal_ccdf(z) / normal_pdf(z);
  }
  // Laplace continued fraction 1/(z + 1/(z + 2/(z + 3/...))), evaluated
  // backward; 60 levels leave the truncation error far below double epsilon
  // for z >= 8.
  double tail = 0.0;
  for (int k = 60; k >= 1; --k) tail = static_cast<double>(k) / (z + tail);
  return 1.0 / (z + tail);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double total = 0.0;
  integrate_panel(f, a, b, abs_tol, 0, &total);
  return sign * total;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("find_root: no sign change over bracket");
  }
  double x = lo;
  for (int it = 0; it < max_iter; ++it) {
    double candidate = (std::abs(fhi - flo) > 0.0)
                           ? hi - fhi * (hi - lo) / (fhi - flo)
                           : 0.5 * (lo + hi);
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    x = candidate;
    const double fx = f(x);
    if (fx == 0.0 || hi - lo < tol) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return x;
}

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double bivariate_normal_cdf(double h, double k, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::domain_error("bivariate_normal_cdf: rho must be in (-1,1)");
  }
  if (std::isinf(h) || std::isinf(k)) {
    if (h < 0.0 || k < 0.0) return 0.0;
    return std::isinf(h) ? normal_cdf(k) : normal_cdf(h);
  }
  // d/dr P(Z1<=h, Z2<=k; r) equals the bivariate density at (h, k), so the
  // CDF is the independent product plus an integral over the correlation.
  const auto density = [h, k](double r) {
    const double om = 1.0 - r * r;
    const double q = (h * h - 2.0 * r * h * k + k * k) / om;
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(om));
  };
  return normal_cdf(h) * normal_cdf(k) + integrate(density, 0.0, rho, 1e-14);
}

double kendall_tau_fast(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const std::int64_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("kendall tau: length mismatch");
  if (n < 2) throw std::domain_error("kendall tau requires n >= 2");

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[static_cast<Eigen::Index>(a)] != x[static_cast<Eigen::Index>(b)])
      return x[static_cast<Eigen::Index>(a)] < x[static_cast<Eigen::Index>(b)];
    return y[static_cast<Eigen::Index>(a)] < y[static_cast<Eigen::Index>(b)];
  });

  std::vector<double> ys(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < ys.size(); ++i)
    ys[i] = y[static_cast<Eigen::Index>(order[i])];

  // Pairs tied in x, and tied in both, from runs of equal x.
  std::int64_t n1 = 0;
  std::int64_t tie_both = 0;
  {
    std::size_t i = 0;
    while (i < ys.size()) {
      std::size_t j = i + 1;
      while (j < ys.size() &&
             x[static_cast<Eigen::Index>(order[j])] ==
                 x[static_cast<Eigen::Index>(order[i])])
        ++j;
      const std::int64_t run = static_cast<std::int64_t>(j - i);
      n1 += run * (run - 1) / 2;
      tie_both += tie_pairs({ys.begin() + static_cast<std::ptrdiff_t>(i),
                             ys.begin() + static_cast<std::ptrdiff_t>(j)});
      i = j;
    }
  }
  std::int64_t n2 = tie_pairs(ys);

  std::vector<double> scratch(ys.size());
  const std::int64_t discordant = count_inversions(ys, scratch, 0, ys.size());

  const std::int64_t n0 = n * (n - 1) / 2;
  const std::int64_t numerator = n0 - n1 - n2 + tie_both - 2 * discordant;
  return tau_b_from_counts(numerator, n0, n1, n2);
}

double kendall_tau_brute(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const std::int64_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("kendall tau: length mismatch");
  if (n < 2) throw std::domain_error("kendall tau requires n >= 2");
  std::int64_t concordant = 0, discordant = 0, n1 = 0, n2 = 0, tie_both = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ++tie_both;
        ++n1;
        ++n2;
      } else if (dx == 0.0) {
        ++n1;
      } else if (dy == 0.0) {
        ++n2;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const std::int64_t n0 = n * (n - 1) / 2;
  // Assemble the numerator through the same expression as the fast path so
  // the two estimators agree exactly, not just to rounding.
  (void)concordant;
  const std::int64_t numerator = n0 - n1 - n2 + tie_both - 2 * discordant;
  return tau_b_from_counts(numerator, n0, n1, n2);
}

Eigen::ArrayXd sorted_copy(const Eigen::ArrayXd& values) {
  Eigen::ArrayXd out = values;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

double empirical_quantile_sorted(const Eigen::ArrayXd& sorted, double p) {
  const Eigen::Index n = sorted.size();
  if (n == 0) throw std::domain_error("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("empirical_quantile: p outside [0,1]");
  if (p == 0.0) return sorted[0];
  const auto rank = static_cast<Eigen::Index>(
      std::ceil(p * static_cast<double>(n)));
  return sorted[std::min(std::max<Eigen::Index>(rank, 1), n) - 1];
}

double empirical_quantile(const Eigen::ArrayXd& values, double p) {
  return empirical_quantile_sorted(sorted_copy(values), p);
}

double ks_statistic(const Eigen::ArrayXd& values,
                    const std::function<double(double)>& cdf) {
  const Eigen::ArrayXd s = sorted_copy(values);
  const auto n = static_cast<double>(s.size());
  double d = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

double ks_two_sample(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  const Eigen::ArrayXd sa = sorted_copy(a);
  const Eigen::ArrayXd sb = sorted_copy(b);
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  Eigen::Index i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= v) ++i;
    while (j < sb.size() && sb[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(std::int64_t n, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical(std::int64_t n, std::int64_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

double least_squares_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares_slope: need matching n >= 2");
  }
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = ((x - mx) * (x - mx)).sum();
  if (sxx == 0.0) throw std::domain_error("least_squares_slope: degenerate x");
  return ((x - mx) * (y - my)).sum() / sxx;
}

}  // namespace basisrisk
