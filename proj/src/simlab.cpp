#include "basisrisk/simlab.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "basisrisk/gaussian.hpp"
#include "basisrisk/rng.hpp"
#include "basisrisk/stats.hpp"

namespace basisrisk {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string describe(const MainSettingConfig& cfg) {
  std::ostringstream out;
  out << "u=" << cfg.u << " b=" << cfg.b << " alpha=" << cfg.alpha
      << " beta=" << cfg.beta << " shape_tp=" << cfg.shape_tp
      << " alpha_x=" << cfg.alpha_x << " beta_x=" << cfg.beta_x;
  return out.str();
}

double require_moment(const TransformedParetoSpec& margin, int k,
                      const char* name, const MainSettingConfig& cfg) {
  const auto m = transformed_moment(margin, k);
  if (!m) {
    std::ostringstream out;
    out << "infinite target variance: E[" << name << "^" << k
        << "] diverges (shape " << margin.shape() << " <= " << k
        << ") under " << describe(cfg);
    throw std::domain_error(out.str());
  }
  return *m;
}

Eigen::ArrayXd pareto_quantiles(const Eigen::ArrayXd& p,
                                const ParetoSpec& spec) {
  Eigen::ArrayXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out[i] = pareto_quantile(p[i], spec);
  return out;
}

// Cell codes keep per-cell seeds stable no matter in which order the suite
// evaluates them.
std::uint64_t cell_code(int family_code, int tau_code, int bench_code) {
  return static_cast<std::uint64_t>((family_code * 16 + tau_code) * 16 +
                                    bench_code);
}

int family_code_of(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Frank: return 1;
    case CopulaFamily::Gumbel: return 2;
    case CopulaFamily::ClaytonSurvival: return 3;
    default: throw std::domain_error("figure suites cover frank, gumbel and "
                                     "clayton-survival only");
  }
}

const std::vector<double>& figure_taus() {
  static const std::vector<double> taus = {0.3, 0.5, 0.7};
  return taus;
}

int tau_code_of(double tau) {
  const auto& taus = figure_taus();
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (taus[i] == tau) return static_cast<int>(i) + 1;
  throw std::domain_error("figure tau must be one of 0.3, 0.5, 0.7");
}

Table make_panel(std::string name) {
  Table table;
  table.name = std::move(name);
  table.columns = {"family", "tau_or_rho", "quantile", "s",
                   "estimate", "std_error", "n_exceed"};
  return table;
}

void append_curve(Table& table, const std::string& family, double tau_or_rho,
                  const ExcessCurve& curve) {
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const ExcessEstimate& pt = curve.points[i];
    table.rows.push_back({family, format_double(tau_or_rho),
                          format_double(curve.levels[i]), format_double(pt.s),
                          format_double(pt.estimate),
                          format_double(pt.std_error),
                          std::to_string(pt.n_exceed)});
  }
}

void append_ratios(Table& table, const std::string& family, double tau_or_rho,
                   const ExcessCurve& model, const ExcessCurve& benchmark) {
  const std::vector<RatioPoint> ratios = ratio_curves(model, benchmark);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const RatioPoint& pt = ratios[i];
    const ExcessEstimate& m = model.points[i];
    const ExcessEstimate& b = benchmark.points[i];
    std::string estimate;
    std::string std_error;
    if (!pt.missing) {
      estimate = format_double(pt.ratio);
      const double rel_m = m.std_error / m.estimate;
      const double rel_b = b.std_error / b.estimate;
      const double se =
          std::abs(pt.ratio) * std::sqrt(rel_m * rel_m + rel_b * rel_b);
      if (std::isfinite(se)) std_error = format_double(se);
    }
    table.rows.push_back({family, format_double(tau_or_rho),
                          format_double(pt.level), format_double(pt.s),
                          estimate, std_error, std::to_string(m.n_exceed)});
  }
}

}  // namespace

TransformedParetoSpec MainSettingConfig::margin_y() const {
  return TransformedParetoSpec{ParetoSpec{u, b}, PayoffTransform{alpha, beta}};
}

TransformedParetoSpec MainSettingConfig::margin_x() const {
  return TransformedParetoSpec{ParetoSpec{u, shape_tp},
                               PayoffTransform{alpha_x, beta_x}};
}

void MainSettingConfig::validate() const {
  margin_y().validate();
  margin_x().validate();
  const bool tau_free = family == CopulaFamily::Independence ||
                        family == CopulaFamily::Comonotone;
  if (!tau_free && !(tau > 0.0 && tau < 1.0))
    throw std::domain_error("tau must lie in (0, 1)");
  if (n < 1000) throw std::domain_error("n must be at least 1000");
  if (!(shape_tp < b / beta))
    throw std::domain_error(
        "shape of theta' must be below b/beta so the loss tail dominates "
        "the payout tail");
}

MainSettingConfig benchmark_compatible_preset() {
  MainSettingConfig cfg;
  cfg.b = 1.4;
  cfg.label = "benchmark_compatible";
  return cfg;
}

std::string benchmark_name(BenchmarkSetting setting) {
  switch (setting) {
    case BenchmarkSetting::B1: return "b1";
    case BenchmarkSetting::B2: return "b2";
    case BenchmarkSetting::B3: return "b3";
  }
  throw std::domain_error("unknown benchmark setting");
}

BenchmarkTargets benchmark_targets(const MainSettingConfig& base) {
  base.validate();
  const TransformedParetoSpec my = base.margin_y();
  const TransformedParetoSpec mx = base.margin_x();
  BenchmarkTargets t;
  t.mean_y = require_moment(my, 1, "Y", base);
  t.mean_x = require_moment(mx, 1, "X", base);
  const double m2y = require_moment(my, 2, "Y", base);
  const double m2x = require_moment(mx, 2, "X", base);
  t.var_y = m2y - t.mean_y * t.mean_y;
  t.var_x = m2x - t.mean_x * t.mean_x;
  t.sigma1_sq = t.var_x - t.var_y;
  if (t.var_x > t.var_y) {
    // Lognormal second-moment identity: Var(Y e^eps) with eps ~ N(0, v)
    // equals E[Y^2] e^{2v} - E[Y]^2 e^v; solve for v by bisection.
    const double ey = t.mean_y;
    const double ey2 = m2y;
    const double target = t.var_x;
    double lo = 0.0;
    double hi = 10.0;
    if (ey2 * std::exp(2.0 * hi) - ey * ey * std::exp(hi) < target)
      throw std::domain_error("matched log-noise variance exceeds 10");
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      const double value = ey2 * std::exp(2.0 * mid) - ey * ey * std::exp(mid);
      (value < target ? lo : hi) = mid;
    }
    t.sigma2_sq = 0.5 * (lo + hi);
  } else {
    t.sigma2_sq = kNan;
  }
  return t;
}

PairedSample run_main_setting(const MainSettingConfig& cfg) {
  cfg.validate();
  CopulaSpec copula{cfg.family, 0.0};
  if (cfg.family != CopulaFamily::Independence &&
      cfg.family != CopulaFamily::Comonotone)
    copula.parameter = tau_to_param(cfg.family, cfg.tau);
  copula.validate();

  const UniformPairs uv = sample_copula(copula, cfg.n, cfg.seed);
  const Eigen::ArrayXd theta = pareto_quantiles(uv.v, ParetoSpec{cfg.u, cfg.b});
  const Eigen::ArrayXd theta_prime =
      pareto_quantiles(uv.w, ParetoSpec{cfg.u, cfg.shape_tp});

  PairedSample sample;
  sample.y = payoff_transform(theta, PayoffTransform{cfg.alpha, cfg.beta});
  sample.x =
      payoff_transform(theta_prime, PayoffTransform{cfg.alpha_x, cfg.beta_x});
  sample.seed = cfg.seed;
  sample.label = cfg.label.empty()
                     ? family_name(cfg.family) + " tau=" + format_double(cfg.tau)
                     : cfg.label;
  return sample;
}

PairedSample run_benchmark(const BenchmarkConfig& cfg,
                           const MainSettingConfig& base) {
  if (cfg.n < 1000) throw std::domain_error("n must be at least 1000");
  const BenchmarkTargets t = benchmark_targets(base);

  PairedSample sample;
  sample.seed = cfg.seed;
  sample.label = benchmark_name(cfg.setting);

  if (cfg.setting == BenchmarkSetting::B3) {
    GaussianPairSpec spec{t.mean_x, t.mean_y, std::sqrt(t.var_x),
                          std::sqrt(t.var_y), cfg.rho};
    spec.validate();
    PairedSample gauss = sample_bivariate_gaussian(spec, cfg.n, cfg.seed);
    sample.x = std::move(gauss.x);
    sample.y = std::move(gauss.y);
    return sample;
  }

  Rng rng_u(cfg.seed, 0);
  Rng rng_eps(cfg.seed, 1);
  const ParetoSpec theta_spec{base.u, base.b};
  const PayoffTransform payout{base.alpha, base.beta};
  sample.y.resize(cfg.n);
  for (Eigen::Index i = 0; i < cfg.n; ++i)
    sample.y[i] = payoff_transform(pareto_quantile(rng_u.uniform(), theta_spec),
                                   payout);

  if (cfg.setting == BenchmarkSetting::B1) {
    if (!(t.sigma1_sq > 0.0))
      throw std::domain_error(
          "matched noise variance is not positive: Var(X) <= Var(Y) under " +
          describe(base));
    const double sd = std::sqrt(t.sigma1_sq);
    sample.x.resize(cfg.n);
    for (Eigen::Index i = 0; i < cfg.n; ++i)
      sample.x[i] = sample.y[i] + sd * rng_eps.normal();
    return sample;
  }

  if (!std::isfinite(t.sigma2_sq))
    throw std::domain_error(
        "matched log-noise variance undefined: Var(X) <= Var(Y) under " +
        describe(base));
  const double sd = std::sqrt(t.sigma2_sq);
  sample.x.resize(cfg.n);
  for (Eigen::Index i = 0; i < cfg.n; ++i)
    sample.x[i] = sample.y[i] * std::exp(sd * rng_eps.normal());
  return sample;
}

std::vector<RatioPoint> ratio_curves(const ExcessCurve& model,
                                     const ExcessCurve& benchmark) {
  if (model.levels != benchmark.levels)
    throw std::invalid_argument("ratio_curves needs matching quantile grids");
  std::vector<RatioPoint> out;
  out.reserve(model.points.size());
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    const ExcessEstimate& m = model.points[i];
    const ExcessEstimate& b = benchmark.points[i];
    RatioPoint pt;
    pt.level = model.levels[i];
    pt.s = m.s;
    if (b.flagged || b.estimate == 0.0 || !std::isfinite(b.estimate) ||
        !std::isfinite(m.estimate)) {
      pt.ratio = kNan;
      pt.missing = true;
    } else {
      pt.ratio = m.estimate / b.estimate;
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<std::string> figure_ids() {
  return {"fig1", "fig2", "fig3", "fig4"};
}

std::vector<Table> figure_suite(const std::string& which, std::int64_t n,
                                std::uint64_t seed) {
  const std::vector<CopulaFamily> families = {
      CopulaFamily::Frank, CopulaFamily::Gumbel, CopulaFamily::ClaytonSurvival};
  const std::vector<double>& levels = default_curve_levels();

  if (which == "fig1") {
    Table mean_panel = make_panel("fig1_mean");
    Table square_panel = make_panel("fig1_square");
    for (CopulaFamily family : families) {
      for (double tau : figure_taus()) {
        MainSettingConfig cfg;
        cfg.family = family;
        cfg.tau = tau;
        cfg.n = n;
        cfg.seed = derive_seed(
            seed, cell_code(family_code_of(family), tau_code_of(tau), 0));
        const PairedSample sample = run_main_setting(cfg);
        append_curve(mean_panel, family_name(family), tau,
                     excess_curve_at_levels(sample, levels, ExcessMetric::Mean));
        append_curve(
            square_panel, family_name(family), tau,
            excess_curve_at_levels(sample, levels, ExcessMetric::Square));
      }
    }
    return {std::move(mean_panel), std::move(square_panel)};
  }

  double tau = 0.0;
  if (which == "fig2") {
    tau = 0.3;
  } else if (which == "fig3") {
    tau = 0.5;
  } else if (which == "fig4") {
    tau = 0.7;
  } else {
    std::string ids;
    for (const std::string& id : figure_ids())
      ids += (ids.empty() ? "" : ", ") + id;
    throw std::domain_error("unknown figure id '" + which +
                            "' (valid: " + ids + ")");
  }

  // Ratio figures need finite benchmark moments, hence the variant setting.
  const MainSettingConfig base = [&] {
    MainSettingConfig cfg = benchmark_compatible_preset();
    cfg.n = n;
    return cfg;
  }();
  const int tau_code = tau_code_of(tau);

  const std::vector<BenchmarkSetting> settings = {
      BenchmarkSetting::B1, BenchmarkSetting::B2, BenchmarkSetting::B3};
  std::vector<ExcessCurve> bench_mean;
  std::vector<ExcessCurve> bench_square;
  for (std::size_t bi = 0; bi < settings.size(); ++bi) {
    BenchmarkConfig bench;
    bench.setting = settings[bi];
    bench.rho = tau;  // B3 correlation level tracks the figure's tau
    bench.n = n;
    bench.seed =
        derive_seed(seed, cell_code(0, tau_code, static_cast<int>(bi) + 1));
    const PairedSample sample = run_benchmark(bench, base);
    bench_mean.push_back(
        excess_curve_at_levels(sample, levels, ExcessMetric::Mean));
    bench_square.push_back(
        excess_curve_at_levels(sample, levels, ExcessMetric::Square));
  }

  std::vector<Table> tables;
  for (std::size_t bi = 0; bi < settings.size(); ++bi) {
    const std::string bench_id = benchmark_name(settings[bi]);
    tables.push_back(make_panel(which + "_mean_" + bench_id));
    tables.push_back(make_panel(which + "_square_" + bench_id));
  }

  for (CopulaFamily family : families) {
    MainSettingConfig cfg = base;
    cfg.family = family;
    cfg.tau = tau;
    cfg.seed =
        derive_seed(seed, cell_code(family_code_of(family), tau_code, 0));
    const PairedSample sample = run_main_setting(cfg);
    const ExcessCurve model_mean =
        excess_curve_at_levels(sample, levels, ExcessMetric::Mean);
    const ExcessCurve model_square =
        excess_curve_at_levels(sample, levels, ExcessMetric::Square);
    for (std::size_t bi = 0; bi < settings.size(); ++bi) {
      append_ratios(tables[2 * bi], family_name(family), tau, model_mean,
                    bench_mean[bi]);
      append_ratios(tables[2 * bi + 1], family_name(family), tau, model_square,
                    bench_square[bi]);
    }
  }
  return tables;
}

}  // namespace basisrisk
