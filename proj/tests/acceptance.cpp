#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "basisrisk/copulas.hpp"
#include "basisrisk/evt.hpp"
#include "basisrisk/flood.hpp"
#include "basisrisk/gaussian.hpp"
#include "basisrisk/io.hpp"
#include "basisrisk/margins.hpp"
#include "basisrisk/rng.hpp"
#include "basisrisk/simlab.hpp"
#include "basisrisk/stats.hpp"
#include "basisrisk/tail_metrics.hpp"
#include "support.hpp"

using namespace basisrisk;

namespace {

constexpr std::uint64_t kFloodCorpusSeed = 47;

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome criterion1() {
  Rng spec_rng(20240811, 0);
  int within = 0, cells = 0;
  for (int draw = 0; draw < 20; ++draw) {
    GaussianPairSpec spec;
    spec.mu_x = -1.0 + 2.0 * spec_rng.uniform();
    spec.mu_y = -1.0 + 2.0 * spec_rng.uniform();
    spec.sigma_x = 0.5 + 1.5 * spec_rng.uniform();
    spec.sigma_y = 0.5 + 1.5 * spec_rng.uniform();
    spec.rho = -0.9 + 1.8 * spec_rng.uniform();
    const PairedSample sample =
        sample_bivariate_gaussian(spec, 1000000, 100 + static_cast<std::uint64_t>(draw));
    for (int offset = 0; offset <= 2; ++offset) {
      const double s = spec.mu_x + offset * spec.sigma_x;
      const ExcessEstimate mean = conditional_mean_diff(sample, s);
      const ExcessEstimate square = conditional_sq_diff(sample, s);
      within += std::abs(mean.estimate - cond_mean_diff_exact(spec, s)) <=
                        3.0 * mean.std_error
                    ? 1
                    : 0;
      within += std::abs(square.estimate - cond_sq_diff_exact(spec, s)) <=
                        3.0 * square.std_error
                    ? 1
                    : 0;
      cells += 2;
    }
  }
  Outcome out;
  out.pass = within >= (cells * 95 + 99) / 100;
  out.detail = std::to_string(within) + "/" + std::to_string(cells) +
               " cells within 3 se (need 95%)";
  return out;
}

Outcome criterion2() {
  Outcome out;
  out.pass = true;
  for (double rho : {0.0, 0.5}) {
    GaussianPairSpec spec;
    spec.mu_x = 0.3;
    spec.mu_y = 0.3;
    spec.rho = rho;
    const double s = spec.mu_x + 6.0 * spec.sigma_x;
    const double mean_ratio =
        cond_mean_diff_exact(spec, s) / cond_mean_diff_asymptotic(spec, s);
    const double sq_ratio =
        cond_sq_diff_exact(spec, s) / cond_sq_diff_asymptotic(spec, s);
    out.pass = out.pass && mean_ratio >= 0.95 && mean_ratio <= 1.05 &&
               sq_ratio >= 0.95 && sq_ratio <= 1.05;
    out.detail += "k=" + fmt(rho) + " ratios " + fmt(mean_ratio) + "/" +
                  fmt(sq_ratio) + "; ";
  }
  GaussianPairSpec degenerate;
  degenerate.mu_x = 0.4;
  degenerate.mu_y = 0.4;
  degenerate.sigma_x = 1.0;
  degenerate.sigma_y = 1.25;
  degenerate.rho = 0.8;
  const double s = degenerate.mu_x + 6.0 * degenerate.sigma_x;
  const bool zero = cond_mean_diff_exact(degenerate, s) == 0.0 &&
                    cond_mean_diff_asymptotic(degenerate, s) == 0.0 &&
                    cond_sq_diff_asymptotic(degenerate, s) == 0.0;
  out.pass = out.pass && zero;
  out.detail += std::string("degenerate k=1 terms ") +
                (zero ? "exactly 0" : "not exactly 0");
  return out;
}

Outcome criterion3() {
  MainSettingConfig cfg;
  cfg.n = 10000000;
  cfg.seed = 1;
  const PairedSample sample = run_main_setting(cfg);
  const double q99 = empirical_quantile(sample.x, 0.99);
  const ExcessEstimate sq = conditional_sq_diff(sample, q99);
  const double ratio = sq.estimate / (q99 * q99);
  Outcome out;
  out.pass = ratio >= 0.5 && ratio <= 1.5;
  out.detail = "sq(q99)/q99^2 = " + fmt(ratio) + " vs [0.5, 1.5]";
  return out;
}

Outcome criterion4() {
  MainSettingConfig cfg;
  cfg.n = 10000000;
  cfg.seed = 2;
  const PairedSample frank = run_main_setting(cfg);
  const double q95 = empirical_quantile(frank.x, 0.95);
  const double q99 = empirical_quantile(frank.x, 0.99);
  const ExcessEstimate m95 = conditional_mean_diff(frank, q95);
  const ExcessEstimate m99 = conditional_mean_diff(frank, q99);
  const double slope = (m99.estimate - m95.estimate) / (q99 - q95);
  const bool slope_ok = slope >= 0.75 && slope <= 1.2;

  bool separated = true;
  std::string sep_detail;
  for (CopulaFamily family :
       {CopulaFamily::Gumbel, CopulaFamily::ClaytonSurvival}) {
    MainSettingConfig other = cfg;
    other.family = family;
    other.seed = family == CopulaFamily::Gumbel ? 3 : 4;
    const PairedSample sample = run_main_setting(other);
    const double q = empirical_quantile(sample.x, 0.99);
    const ExcessEstimate m = conditional_mean_diff(sample, q);
    const double gap = m99.estimate - m.estimate;
    const double se = std::sqrt(m99.std_error * m99.std_error +
                                m.std_error * m.std_error);
    separated = separated && gap > 3.0 * se;
    sep_detail += family_name(family) + " gap " + fmt(gap) + " (3se " +
                  fmt(3.0 * se) + "); ";
  }
  Outcome out;
  out.pass = slope_ok && separated;
  out.detail = "frank slope " + fmt(slope) + " vs [0.75, 1.2]; " + sep_detail +
               std::string(separated ? "separation holds" : "separation fails");
  return out;
}

Outcome criterion5() {
  MainSettingConfig cfg;
  cfg.n = 1000000;
  const double target = cfg.beta_x / cfg.shape_tp;
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    const PairedSample sample = run_main_setting(cfg);
    total += tail_index_of_difference(sample, 0.95).gamma;
  }
  const double mean_gamma = total / 5.0;
  Outcome out;
  out.pass = std::abs(mean_gamma - target) <= 0.1;
  out.detail = "mean gamma " + fmt(mean_gamma) + " vs " + fmt(target) +
               " +- 0.1 over 5 seeds";
  return out;
}

Outcome criterion6() {
  Outcome out;
  out.pass = true;
  std::uint64_t cell = 0;
  double worst_gamma = 0.0, worst_sigma_rel = 0.0;
  for (double gamma : {0.2, 0.5, 0.9}) {
    for (double sigma : {0.5, 1.0, 5.0}) {
      ++cell;
      double sum_gamma = 0.0, sum_sigma = 0.0;
      for (std::uint64_t rep = 1; rep <= 20; ++rep) {
        const Eigen::ArrayXd x = sample_gpd(20000, gamma, sigma, rep, cell);
        const GpdFit fit = fit_gpd(x);
        sum_gamma += fit.gamma;
        sum_sigma += fit.sigma;
      }
      const double dg = std::abs(sum_gamma / 20.0 - gamma);
      const double ds = std::abs(sum_sigma / 20.0 - sigma) / sigma;
      worst_gamma = std::max(worst_gamma, dg);
      worst_sigma_rel = std::max(worst_sigma_rel, ds);
      out.pass = out.pass && dg <= 0.05 && ds <= 0.05;
    }
  }
  out.detail = "9 cells x 20 seeds: max |mean gamma error| " + fmt(worst_gamma) +
               " (cap 0.05), max relative sigma error " + fmt(worst_sigma_rel) +
               " (cap 0.05)";
  return out;
}

Outcome criterion7() {
  Outcome out;
  out.pass = true;
  double worst_round = 0.0, worst_tau = 0.0;
  const std::vector<CopulaFamily> families = {
      CopulaFamily::ClaytonSurvival, CopulaFamily::Gumbel, CopulaFamily::Frank};
  std::uint64_t seed = 500;
  for (CopulaFamily family : families) {
    for (double tau : {0.3, 0.5, 0.7}) {
      const double delta = tau_to_param(family, tau);
      worst_round = std::max(worst_round,
                             std::abs(param_to_tau(family, delta) - tau));
      const UniformPairs uv = sample_copula({family, delta}, 100000, ++seed);
      worst_tau =
          std::max(worst_tau, std::abs(kendall_tau_fast(uv.v, uv.w) - tau));
    }
  }
  out.pass = out.pass && worst_round <= 1e-8 && worst_tau <= 0.01;

  const double u = 0.005;
  const auto lambda_hat = [&](CopulaFamily family) {
    const UniformPairs uv =
        sample_copula({family, tau_to_param(family, 0.5)}, 1000000, 901);
    std::int64_t joint = 0;
    for (Eigen::Index i = 0; i < uv.v.size(); ++i)
      joint += (uv.v[i] >= 1.0 - u && uv.w[i] >= 1.0 - u) ? 1 : 0;
    return static_cast<double>(joint) / (1000000.0 * u);
  };
  const double gumbel_lambda = lambda_hat(CopulaFamily::Gumbel);
  const double frank_lambda = lambda_hat(CopulaFamily::Frank);
  const double gumbel_target = 2.0 - std::sqrt(2.0);
  out.pass = out.pass && std::abs(gumbel_lambda - gumbel_target) <= 0.05 &&
             frank_lambda < 0.05;
  out.detail = "round trip err " + fmt(worst_round) + ", tau err " +
               fmt(worst_tau) + ", gumbel lambda " + fmt(gumbel_lambda) +
               " vs " + fmt(gumbel_target) + ", frank lambda " +
               fmt(frank_lambda);
  return out;
}

Outcome criterion8() {
  Rng rng(8, 0);
  int equal = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const auto n = static_cast<Eigen::Index>(2 + rng.next_u64() % 199);
    const std::uint64_t modulus = instance % 2 == 0 ? 5 : 1000;
    Eigen::ArrayXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.next_u64() % modulus);
      y[i] = static_cast<double>(rng.next_u64() % modulus);
    }
    x[0] = -1.0;
    y[0] = -2.0;
    equal += kendall_tau_fast(x, y) == kendall_tau_brute(x, y) ? 1 : 0;
  }
  Outcome out;
  out.pass = equal == 200;
  out.detail = std::to_string(equal) + "/200 instances bit-identical";
  return out;
}

Outcome criterion9() {
  std::vector<EventRecord> records =
      testsupport::make_flood_corpus(1200, kFloodCorpusSeed);
  deflate(records);

  Eigen::ArrayXd damages(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    damages[static_cast<Eigen::Index>(i)] = records[i].damage;
  const GpdFit fit = pot_fit(damages, 0.8);
  const bool gamma_ok = std::abs(fit.gamma - 0.7) <= 0.1;

  TreeHyper hyper;
  const CvReport report = kfold_cv(records, 10, 1, hyper);
  std::set<std::int64_t> seen;
  for (const CvCase& c : report.cases) seen.insert(c.record_id);
  const bool coverage = report.cases.size() == 1200 && seen.size() == 1200 &&
                        *seen.begin() == 0 && *seen.rbegin() == 1199;

  const std::vector<DecileRow> deciles = rmse_by_decile(report);
  const double top = deciles.back().rmse;
  const double median =
      std::max(deciles[4].rmse, deciles[5].rmse);
  const bool gradient = top >= 5.0 * median;

  Outcome out;
  out.pass = gamma_ok && coverage && gradient;
  out.detail = "gamma " + fmt(fit.gamma) + " vs 0.7 +- 0.1; top/median rmse " +
               fmt(top / median) + " (need >= 5); coverage " +
               (coverage ? "1200/1200" : "broken");
  return out;
}

Outcome criterion10() {
  const auto dir_a = testsupport::make_temp_dir("acceptance_fig1_a");
  const auto dir_b = testsupport::make_temp_dir("acceptance_fig1_b");
  const auto run_once = [](const std::filesystem::path& dir) {
    const std::string command = std::string(BASISRISK_CLI_PATH) +
                                " figures fig1 --n 200000 --seed 7 --out " +
                                dir.string() + " >/dev/null 2>&1";
    const auto start = std::chrono::steady_clock::now();
    const int status = std::system(command.c_str());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return std::pair<int, double>(
        WIFEXITED(status) ? WEXITSTATUS(status) : -1, seconds);
  };
  const auto [code_a, time_a] = run_once(dir_a);
  const auto [code_b, time_b] = run_once(dir_b);

  Outcome out;
  if (code_a != 0 || code_b != 0) {
    out.detail = "cli exited " + std::to_string(code_a) + "/" +
                 std::to_string(code_b);
    return out;
  }
  bool identical = true;
  std::string first_hash;
  for (const char* name : {"fig1_mean.csv", "fig1_square.csv"}) {
    const std::string hash_a = sha256_hex_of_file(dir_a / name);
    const std::string hash_b = sha256_hex_of_file(dir_b / name);
    identical = identical && hash_a == hash_b;
    if (first_hash.empty()) first_hash = hash_a.substr(0, 12);
  }
  const bool fast_enough = time_b <= 2.0 * time_a + 2.0;
  out.pass = identical && fast_enough;
  out.detail = std::string(identical ? "checksums identical ("
                                     : "checksums differ (") +
               first_hash + "...); runs " + fmt(time_a) + " s / " +
               fmt(time_b) + " s";
  testsupport::remove_tree(dir_a);
  testsupport::remove_tree(dir_b);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--criterion") selected = std::atoi(argv[i + 1]);
  }
  if (selected < 0 || selected > 10) {
    std::fprintf(stderr, "usage: acceptance [--criterion 1..10]\n");
    return 1;
  }

  using CriterionFn = Outcome (*)();
  const CriterionFn criteria[10] = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  const double limits_s[10] = {60.0, 1.0, 90.0, 180.0, 60.0,
                               30.0, 30.0, 5.0,  20.0,  -1.0};

  bool all_pass = true;
  for (int index = 0; index < 10; ++index) {
    if (selected != 0 && selected != index + 1) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[index]();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    bool timed_out = limits_s[index] > 0.0 && seconds >= limits_s[index];
    const bool pass = outcome.pass && !timed_out;
    std::printf("[%s] criterion %d: %s; %s s%s\n", pass ? "PASS" : "FAIL",
                index + 1, outcome.detail.c_str(), fmt(seconds).c_str(),
                timed_out ? " (runtime limit exceeded)" : "");
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
