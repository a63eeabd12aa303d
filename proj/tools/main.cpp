#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "basisrisk/evt.hpp"
#include "basisrisk/flood.hpp"
#include "basisrisk/gaussian.hpp"
#include "basisrisk/io.hpp"
#include "basisrisk/simlab.hpp"
#include "basisrisk/tail_metrics.hpp"

namespace {

using basisrisk::format_double;
using basisrisk::ManifestBuilder;
using basisrisk::Table;
using nlohmann::json;

class Stopwatch {
 public:
  double elapsed_ms() const {
    const auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(now - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void finish(ManifestBuilder& manifest, const Stopwatch& watch,
            const std::filesystem::path& outdir) {
  manifest.set_duration_ms(watch.elapsed_ms());
  const auto path = manifest.write(outdir);
  std::cout << "wrote " << path.string() << "\n";
}

std::filesystem::path write_table(const std::filesystem::path& outdir,
                                  const Table& table,
                                  ManifestBuilder& manifest) {
  const auto path = basisrisk::write_csv_atomic(outdir, table);
  manifest.add_output(path, static_cast<std::int64_t>(table.rows.size()));
  std::cout << "wrote " << path.string() << " (" << table.rows.size()
            << " rows)\n";
  return path;
}

struct SimulateArgs {
  basisrisk::MainSettingConfig cfg;
  std::string family = "frank";
  bool preset = false;
  std::string outdir;
};

std::vector<CLI::Option*> add_margin_options(CLI::App* cmd,
                                             basisrisk::MainSettingConfig& cfg) {
  return {
      cmd->add_option("--u", cfg.u, "Pareto scale of the severity parameter"),
      cmd->add_option("--b", cfg.b, "Pareto shape of the payout-side parameter"),
      cmd->add_option("--alpha", cfg.alpha, "Payout log-intercept"),
      cmd->add_option("--beta", cfg.beta, "Payout exponent"),
      cmd->add_option("--shape-tp", cfg.shape_tp,
                      "Pareto shape of the loss-side parameter"),
      cmd->add_option("--alpha-x", cfg.alpha_x, "Loss log-intercept"),
      cmd->add_option("--beta-x", cfg.beta_x, "Loss exponent"),
  };
}

void run_simulate(const SimulateArgs& args) {
  Stopwatch watch;
  basisrisk::MainSettingConfig cfg =
      args.preset ? basisrisk::benchmark_compatible_preset() : args.cfg;
  if (args.preset) {
    cfg.tau = args.cfg.tau;
    cfg.n = args.cfg.n;
    cfg.seed = args.cfg.seed;
  }
  cfg.family = basisrisk::family_from_name(args.family);
  const basisrisk::PairedSample sample = basisrisk::run_main_setting(cfg);

  Table table;
  table.name = "sample";
  table.columns = {"x", "y"};
  table.rows.reserve(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index i = 0; i < sample.size(); ++i)
    table.rows.push_back(
        {format_double(sample.x[i]), format_double(sample.y[i])});

  const std::filesystem::path outdir =
      args.outdir.empty() ? basisrisk::default_outdir()
                          : std::filesystem::path(args.outdir);
  ManifestBuilder manifest("simulate", cfg.seed);
  manifest.set_config(json{{"family", basisrisk::family_name(cfg.family)},
                           {"tau", cfg.tau},
                           {"n", cfg.n},
                           {"seed", cfg.seed},
                           {"u", cfg.u},
                           {"b", cfg.b},
                           {"alpha", cfg.alpha},
                           {"beta", cfg.beta},
                           {"shape_tp", cfg.shape_tp},
                           {"alpha_x", cfg.alpha_x},
                           {"beta_x", cfg.beta_x},
                           {"preset", args.preset}});
  write_table(outdir, table, manifest);
  finish(manifest, watch, outdir);
}

struct FiguresArgs {
  std::string figure;
  std::int64_t n = 1'000'000;
  std::uint64_t seed = 1;
  std::string outdir;
};

void run_figures(const FiguresArgs& args) {
  Stopwatch watch;
  const std::vector<Table> tables =
      basisrisk::figure_suite(args.figure, args.n, args.seed);
  const std::filesystem::path outdir =
      args.outdir.empty() ? basisrisk::default_outdir()
                          : std::filesystem::path(args.outdir);
  ManifestBuilder manifest("figures", args.seed);
  manifest.set_config(
      json{{"figure", args.figure}, {"n", args.n}, {"seed", args.seed}});
  for (const Table& table : tables) write_table(outdir, table, manifest);
  finish(manifest, watch, outdir);
}

struct FitGpdArgs {
  std::string input;
  std::string column;
  double level = 0.8;
  std::string outdir;
};

void run_fit_gpd(const FitGpdArgs& args) {
  Stopwatch watch;
  const basisrisk::CsvFile csv = basisrisk::read_csv(args.input);
  const auto it =
      std::find(csv.columns.begin(), csv.columns.end(), args.column);
  if (it == csv.columns.end())
    throw std::invalid_argument("input is missing column '" + args.column +
                                "'");
  const auto col = static_cast<std::size_t>(it - csv.columns.begin());
  std::vector<double> values;
  values.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    const std::string& field = row[col];
    if (field.empty()) continue;
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size())
      throw std::invalid_argument("non-numeric value '" + field +
                                  "' in column '" + args.column + "'");
    values.push_back(value);
  }
  Eigen::ArrayXd data =
      Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                       static_cast<Eigen::Index>(values.size()));
  const basisrisk::GpdFit fit = basisrisk::pot_fit(data, args.level);

  Eigen::ArrayXd excesses(fit.n_excess);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    if (data[i] > fit.threshold) excesses[at++] = data[i] - fit.threshold;
  const std::vector<basisrisk::QqPoint> qq = basisrisk::qq_exponential(excesses);

  Table table;
  table.name = "qq_exponential";
  table.columns = {"theoretical", "empirical"};
  for (const basisrisk::QqPoint& pt : qq)
    table.rows.push_back(
        {format_double(pt.theoretical), format_double(pt.empirical)});

  const std::filesystem::path outdir =
      args.outdir.empty() ? basisrisk::default_outdir()
                          : std::filesystem::path(args.outdir);
  ManifestBuilder manifest("fit-gpd", 0);
  manifest.set_config(json{{"input", args.input},
                           {"column", args.column},
                           {"level", args.level}});
  const json fit_json{{"threshold", fit.threshold},
                      {"gamma", fit.gamma},
                      {"sigma", fit.sigma},
                      {"n_excess", fit.n_excess},
                      {"log_likelihood", fit.log_likelihood},
                      {"se_gamma", fit.se_gamma},
                      {"se_sigma", fit.se_sigma}};
  const std::filesystem::path fit_path = outdir / "gpd_fit.json";
  basisrisk::write_text_atomic(fit_path, fit_json.dump(2) + "\n");
  manifest.add_output(fit_path, 1);
  std::cout << "wrote " << fit_path.string() << "\n";
  write_table(outdir, table, manifest);
  finish(manifest, watch, outdir);
  std::cout << "gamma=" << format_double(fit.gamma)
            << " sigma=" << format_double(fit.sigma)
            << " threshold=" << format_double(fit.threshold)
            << " n_excess=" << fit.n_excess << "\n";
}

struct FloodsArgs {
  std::string input;
  int k = 10;
  std::uint64_t seed = 1;
  basisrisk::TreeHyper hyper;
  std::string outdir;
};

void run_floods(const FloodsArgs& args) {
  Stopwatch watch;
  basisrisk::LoadReport loaded = basisrisk::load_events(args.input);
  const basisrisk::DeflationCoefficients coef =
      basisrisk::deflate(loaded.records);
  const basisrisk::CvReport report =
      basisrisk::kfold_cv(loaded.records, args.k, args.seed, args.hyper);
  const std::vector<basisrisk::DecileRow> deciles =
      basisrisk::rmse_by_decile(report);

  Table cv_table;
  cv_table.name = "cv_report";
  cv_table.columns = {"record_id", "actual", "predicted", "sq_error"};
  for (const basisrisk::CvCase& c : report.cases)
    cv_table.rows.push_back({std::to_string(c.record_id),
                             format_double(c.actual),
                             format_double(c.predicted),
                             format_double(c.sq_error)});

  Table decile_table;
  decile_table.name = "rmse_by_decile";
  decile_table.columns = {"damage_lower", "damage_upper", "rmse", "n"};
  for (const basisrisk::DecileRow& row : deciles)
    decile_table.rows.push_back(
        {format_double(row.damage_lower), format_double(row.damage_upper),
         format_double(row.rmse), std::to_string(row.n)});

  const std::filesystem::path outdir =
      args.outdir.empty() ? basisrisk::default_outdir()
                          : std::filesystem::path(args.outdir);
  ManifestBuilder manifest("floods", args.seed);
  manifest.set_config(json{{"input", args.input},
                           {"k", args.k},
                           {"seed", args.seed},
                           {"max_depth", args.hyper.max_depth},
                           {"min_leaf", args.hyper.min_leaf},
                           {"deflation_a", coef.a},
                           {"deflation_b", coef.b},
                           {"n_records", loaded.records.size()},
                           {"n_dropped", loaded.n_dropped},
                           {"rmse", report.rmse}});
  write_table(outdir, cv_table, manifest);
  write_table(outdir, decile_table, manifest);
  finish(manifest, watch, outdir);
}

struct GaussianCheckArgs {
  basisrisk::GaussianPairSpec spec;
  std::int64_t n = 1'000'000;
  std::uint64_t seed = 1;
  std::string outdir;
};

int run_gaussian_check(const GaussianCheckArgs& args) {
  Stopwatch watch;
  args.spec.validate();
  const basisrisk::PairedSample sample =
      basisrisk::sample_bivariate_gaussian(args.spec, args.n, args.seed);

  Table table;
  table.name = "gaussian_check";
  table.columns = {"metric", "s",         "mc",        "mc_se",
                   "exact",  "asymptotic", "z"};
  bool all_close = true;
  for (int offset = 0; offset <= 3; ++offset) {
    const double s = args.spec.mu_x + offset * args.spec.sigma_x;
    const basisrisk::ExcessEstimate mean =
        basisrisk::conditional_mean_diff(sample, s);
    const basisrisk::ExcessEstimate square =
        basisrisk::conditional_sq_diff(sample, s);
    const double mean_exact = basisrisk::cond_mean_diff_exact(args.spec, s);
    const double square_exact = basisrisk::cond_sq_diff_exact(args.spec, s);
    const double mean_z = (mean.estimate - mean_exact) / mean.std_error;
    const double square_z =
        (square.estimate - square_exact) / square.std_error;
    all_close = all_close && std::abs(mean_z) <= 4.0 &&
                std::abs(square_z) <= 4.0;
    table.rows.push_back(
        {"mean", format_double(s), format_double(mean.estimate),
         format_double(mean.std_error), format_double(mean_exact),
         format_double(basisrisk::cond_mean_diff_asymptotic(args.spec, s)),
         format_double(mean_z)});
    table.rows.push_back(
        {"square", format_double(s), format_double(square.estimate),
         format_double(square.std_error), format_double(square_exact),
         format_double(basisrisk::cond_sq_diff_asymptotic(args.spec, s)),
         format_double(square_z)});
  }

  const std::filesystem::path outdir =
      args.outdir.empty() ? basisrisk::default_outdir()
                          : std::filesystem::path(args.outdir);
  ManifestBuilder manifest("gaussian-check", args.seed);
  manifest.set_config(json{{"mu_x", args.spec.mu_x},
                           {"mu_y", args.spec.mu_y},
                           {"sigma_x", args.spec.sigma_x},
                           {"sigma_y", args.spec.sigma_y},
                           {"rho", args.spec.rho},
                           {"n", args.n},
                           {"seed", args.seed}});
  write_table(outdir, table, manifest);
  finish(manifest, watch, outdir);
  if (!all_close) {
    std::cerr << "monte carlo disagrees with the closed forms (|z| > 4)\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Basis-risk simulation and estimation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a TOML/INI file");

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Draw a paired (loss, payout) sample");
  simulate->add_option("--family", sim.family,
                       "clayton-survival | gumbel | frank | gaussian | "
                       "independence | comonotone");
  simulate->add_option("--tau", sim.cfg.tau, "Kendall tau target");
  simulate->add_option("--n", sim.cfg.n, "Sample size");
  simulate->add_option("--seed", sim.cfg.seed, "Master seed");
  const std::vector<CLI::Option*> margin_options =
      add_margin_options(simulate, sim.cfg);
  CLI::Option* preset_flag =
      simulate->add_flag("--preset-benchmark-compatible", sim.preset,
                         "Use the finite-variance margin preset");
  for (CLI::Option* option : margin_options) preset_flag->excludes(option);
  simulate->add_option("--out", sim.outdir, "Output directory");

  FiguresArgs fig;
  CLI::App* figures =
      app.add_subcommand("figures", "Run one figure's simulation grid");
  figures->add_option("figure", fig.figure, "fig1 | fig2 | fig3 | fig4")
      ->required();
  figures->add_option("--n", fig.n, "Sample size per cell");
  figures->add_option("--seed", fig.seed, "Master seed");
  figures->add_option("--out", fig.outdir, "Output directory");

  FitGpdArgs gpd;
  CLI::App* fit_gpd =
      app.add_subcommand("fit-gpd", "Peaks-over-threshold fit on a CSV column");
  fit_gpd->add_option("--input", gpd.input, "Input CSV")->required();
  fit_gpd->add_option("--column", gpd.column, "Numeric column name")
      ->required();
  fit_gpd->add_option("--level", gpd.level,
                      "Threshold quantile level in (0.5, 1)");
  fit_gpd->add_option("--out", gpd.outdir, "Output directory");

  FloodsArgs floods;
  CLI::App* floods_cmd = app.add_subcommand(
      "floods", "Deflate, cross-validate and summarize flood damages");
  floods_cmd->add_option("--input", floods.input, "Event CSV")->required();
  floods_cmd->add_option("--k", floods.k, "Number of folds");
  floods_cmd->add_option("--seed", floods.seed, "Fold-shuffle seed");
  floods_cmd->add_option("--max-depth", floods.hyper.max_depth, "Tree depth cap");
  floods_cmd->add_option("--min-leaf", floods.hyper.min_leaf,
                         "Minimum records per leaf");
  floods_cmd->add_option("--out", floods.outdir, "Output directory");

  GaussianCheckArgs gauss;
  CLI::App* gaussian_check = app.add_subcommand(
      "gaussian-check", "Compare Monte Carlo against the Gaussian closed forms");
  gaussian_check->add_option("--mu-x", gauss.spec.mu_x, "Mean of the loss");
  gaussian_check->add_option("--mu-y", gauss.spec.mu_y, "Mean of the payout");
  gaussian_check->add_option("--sigma-x", gauss.spec.sigma_x,
                             "Std dev of the loss");
  gaussian_check->add_option("--sigma-y", gauss.spec.sigma_y,
                             "Std dev of the payout");
  gaussian_check->add_option("--rho", gauss.spec.rho, "Correlation");
  gaussian_check->add_option("--n", gauss.n, "Sample size");
  gaussian_check->add_option("--seed", gauss.seed, "Master seed");
  gaussian_check->add_option("--out", gauss.outdir, "Output directory");

  int gaussian_status = 0;
  simulate->callback([&] { run_simulate(sim); });
  figures->callback([&] { run_figures(fig); });
  fit_gpd->callback([&] { run_fit_gpd(gpd); });
  floods_cmd->callback([&] { run_floods(floods); });
  gaussian_check->callback([&] { gaussian_status = run_gaussian_check(gauss); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return gaussian_status;
}
