#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "basisrisk/evt.hpp"
#include "basisrisk/io.hpp"
#include "support.hpp"

using namespace basisrisk;
using testsupport::make_flood_corpus;
using testsupport::make_temp_dir;
using testsupport::remove_tree;
using testsupport::write_flood_csv;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunResult run_command(const std::string& command_line) {
  const auto dir = make_temp_dir("cli_streams");
  const auto out_path = dir / "out.txt";
  const auto err_path = dir / "err.txt";
  const std::string command = command_line + " >" + out_path.string() + " 2>" +
                              err_path.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  remove_tree(dir);
  return result;
}

RunResult run_cli(const std::string& args) {
  return run_command(std::string(BASISRISK_CLI_PATH) + " " + args);
}

}  // namespace

TEST_CASE("a subcommand is required") {
  auto result = run_cli("");
  CHECK(result.exit_code != 0);
  auto help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("floods") != std::string::npos);
}

TEST_CASE("simulate rejects an out-of-range tau") {
  auto dir = make_temp_dir("cli_tau");
  auto result =
      run_cli("simulate --family frank --tau 1.2 --n 2000 --out " + dir.string());
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("tau") != std::string::npos);
  remove_tree(dir);
}

TEST_CASE("simulate reruns are byte identical") {
  auto dir1 = make_temp_dir("cli_sim1");
  auto dir2 = make_temp_dir("cli_sim2");
  const std::string flags = "simulate --family gumbel --tau 0.5 --n 2000 --seed 9 --out ";
  auto first = run_cli(flags + dir1.string());
  auto second = run_cli(flags + dir2.string());
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);
  CHECK(sha256_hex_of_file(dir1 / "sample.csv") ==
        sha256_hex_of_file(dir2 / "sample.csv"));

  std::ifstream in(dir1 / "manifest.json");
  nlohmann::json manifest = nlohmann::json::parse(in);
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["config"]["family"] == "gumbel");
  CHECK(manifest["outputs"][0]["sha256"] ==
        sha256_hex_of_file(dir1 / "sample.csv"));

  auto moved = run_cli(
      "simulate --family gumbel --tau 0.5 --n 2000 --seed 10 --out " +
      dir2.string());
  REQUIRE(moved.exit_code == 0);
  CHECK(sha256_hex_of_file(dir1 / "sample.csv") !=
        sha256_hex_of_file(dir2 / "sample.csv"));
  remove_tree(dir1);
  remove_tree(dir2);
}

TEST_CASE("the margin preset excludes explicit margin flags") {
  auto dir = make_temp_dir("cli_preset");
  auto result = run_cli(
      "simulate --preset-benchmark-compatible --b 1.2 --n 2000 --out " +
      dir.string());
  CHECK(result.exit_code == 1);
  auto ok = run_cli(
      "simulate --preset-benchmark-compatible --tau 0.5 --n 2000 --out " +
      dir.string());
  CHECK(ok.exit_code == 0);
  remove_tree(dir);
}

TEST_CASE("figures rejects unknown ids and lists the valid ones") {
  auto result = run_cli("figures fig9 --n 2000");
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("fig1") != std::string::npos);
}

TEST_CASE("fit-gpd recovers an exponential tail from a csv column") {
  auto dir = make_temp_dir("cli_gpd");
  Table table;
  table.name = "values";
  table.columns = {"z", "note"};
  Eigen::ArrayXd z = sample_gpd(5000, 0.0, 2.0, 13);
  for (Eigen::Index i = 0; i < z.size(); ++i)
    table.rows.push_back({format_double(z[i]), "row"});
  table.rows.push_back({"", "blank values are skipped"});
  auto csv = write_csv_atomic(dir, table);

  auto result = run_cli("fit-gpd --input " + csv.string() +
                        " --column z --level 0.8 --out " + dir.string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("gamma=") != std::string::npos);

  std::ifstream in(dir / "gpd_fit.json");
  nlohmann::json fit = nlohmann::json::parse(in);
  CHECK(std::abs(fit["gamma"].get<double>()) < 0.15);
  CHECK(fit["n_excess"] == 1000);
  auto qq = read_csv(dir / "qq_exponential.csv");
  CHECK(qq.rows.size() == 1000);

  auto missing = run_cli("fit-gpd --input " + csv.string() +
                         " --column nope --out " + dir.string());
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("nope") != std::string::npos);

  table.name = "words";
  table.rows[0][0] = "12abc";
  auto bad_csv = write_csv_atomic(dir, table);
  auto bad = run_cli("fit-gpd --input " + bad_csv.string() +
                     " --column z --out " + dir.string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("12abc") != std::string::npos);

  auto absent = run_cli("fit-gpd --input " + (dir / "no_such.csv").string() +
                        " --column z --out " + dir.string());
  CHECK(absent.exit_code == 3);
  remove_tree(dir);
}

TEST_CASE("floods runs the full pipeline") {
  auto dir = make_temp_dir("cli_floods");
  auto corpus = make_flood_corpus(300, 5);
  auto csv = dir / "events.csv";
  write_flood_csv(csv, corpus);

  auto result = run_cli("floods --input " + csv.string() +
                        " --k 5 --seed 3 --max-depth 4 --min-leaf 5 --out " +
                        dir.string());
  REQUIRE(result.exit_code == 0);
  auto cv = read_csv(dir / "cv_report.csv");
  CHECK(cv.rows.size() == 300);
  auto deciles = read_csv(dir / "rmse_by_decile.csv");
  CHECK(deciles.rows.size() == 10);

  std::ifstream in(dir / "manifest.json");
  nlohmann::json manifest = nlohmann::json::parse(in);
  CHECK(manifest["config"]["n_records"] == 300);
  CHECK(manifest["config"]["k"] == 5);
  CHECK(manifest["config"].contains("deflation_b"));

  auto bad = run_cli("floods --input " + csv.string() + " --k 1 --out " +
                     dir.string());
  CHECK(bad.exit_code == 1);
  remove_tree(dir);
}

TEST_CASE("gaussian-check agrees with its own closed forms") {
  auto dir = make_temp_dir("cli_gauss");
  auto result = run_cli("gaussian-check --n 200000 --seed 2 --out " +
                        dir.string());
  CHECK(result.exit_code == 0);
  auto table = read_csv(dir / "gaussian_check.csv");
  CHECK(table.rows.size() == 8);
  CHECK(table.columns[0] == "metric");

  auto bad = run_cli("gaussian-check --rho 1.5 --n 2000 --out " + dir.string());
  CHECK(bad.exit_code == 1);
  remove_tree(dir);
}

TEST_CASE("the outdir env var is the fallback output location") {
  auto dir = make_temp_dir("cli_env");
  auto result = run_command("env BASISRISK_OUTDIR=" + dir.string() + " " +
                            std::string(BASISRISK_CLI_PATH) +
                            " simulate --n 2000 --seed 4");
  CHECK(result.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "sample.csv"));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  remove_tree(dir);
}
