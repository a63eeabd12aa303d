#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include "basisrisk/io.hpp"
#include "support.hpp"

using namespace basisrisk;
using testsupport::make_temp_dir;
using testsupport::remove_tree;

TEST_CASE("double rendering round trips and is stable") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.0) == "-0");
  for (double v : {0.1, 1.0 / 3.0, 3867524.748545796, 1e-300, -2.5e17}) {
    const std::string text = format_double(v);
    CHECK(std::stod(text) == v);
    CHECK(format_double(v) == text);
  }
}

TEST_CASE("csv writes atomically and reads back verbatim") {
  auto dir = make_temp_dir("io_csv");
  Table table;
  table.name = "sample";
  table.columns = {"label", "value"};
  table.rows = {{"plain", "1.5"},
                {"comma, inside", "2"},
                {"quote \" inside", "3"},
                {"line\nbreak", "4"}};
  auto path = write_csv_atomic(dir, table);
  CHECK(path.filename() == "sample.csv");

  auto parsed = read_csv(path);
  CHECK(parsed.columns == table.columns);
  REQUIRE(parsed.rows.size() == 4);
  CHECK(parsed.rows == table.rows);
  remove_tree(dir);
}

TEST_CASE("ragged tables are rejected before touching the disk") {
  auto dir = make_temp_dir("io_ragged");
  Table table;
  table.name = "bad";
  table.columns = {"a", "b"};
  table.rows = {{"1"}};
  CHECK_THROWS_AS((void)write_csv_atomic(dir, table), std::invalid_argument);
  CHECK(!std::filesystem::exists(dir / "bad.csv"));
  remove_tree(dir);
}

TEST_CASE("csv reader rejects malformed input") {
  auto dir = make_temp_dir("io_badcsv");
  auto ragged = dir / "ragged.csv";
  write_text_atomic(ragged, "a,b\n1\n");
  CHECK_THROWS_AS((void)read_csv(ragged), std::ios_base::failure);
  auto unterminated = dir / "unterminated.csv";
  write_text_atomic(unterminated, "a,b\n\"open,2\n");
  CHECK_THROWS_AS((void)read_csv(unterminated), std::ios_base::failure);
  CHECK_THROWS_AS((void)read_csv(dir / "absent.csv"), std::ios_base::failure);
  remove_tree(dir);
}

TEST_CASE("csv reader handles windows line endings") {
  auto dir = make_temp_dir("io_crlf");
  auto path = dir / "crlf.csv";
  write_text_atomic(path, "a,b\r\n1,2\r\n");
  auto parsed = read_csv(path);
  CHECK(parsed.columns == std::vector<std::string>{"a", "b"});
  REQUIRE(parsed.rows.size() == 1);
  CHECK(parsed.rows[0] == std::vector<std::string>{"1", "2"});
  remove_tree(dir);
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
        "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
  // One full block plus one byte to cross the padding boundary.
  const std::string block(64, 'a');
  CHECK(sha256_hex(block + "a") == sha256_hex(std::string(65, 'a')));
}

TEST_CASE("file hashes match in-memory hashes") {
  auto dir = make_temp_dir("io_hash");
  auto path = dir / "blob.bin";
  std::string payload("some bytes\x00with a nul", 21);
  write_text_atomic(path, payload);
  CHECK(sha256_hex_of_file(path) == sha256_hex(payload));
  CHECK_THROWS_AS((void)sha256_hex_of_file(dir / "missing"), std::ios_base::failure);
  remove_tree(dir);
}

TEST_CASE("manifest records outputs with checksums") {
  auto dir = make_temp_dir("io_manifest");
  Table table;
  table.name = "numbers";
  table.columns = {"x"};
  table.rows = {{"1"}, {"2"}};
  auto csv = write_csv_atomic(dir, table);

  ManifestBuilder builder("simulate", 42);
  builder.set_config({{"family", "frank"}, {"tau", 0.3}});
  builder.add_output(csv, 2);
  builder.set_duration_ms(12.5);
  auto manifest_path = builder.write(dir);
  CHECK(manifest_path.filename() == "manifest.json");

  std::ifstream in(manifest_path);
  nlohmann::json manifest = nlohmann::json::parse(in);
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config"]["family"] == "frank");
  CHECK(manifest["duration_ms"] == 12.5);
  REQUIRE(manifest["outputs"].size() == 1);
  CHECK(manifest["outputs"][0]["file"] == "numbers.csv");
  CHECK(manifest["outputs"][0]["rows"] == 2);
  CHECK(manifest["outputs"][0]["sha256"] == sha256_hex_of_file(csv));
  remove_tree(dir);
}

TEST_CASE("output directory obeys the environment override") {
  ::setenv("BASISRISK_OUTDIR", "/tmp/basisrisk_custom", 1);
  CHECK(default_outdir() == std::filesystem::path("/tmp/basisrisk_custom"));
  ::setenv("BASISRISK_OUTDIR", "", 1);
  CHECK(default_outdir() == std::filesystem::path("out"));
  ::unsetenv("BASISRISK_OUTDIR");
  CHECK(default_outdir() == std::filesystem::path("out"));
}
