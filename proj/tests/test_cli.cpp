#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refugia/config.hpp"
#include "refugia/manifest.hpp"
#include "refugia/svg.hpp"

using namespace refugia;
namespace fs = std::filesystem;

namespace {

const char* kRingConfig = R"({
  "domain": {"kind": "ring1d", "circumference": 6.283185307179586,
             "refuge_start": 0.0, "refuge_length": 3.141592653589793,
             "resolution": 64},
  "model": {"lambda": 1.0, "mu": 2.0, "b": 1.0, "c": 1.0, "alpha": 0.5},
  "seed": 42,
  "output_dir": "cli_test_out"
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parses with defaults and validates the fixture") {
  const RunConfig cfg = parse_config_text(kRingConfig);
  CHECK(cfg.model.mu == 2.0);
  CHECK(cfg.model.alpha == 0.5);
  CHECK(cfg.seed == 42);
  CHECK(cfg.newton.tol == 1e-10);
  CHECK(std::holds_alternative<RingSpec>(cfg.domain));
}

TEST_CASE("invalid model parameters are rejected with context") {
  const char* bad = R"({"model": {"b": -1.0}})";
  CHECK_THROWS_AS(parse_config_text(bad), Error);
  try {
    parse_config_text(bad);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation_error);
    CHECK(std::string(e.what()).find("b must be positive") != std::string::npos);
  }
}

TEST_CASE("degenerate geometry is rejected at parse time") {
  const char* bad = R"({
    "domain": {"kind": "ring1d", "circumference": 6.0, "refuge_length": 6.0,
               "resolution": 64}
  })";
  CHECK_THROWS_AS(parse_config_text(bad), Error);
}

TEST_CASE("unknown keys are rejected") {
  const char* bad = R"({"model": {"lambda": 1.0, "lambdda": 2.0}})";
  try {
    parse_config_text(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("lambdda") != std::string::npos);
  }
}

TEST_CASE("malformed JSON reports a parse error") {
  CHECK_THROWS_AS(parse_config_text("{nope"), Error);
  try {
    parse_config_text("{nope");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
  }
}

TEST_CASE("canonical config serialization is stable") {
  const RunConfig a = parse_config_text(kRingConfig);
  const RunConfig b = parse_config_text(kRingConfig);
  CHECK(canonical_config(a) == canonical_config(b));
  RunConfig c = a;
  c.model.alpha = 0.75;
  CHECK(canonical_config(a) != canonical_config(c));
}

TEST_CASE("manifest is written atomically and references outputs") {
  const RunConfig cfg = parse_config_text(kRingConfig);
  const Grid grid = build_grid(cfg.domain);
  const std::string dir = "manifest_test_out";
  fs::remove_all(dir);
  RunManifest manifest(cfg, grid, "test");
  manifest.add_output(dir + "/data.csv");
  manifest.add_metric("answer", 42.0);
  manifest.write(dir);
  CHECK(fs::exists(fs::path(dir) / "manifest.json"));
  CHECK(!fs::exists(fs::path(dir) / "manifest.json.tmp"));
  const auto j = nlohmann::json::parse(slurp(fs::path(dir) / "manifest.json"));
  CHECK(j["command"] == "test");
  CHECK(j["outputs"].size() == 1);
  CHECK(j["metrics"]["answer"] == 42.0);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  fs::remove_all(dir);
}

TEST_CASE("grid checksum tracks geometry") {
  const RunConfig cfg = parse_config_text(kRingConfig);
  const Grid g1 = build_grid(cfg.domain);
  const Grid g2 = build_grid(cfg.domain);
  CHECK(grid_checksum(g1) == grid_checksum(g2));
  RingSpec other = std::get<RingSpec>(cfg.domain);
  other.resolution = 128;
  CHECK(grid_checksum(build_grid(DomainSpec{other})) != grid_checksum(g1));
}

TEST_CASE("csv output is deterministic byte for byte") {
  const std::string d1 = "csv_det_1", d2 = "csv_det_2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::create_directories(d1);
  fs::create_directories(d2);
  for (const std::string& dir : {d1, d2}) {
    CsvWriter csv(dir + "/t.csv", "deadbeefdeadbeef", {"a", "b"});
    csv.row({1.0 / 3.0, 2.0 / 7.0});
    csv.row({1e-17, 3.14159265358979});
  }
  CHECK(slurp(d1 + "/t.csv") == slurp(d2 + "/t.csv"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("svg plotter emits wellformed-looking output") {
  SvgPlot plot("test", "x", "y");
  plot.add_line({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}, "parabola");
  plot.add_points({0.5}, {0.25});
  const std::string path = "svg_test.svg";
  plot.write(path);
  const std::string content = slurp(path);
  CHECK(content.find("<svg") != std::string::npos);
  CHECK(content.find("polyline") != std::string::npos);
  CHECK(content.find("</svg>") != std::string::npos);
  fs::remove(path);
}
