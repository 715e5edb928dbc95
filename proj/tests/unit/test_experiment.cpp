#include "threatnet/error.hpp"
#include "threatnet/experiment.hpp"

#include <doctest.h>

#include <filesystem>

using namespace threatnet;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "schema": 1,
    "name": "small",
    "generator": {"type": "sbm", "params": {"r_fg": 2.0}},
    "detectors": [
      {"name": "STTP", "type": "sttp", "bins": 20},
      {"name": "DWTP", "type": "spatial", "prior": "dwtp"},
      {"name": "SPEC", "type": "spectral", "which": "modularity"}
    ],
    "trials": 3,
    "seed": 5
  })");
}

}  // namespace

TEST_CASE("experiment parsing fills defaults") {
  const auto c = parse_experiment(small_config());
  CHECK(c.detectors.size() == 3);
  CHECK(c.detectors[0].type == DetectorType::sttp);
  CHECK(c.detectors[0].bins == 20);
  CHECK(c.detectors[1].prior.kind == PriorKind::dwtp);
  CHECK(c.detectors[2].spectral.kind == SpectralKind::principal_modularity);
  CHECK(c.trials == 3);
  CHECK(c.cues == 1);
  CHECK(c.aggregation == Aggregation::pool);
  CHECK(c.restrict_to_lcc);
  CHECK(config_hash(to_json(c)) == config_hash(to_json(parse_experiment(to_json(c)))));
}

TEST_CASE("experiment parsing rejects bad input") {
  auto j = small_config();
  j["colour"] = "red";
  CHECK_THROWS_AS(parse_experiment(j), InputError);
  j = small_config();
  j["detectors"][0]["bandwidth"] = 3;
  CHECK_THROWS_AS(parse_experiment(j), InputError);
  j = small_config();
  j["detectors"][1]["name"] = "STTP";
  CHECK_THROWS_AS(parse_experiment(j), InputError);
  j = small_config();
  j["trials"] = 0;
  CHECK_THROWS_AS(parse_experiment(j), InputError);
  j = small_config();
  j["schema"] = 2;
  CHECK_THROWS_AS(parse_experiment(j), InputError);
  j = small_config();
  j["generator"]["type"] = "kronecker";
  CHECK_THROWS_AS(parse_experiment(j), InputError);
}

TEST_CASE("sweeps expand into one config per value") {
  auto j = small_config();
  j["sweep"] = {{"pointer", "/generator/params/r_fg"}, {"values", {1.1, 2.0}}};
  const auto points = expand_sweep(j);
  REQUIRE(points.size() == 2);
  CHECK(points[0].label == "r_fg_1.1");
  CHECK(points[1].label == "r_fg_2.0");
  CHECK(points[0].config.generator_params["r_fg"] == 1.1);
  CHECK(expand_sweep(small_config()).size() == 1);
}

TEST_CASE("trials are reproducible and independent of the schedule") {
  const auto c = parse_experiment(small_config());
  const auto a = run_trial(c, 1, false);
  const auto b = run_trial(c, 1, true);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  REQUIRE(a.scores.size() == 3);
  for (std::size_t d = 0; d < 3; ++d) {
    CHECK(a.scores[d].scores == b.scores[d].scores);
    CHECK(a.scores[d].truth == b.scores[d].truth);
  }
  const auto other = run_trial(c, 2, false);
  CHECK(other.scores[1].scores != a.scores[1].scores);
}

TEST_CASE("experiment results and files") {
  const auto c = parse_experiment(small_config());
  const auto serial = run_experiment(c, false);
  const auto parallel = run_experiment(c, true);
  CHECK(serial.trials == 3);
  CHECK(serial.aborted == 0);
  REQUIRE(serial.detectors.size() == 3);
  for (std::size_t d = 0; d < 3; ++d) {
    CHECK(serial.detectors[d].curve.auc == parallel.detectors[d].curve.auc);
    CHECK(serial.detectors[d].curve.auc >= 0.0);
    CHECK(serial.detectors[d].curve.auc <= 1.0);
  }
  const auto dir = std::filesystem::temp_directory_path() / "threatnet_experiment_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_experiment(dir, c, serial);
  CHECK(std::filesystem::exists(dir / "roc_STTP.csv"));
  CHECK(std::filesystem::exists(dir / "roc_SPEC.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "roc.svg"));
  const auto summary = summary_json(c, serial);
  CHECK(summary == summary_json(c, parallel));
  std::filesystem::remove_all(dir);
}
