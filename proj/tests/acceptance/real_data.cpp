#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli_runner.hpp"
#include "criteria.hpp"
#include "report.hpp"

namespace spu::acceptance {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Expected layout of $SPATIALPU_IDA_DIR:
//   tracts.geojson   tract polygons in lon/lat, GEOID property
//   covariates.csv   GEOID, population and the default feature columns
//   reports.csv      311 street-flood export ("Created Date", "Latitude", "Longitude")
constexpr const char* kWindowStart = "2021-09-01T00:00:00";
constexpr const char* kWindowEnd = "2021-09-09T00:00:00";
constexpr std::size_t kNodes = 2221, kTrain = 177, kTest = 346;
constexpr double kCiLo = 0.08, kCiHi = 0.21;
constexpr double kAuc = 0.680, kAucTolerance = 0.05;

json read_json(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return json::parse(ss.str());
}

}  // namespace

Outcome real_data() {
  const char* root = std::getenv("SPATIALPU_IDA_DIR");
  const fs::path src = root ? fs::path(root) : fs::path();
  const fs::path tracts = src / "tracts.geojson", cov = src / "covariates.csv", reports = src / "reports.csv";
  if (!root || !fs::exists(tracts) || !fs::exists(cov) || !fs::exists(reports)) {
    std::printf("[SKIP] criterion 9: Real-data reproduction: set SPATIALPU_IDA_DIR to a directory with "
                "tracts.geojson, covariates.csv and reports.csv\n");
    return Outcome::Skip;
  }

  const auto dir = scratch_dir("real_data");
  const std::string d = dir.string();
  const std::string log = (dir / "log.txt").string();
  const std::string covs = " --covariates \"" + cov.string() + "\" --id-column GEOID";
  const std::string graph = "--nodes \"" + d + "/g/nodes.csv\" --edges \"" + d + "/g/edges.csv\"";

  const auto step = [&](const std::string& what, const std::string& args) {
    const int rc = run_cli(args, log);
    if (rc != 0) detail(what + " failed with exit code " + std::to_string(rc) + " (see " + log + ")");
    return rc == 0;
  };

  if (!step("build-graph", "build-graph --geometry \"" + tracts.string() + "\" --lonlat" + covs + " --out \"" + d +
                               "/g\"") ||
      !step("build-dataset", "build-dataset " + graph + " --reports \"" + reports.string() + "\" --geometry \"" +
                                 tracts.string() +
                                 "\" --time-column \"Created Date\" --x-column Longitude --y-column Latitude"
                                 " --utc-offset=-04:00 --cutoff-fraction 0.08 --window-start " +
                                 kWindowStart + " --window-end " + kWindowEnd + " --out \"" + d + "/ds\"") ||
      !step("fit", "fit " + graph + covs + " --dataset \"" + d +
                       "/ds/dataset.csv\" --model heterogeneous --no-latent --out \"" + d + "/fit\"") ||
      !step("evaluate", "evaluate " + graph + " --dataset \"" + d + "/ds/dataset.csv\" --predictions \"" + d +
                            "/fit/predictions.csv\" --names heterogeneous --out \"" + d + "/ev\"")) {
    return verdict(9, "Real-data reproduction", false, "pipeline failed");
  }

  const json notes = read_json(dir / "ds" / "manifest.json").at("notes");
  const auto nodes = notes.at("nodes").get<std::size_t>();
  const auto train = notes.at("train_nodes").get<std::size_t>();
  const auto test = notes.at("test_nodes").get<std::size_t>();
  const bool counts_ok = nodes == kNodes && train == kTrain && test == kTest;
  detail("node counts " + std::to_string(nodes) + "/" + std::to_string(train) + "/" + std::to_string(test) +
         " (expected " + std::to_string(kNodes) + "/" + std::to_string(kTrain) + "/" + std::to_string(kTest) + ")");

  double lo = NAN, hi = NAN, mean = NAN;
  for (const auto& p : read_json(dir / "fit" / "summary.json").at("parameters")) {
    if (p.at("name") == "theta1") {
      mean = p.at("mean").get<double>();
      lo = p.at("lo95").get<double>();
      hi = p.at("hi95").get<double>();
    }
  }
  const bool ci_ok = lo <= kCiHi && hi >= kCiLo;
  detail("theta1 mean " + fmt(mean, 3) + ", 95% CI (" + fmt(lo, 3) + ", " + fmt(hi, 3) + ")");

  const double a =
      read_json(dir / "ev" / "metrics.json").at("models").at("heterogeneous").at("auc").at("estimate").get<double>();
  const bool auc_ok = std::abs(a - kAuc) <= kAucTolerance;
  detail("test-report AUC " + fmt(a, 3) + " (target " + fmt(kAuc, 3) + " +/- " + fmt(kAucTolerance, 2) + ")");

  return verdict(9, "Real-data reproduction", counts_ok && ci_ok && auc_ok,
                 std::string("counts ") + (counts_ok ? "match" : "differ") + ", theta1 CI " +
                     (ci_ok ? "overlaps" : "misses") + " (0.08, 0.21), AUC " + fmt(a, 3));
}

}  // namespace spu::acceptance
