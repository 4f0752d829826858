#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli_runner.hpp"
#include "criteria.hpp"

namespace spu::acceptance {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// The effective configuration echoed in a manifest, as a flat config file
// with the output directory replaced.
std::string config_from_manifest(const json& manifest, const std::string& out) {
  std::ostringstream cfg;
  for (const auto& [key, value] : manifest.at("config").items()) {
    if (key == "out") continue;
    if (value.is_array()) {
      if (value.empty()) continue;
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      cfg << key << " = " << joined << "\n";
    } else if (value.is_string()) {
      if (!value.get<std::string>().empty()) cfg << key << " = \"" << value.get<std::string>() << "\"\n";
    } else {
      cfg << key << " = " << scalar(value) << "\n";
    }
  }
  cfg << "out = \"" << out << "\"\n";
  return cfg.str();
}

struct Step {
  std::string name;
  std::string command;
  std::string args;
};

}  // namespace

Outcome determinism() {
  const auto dir = scratch_dir("determinism");
  const std::string d = dir.string();
  const std::string log = (dir / "log.txt").string();
  const std::string graph = "--nodes \"" + d + "/g/nodes.csv\" --edges \"" + d + "/g/edges.csv\"";
  const std::string cov = " --covariates \"" + d + "/g/covariates.csv\"";
  const std::string mcmc = " --chains 2 --iterations 400 --burn-in 100 --seed 11";

  {
    // Point reports over the synthetic city footprint (8 x 8 cells of 1000 m).
    std::ofstream r(dir / "reports.csv");
    r << "created_date,longitude,latitude\n";
    for (int k = 0; k < 80; ++k) {
      const int day = 1 + k % 7, hour = 1 + (k * 7) % 11;
      r << "09/0" << day << "/2021 " << (hour < 10 ? "0" : "") << hour << ":" << (k % 6) << "0:00 PM,"
        << 250 + (k * 937) % 7600 << "," << 300 + (k * 1319) % 7500 << "\n";
    }
  }

  const std::vector<Step> steps{
      {"build-graph (synthetic)", "build-graph", "--synthetic-grid 8x8 --seed 3 --out \"" + d + "/g\""},
      {"build-graph (polygons)", "build-graph",
       "--geometry \"" + d + "/g/geometry.geojson\"" + cov + " --out \"" + d + "/g2\""},
      {"simulate", "simulate", graph + cov + " --trials 2 --seed 7 --out \"" + d + "/sim\""},
      {"build-dataset", "build-dataset",
       graph + " --reports \"" + d + "/reports.csv\" --geometry \"" + d +
           "/g/geometry.geojson\" --utc-offset=-04:00 --cutoff-fraction 0.1 --out \"" + d + "/ds\""},
      {"fit heterogeneous", "fit",
       graph + cov + " --dataset \"" + d + "/sim/dataset_000.csv\" --model heterogeneous" + mcmc + " --out \"" + d +
           "/fit_a\""},
      {"fit heterogeneous (second event)", "fit",
       graph + cov + " --dataset \"" + d + "/sim/dataset_001.csv\" --model heterogeneous" + mcmc + " --out \"" + d +
           "/fit_b\""},
      {"fit homogeneous", "fit",
       graph + " --dataset \"" + d + "/ds/dataset.csv\" --model homogeneous" + mcmc + " --out \"" + d + "/fit_h\""},
      {"fit gp", "fit", graph + " --dataset \"" + d + "/sim/dataset_000.csv\" --model gp --out \"" + d + "/fit_gp\""},
      {"fit spatial", "fit",
       graph + " --dataset \"" + d + "/sim/dataset_000.csv\" --model spatial --out \"" + d + "/fit_sp\""},
      {"evaluate", "evaluate",
       graph + " --dataset \"" + d + "/sim/dataset_000.csv\" --predictions \"" + d + "/fit_a/predictions.csv\",\"" +
           d + "/fit_gp/predictions.csv\" --names het,gp --iterates 500 --out \"" + d + "/ev\""},
      {"pool", "pool",
       "--event A=\"" + d + "/fit_a/chain_0.csv\":\"" + d + "/fit_a/chain_1.csv\" --event B=\"" + d +
           "/fit_b/chain_0.csv\":\"" + d + "/fit_b/chain_1.csv\" --out \"" + d + "/pool\""},
      {"allocate", "allocate",
       graph + cov + " --dataset \"" + d + "/sim/dataset_000.csv\" --predictions \"" + d +
           "/fit_a/predictions.csv\" --k 10 --k-sweep 5,20 --out \"" + d + "/alloc\""},
      {"calibrate", "calibrate",
       graph + cov + " --trials 3 --chains 1 --iterations 300 --burn-in 100 --sw-sweeps 50 --seed 5 --iterates 200" +
           " --equity-k 5 --equity-feature 4 --out \"" + d + "/cal\""},
  };

  std::size_t compared = 0, mismatched = 0, failed_runs = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    if (run_cli(s.command + " " + s.args, log) != 0) {
      ++failed_runs;
      detail(s.name + ": first run failed (see " + log + ")");
      continue;
    }
    // Locate the output directory from the --out argument.
    const auto pos = s.args.rfind("--out \"");
    const fs::path first = s.args.substr(pos + 7, s.args.size() - pos - 8);
    const json manifest = json::parse(slurp(first / "manifest.json"));
    const fs::path second = first.string() + "_rerun";
    const fs::path cfg = dir / ("rerun_" + std::to_string(k) + ".cfg");
    std::ofstream(cfg) << config_from_manifest(manifest, second.string());
    if (run_cli(s.command + " --config \"" + cfg.string() + "\"", log) != 0) {
      ++failed_runs;
      detail(s.name + ": rerun from manifest failed (see " + log + ")");
      continue;
    }
    std::size_t here = 0, bad = 0;
    for (const auto& [name, hash] : manifest.at("outputs").items()) {
      ++here;
      if (slurp(first / name) != slurp(second / name)) {
        ++bad;
        detail(s.name + ": " + name + " differs");
      }
    }
    const json again = json::parse(slurp(second / "manifest.json"));
    if (again.at("outputs") != manifest.at("outputs")) ++bad;
    compared += here;
    mismatched += bad;
    detail(s.name + ": " + std::to_string(here) + " outputs, " + (bad ? "MISMATCH" : "identical"));
  }
  return verdict(10, "Determinism", failed_runs == 0 && mismatched == 0 && compared > 0,
                 std::to_string(compared) + " outputs over " + std::to_string(steps.size()) +
                     " commands rerun from their manifests, " + std::to_string(mismatched) + " differ, " +
                     std::to_string(failed_runs) + " runs failed");
}

}  // namespace spu::acceptance
