#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spatialpu/covariates.hpp"
#include "spatialpu/gibbs.hpp"
#include "spatialpu/priors.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu::cli {

using nlohmann::json;

// Options of one subcommand with their current values, for the manifest.
class OptionEcho {
 public:
  explicit OptionEcho(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& value, const std::string& help) {
    echo_[name] = [&value] { return json(value); };
    return app_->add_option("--" + name, value, help)->capture_default_str();
  }
  CLI::Option* flag(const std::string& name, bool& value, const std::string& help) {
    echo_[name] = [&value] { return json(value); };
    return app_->add_flag("--" + name, value, help);
  }
  json effective() const;
  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::map<std::string, std::function<json()>> echo_;
};

// Input/output bookkeeping written as manifest.json in the output directory.
// Contains no timestamps or host details, so identical runs write identical
// manifests.
class Manifest {
 public:
  Manifest(std::string command, json config) : command_(std::move(command)), config_(std::move(config)) {}
  void input(const std::string& role, const std::string& path);
  // Records `name` (relative to the output directory) with its hash.
  void output(const std::string& dir, const std::string& name);
  json& notes() { return notes_; }
  void write(const std::string& dir) const;

 private:
  std::string command_;
  json config_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  json notes_ = json::object();
};

std::string join_path(const std::string& dir, const std::string& name);
void ensure_directory(const std::string& dir);

// ---- shared option groups ----------------------------------------------------

struct GraphFiles {
  std::string nodes;
  std::string edges;
  void add(OptionEcho& o);
  SpatialGraph load(Manifest& m) const;
};

struct CovariateFiles {
  std::string path;
  std::vector<std::string> features = default_feature_selection();
  std::string id_column = "node_id";
  std::string population_column = "population";
  void add(OptionEcho& o, bool required);
  // Aligned to graph order and standardized.
  CovariateTable load(const SpatialGraph& graph, Manifest& m) const;
};

struct McmcOptions {
  MCMCConfig config;
  void add(OptionEcho& o);
};

struct PriorOptions {
  std::string scale = "sd";
  std::vector<double> theta0{0.0, 0.5};
  std::vector<double> theta1{0.1, 0.03};
  std::vector<double> alpha0{0.0, 1.0};
  std::vector<double> alpha{0.0, 0.5};
  std::vector<double> beta{1.2, 0.8};
  void add(OptionEcho& o);
  PriorConfig build() const;
};

// ---- config files ------------------------------------------------------------

// Expands `--config FILE` (flat `key = value` lines, `#` comments) into
// `--key=value` arguments placed before the command-line flags, skipping
// keys also given on the command line so flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

std::string format_json(const json& j);

}  // namespace spu::cli
