#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "spatialpu/error.hpp"
#include "spatialpu/serialization.hpp"

namespace spu::cli {

json OptionEcho::effective() const {
  json j = json::object();
  for (const auto& [name, get] : echo_) j[name] = get();
  return j;
}

void Manifest::input(const std::string& role, const std::string& path) {
  inputs_[role] = {{"path", path}, {"fnv1a", io::fnv1a_file(path)}};
}

void Manifest::output(const std::string& dir, const std::string& name) {
  outputs_[name] = io::fnv1a_file(join_path(dir, name));
}

void Manifest::write(const std::string& dir) const {
  const json j = {{"tool", "spatialpu"},
                  {"version", "0.1.0"},
                  {"command", command_},
                  {"config", config_},
                  {"inputs", inputs_},
                  {"outputs", outputs_},
                  {"notes", notes_}};
  io::write_text(join_path(dir, "manifest.json"), format_json(j));
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message(), dir);
}

std::string format_json(const json& j) { return j.dump(2) + "\n"; }

// ---- option groups -----------------------------------------------------------

void GraphFiles::add(OptionEcho& o) {
  o.add("nodes", nodes, "Node CSV written by build-graph")->required()->check(CLI::ExistingFile);
  o.add("edges", edges, "Edge CSV written by build-graph")->required()->check(CLI::ExistingFile);
}

SpatialGraph GraphFiles::load(Manifest& m) const {
  m.input("nodes", nodes);
  m.input("edges", edges);
  SpatialGraph g = io::read_graph(nodes, edges);
  if (!g.is_connected()) throw InputError("graph is not connected", edges);
  return g;
}

void CovariateFiles::add(OptionEcho& o, bool required) {
  auto* opt = o.add("covariates", path, "Covariate CSV, one row per node");
  if (required) opt->required();
  opt->check(CLI::ExistingFile);
  o.add("features", features, "Feature columns; log(col) takes a logarithm")->delimiter(',');
  o.add("id-column", id_column, "Node id column of the covariate CSV");
  o.add("population-column", population_column, "Population column of the covariate CSV");
}

CovariateTable CovariateFiles::load(const SpatialGraph& graph, Manifest& m) const {
  m.input("covariates", path);
  const auto raw = read_covariates_csv(path, id_column);
  const auto aligned = align_covariates(raw, graph, features, population_column);
  return standardize_covariates(aligned.features, features, features, aligned.population);
}

void McmcOptions::add(OptionEcho& o) {
  o.add("chains", config.chains, "Number of chains");
  o.add("iterations", config.total_iterations, "Iterations per chain, burn-in included");
  o.add("burn-in", config.burn_in, "Burn-in iterations");
  o.add("keep-fraction", config.thin_keep_fraction, "Fraction of post-burn-in iterations retained");
  o.add("sw-burnin", config.sw_burnin, "Swendsen-Wang sweeps per auxiliary draw");
  o.add("step", config.proposal_step, "Initial random-walk step for (theta0, theta1)");
  o.add("adapt-interval", config.adapt_interval, "Burn-in iterations between step adaptations");
  o.add("accept-low", config.accept_low, "Lower end of the target acceptance band");
  o.add("accept-high", config.accept_high, "Upper end of the target acceptance band");
  o.add("adapt-factor", config.adapt_factor, "Relative step change per adaptation");
  o.add("inner-steps", config.inner_logistic_steps, "Inner kernel steps per logistic update");
  o.add("seed", config.seed, "Master seed");
  o.add("threads", config.threads, "Concurrent chains");
}

void PriorOptions::add(OptionEcho& o) {
  o.add("prior-scale", scale, "Second prior argument is 'sd' or 'variance'")
      ->check(CLI::IsMember({"sd", "variance"}));
  o.add("theta0-prior", theta0, "Normal prior mean,scale for theta0")->delimiter(',')->expected(2);
  o.add("theta1-prior", theta1, "Normal prior mean,scale for theta1 (truncated at 0)")->delimiter(',')->expected(2);
  o.add("alpha0-prior", alpha0, "Normal prior mean,scale for the reporting intercept")->delimiter(',')->expected(2);
  o.add("alpha-prior", alpha, "Normal prior mean,scale for reporting coefficients")->delimiter(',')->expected(2);
  o.add("beta-prior", beta, "Beta prior a,b for the homogeneous reporting rate")->delimiter(',')->expected(2);
}

PriorConfig PriorOptions::build() const {
  PriorConfig p;
  p.convention = parse_scale_convention(scale);
  p.theta0 = {theta0[0], theta0[1]};
  p.theta1 = {theta1[0], theta1[1]};
  p.alpha0 = {alpha0[0], alpha0[1]};
  p.alpha_coeff = {alpha[0], alpha[1]};
  p.homogeneous_alpha = {beta[0], beta[1]};
  p.validate();
  return p;
}

// ---- config files ------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
      continue;
    }
    if (a.rfind("--", 0) == 0) {
      const auto eq = a.find('=');
      given.insert(eq == std::string::npos ? a.substr(2) : a.substr(2, eq - 2));
    }
    out.push_back(a);
  }
  if (config_path.empty()) return out;
  std::ifstream in(config_path);
  if (!in) throw InputError("cannot open config file '" + config_path + "'", config_path);
  std::vector<std::string> injected;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(config_path + ":" + std::to_string(lineno) + ": expected key = value", config_path);
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (given.count(key)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key + "=" + value);
  }
  // Right after the subcommand name.
  const std::size_t insert_at = !out.empty() && out[0].rfind('-', 0) != 0 ? 1 : 0;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(insert_at), injected.begin(), injected.end());
  return out;
}

}  // namespace spu::cli
