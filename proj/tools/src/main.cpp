#include <algorithm>
#include <iostream>

#include "commands.hpp"
#include "spatialpu/error.hpp"

namespace {

int report(const std::string& type, const std::string& message, const std::string& subject, int code) {
  nlohmann::json j = {{"error", {{"type", type}, {"message", message}}}};
  if (!subject.empty()) j["error"]["subject"] = subject;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace spu::cli;
  CLI::App app{"Spatial event inference from positive-unlabeled reports", "spatialpu"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spatialpu 0.1.0");
  std::vector<Command> commands{add_build_graph(app), add_build_dataset(app), add_simulate(app), add_fit(app),
                                add_evaluate(app),     add_pool(app),          add_allocate(app), add_calibrate(app)};
  for (auto& c : commands) c.app->add_option("--config", "Flat key = value file; flags override its values");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), e.get_name(), 2);
  } catch (const spu::InputError& e) {
    return report("input", e.what(), e.subject(), 3);
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      c.run();
      return 0;
    } catch (const CLI::ParseError& e) {
      return report("usage", e.what(), e.get_name(), 2);
    } catch (const spu::InputError& e) {
      return report("input", e.what(), e.subject(), 3);
    } catch (const spu::ModelError& e) {
      return report("model", e.what(), {}, 4);
    } catch (const std::exception& e) {
      return report("internal", e.what(), {}, 1);
    }
  }
  return report("usage", "no subcommand given", {}, 2);
}
