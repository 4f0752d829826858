#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "support.hpp"

namespace spu::cli {

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

Command add_build_graph(CLI::App& root);
Command add_build_dataset(CLI::App& root);
Command add_simulate(CLI::App& root);
Command add_fit(CLI::App& root);
Command add_evaluate(CLI::App& root);
Command add_pool(CLI::App& root);
Command add_allocate(CLI::App& root);
Command add_calibrate(CLI::App& root);

}  // namespace spu::cli
