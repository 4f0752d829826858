#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

namespace spu::acceptance {

// Runs the command-line tool with `args`; output goes to `log`.
inline int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string("\"") + SPATIALPU_CLI_PATH + "\" " + args + " >>\"" + log + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spatialpu_acceptance_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace spu::acceptance
