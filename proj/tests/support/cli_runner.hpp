#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "synthetic.hpp"

namespace hurstarb::testing {

// Runs the CLI through the shell; returns its exit code. stderr goes to
// `err_file` when given.
inline int run_cli(const std::string& args, const std::filesystem::path& err_file = {}) {
  std::string cmd = std::string(HURSTARB_CLI) + " " + args + " >/dev/null";
  cmd += err_file.empty() ? " 2>/dev/null" : " 2>'" + err_file.string() + "'";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace hurstarb::testing
