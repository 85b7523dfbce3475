#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hurstarb::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& p);
std::string utc_now();

// One command invocation. Outputs are written to a hidden staging directory
// next to `out` and moved into place by commit(); a run that throws leaves
// nothing behind.
class RunContext {
 public:
  RunContext(std::string command, std::vector<std::string> args, fs::path out);
  ~RunContext();
  RunContext(const RunContext&) = delete;
  RunContext& operator=(const RunContext&) = delete;

  // Records an input file's digest and returns the path.
  const fs::path& input(const fs::path& p);
  // Every *.csv in a directory, sorted.
  void input_dir(const fs::path& dir);

  std::ofstream output(const std::string& relative);
  void write_json(const std::string& relative, const nlohmann::json& j);

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_flags(nlohmann::json flags) { flags_ = std::move(flags); }

  void commit();

 private:
  std::string command_;
  std::vector<std::string> args_;
  fs::path out_;
  fs::path staging_;
  std::vector<std::string> outputs_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json flags_ = nlohmann::json::object();
  std::optional<std::uint64_t> seed_;
  std::string started_;
  bool committed_ = false;
};

// Checks that the inputs recorded in a manifest still have their digests.
void verify_manifest_inputs(const nlohmann::json& manifest);

}  // namespace hurstarb::cli
