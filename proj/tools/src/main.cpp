#include <unistd.h>

#include <fstream>
#include <iostream>

#include "hurstarb/error.hpp"
#include "options.hpp"

namespace hc = hurstarb::cli;
namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kNumerical = 4;

// Arguments after the subcommand with --out removed; these go in the manifest.
std::vector<std::string> recorded_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Long-memory price models, variograms and hourly arbitrage backtests", "hurstarb"};
  app.set_version_flag("--version", HURSTARB_VERSION);
  app.require_subcommand(1);
  std::vector<hc::Command> cmds{hc::register_clock(app),    hc::register_variogram(app), hc::register_simulate(app),
                                hc::register_backtest(app), hc::register_predict(app),   hc::register_correlate(app)};
  std::string out;
  for (auto& c : cmds) c.app->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  for (auto& c : cmds) {
    if (!c.app->parsed()) continue;
    hc::RunContext ctx(c.app->get_name(), recorded_args(args), out);
    ctx.set_flags(hc::option_values(*c.app));
    c.run(ctx);
    ctx.commit();
    std::cerr << "wrote " << fs::absolute(out).lexically_normal().string() << '\n';
    return 0;
  }
  return kUsage;
}

int replay(const std::vector<std::string>& args) {
  CLI::App app{"Replay a run from its manifest", "hurstarb"};
  std::string manifest_path, out;
  app.add_option("--manifest", manifest_path, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output directory (default: the original run's)");
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  nlohmann::json m;
  try {
    std::ifstream in(manifest_path);
    m = nlohmann::json::parse(in);
    if (m.at("tool") != "hurstarb") throw hurstarb::DataError("not a hurstarb manifest");
  } catch (const nlohmann::json::exception& e) {
    throw hurstarb::DataError(std::string("bad manifest: ") + e.what());
  }
  if (out.empty()) out = fs::path(manifest_path).parent_path().string();
  if (out.empty()) out = ".";
  out = fs::absolute(out).string();
  hc::verify_manifest_inputs(m);
  fs::current_path(m.at("cwd").get<std::string>());
  std::vector<std::string> next{m.at("command").get<std::string>()};
  for (const auto& a : m.at("args")) next.push_back(a.get<std::string>());
  next.push_back("--out");
  next.push_back(out);
  return run(next);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const bool is_replay = !args.empty() && (args[0] == "--manifest" || args[0].rfind("--manifest=", 0) == 0 ||
                                             (args[0] == "--out" && args.size() > 2 && args[2].rfind("--manifest", 0) == 0));
    return is_replay ? replay(args) : run(args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const hurstarb::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const hurstarb::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
