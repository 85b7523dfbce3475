#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "cli_runner.hpp"
#include "hurstarb/covariance.hpp"
#include "hurstarb/csv.hpp"
#include "hurstarb/hurst_process.hpp"
#include "hurstarb/market_data.hpp"
#include "hurstarb/transaction_clock.hpp"

using namespace hurstarb;
using namespace hurstarb::testing;
namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kStart2021 = 1609459200;

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

csv::LabeledMatrix read_csv_matrix(const fs::path& p) {
  std::ifstream in(p);
  return csv::read_matrix(in);
}

// Rows of a CSV with a header, as strings.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> out;
  while (std::getline(in, line)) {
    std::vector<std::string> r;
    for (auto f : csv::split(line)) r.emplace_back(f);
    out.push_back(std::move(r));
  }
  return out;
}

bool no_staging_left(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().find(".staging-") != std::string::npos) return false;
  return true;
}

// Two-component wide panel via the CLI.
fs::path two_component_panel(const fs::path& dir, const std::string& name, int tickers, int years, int seed) {
  const auto out = dir / name;
  REQUIRE(run_cli("simulate --model two-component --tickers " + std::to_string(tickers) + " --years " +
                  std::to_string(years) + " --epsilon 0.05 --rho 0.5 --seed " + std::to_string(seed) + " --out " +
                  q(out)) == 0);
  return out / "panel.csv";
}

}  // namespace

TEST_CASE("every command has help and rejects bad flags") {
  const auto dir = fresh_dir("cli_help");
  CHECK(run_cli("--help") == 0);
  for (std::string c : {"clock", "variogram", "simulate", "backtest", "predict", "correlate"})
    CHECK(run_cli(c + " --help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --bogus 1 --out " + q(dir / "x")) == 2);
  CHECK(run_cli("simulate --years 2") == 2);
  CHECK_FALSE(fs::exists(dir / "x"));
  CHECK(no_staging_left(dir));
}

TEST_CASE("simulate: determinism, defaults, range errors") {
  const auto dir = fresh_dir("cli_simulate");
  CHECK(run_cli("simulate --epsilon 0 --seed 1 --out " + q(dir / "a")) == 0);
  CHECK(run_cli("simulate --epsilon 0 --seed 1 --out " + q(dir / "b")) == 0);
  CHECK(slurp(dir / "a" / "panel.csv") == slurp(dir / "b" / "panel.csv"));

  std::ifstream in(dir / "a" / "panel.csv");
  const auto prices = read_panel_csv(in);
  CHECK(prices.rows() == 1);
  CHECK(prices.cols() == 8760);
  const Eigen::ArrayXXd lp = prices.array().log();
  CHECK(std::sqrt((lp - lp.mean()).square().mean()) == doctest::Approx(0.15).epsilon(1e-9));

  const auto m = read_json(dir / "a" / "manifest.json");
  CHECK(m["command"] == "simulate");
  CHECK(m["seed"] == 1);
  CHECK(m["flags"]["vol"] == "0.15");
  CHECK(m["outputs"][0]["path"] == "panel.csv");

  const auto err = dir / "err.txt";
  CHECK(run_cli("simulate --epsilon 0.6 --out " + q(dir / "c"), err) == 2);
  CHECK(slurp(err).find("epsilon") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "c"));
  CHECK(run_cli("simulate --method wavelet --out " + q(dir / "c")) == 2);

  const auto panel = two_component_panel(dir, "tc", 5, 2, 3);
  std::ifstream tin(panel);
  const auto hp = read_hourly_panel_csv(tin);
  CHECK(hp.tickers.size() == 5);
  CHECK(hp.years == std::vector<int>{0, 1});
  CHECK(hp.n_hours() == 2 * 8760);
}

TEST_CASE("clock command") {
  const auto dir = fresh_dir("cli_clock");
  // One ticker trading every minute of 2021 at a constant rate.
  write_corpus(dir / "uniform", {constant_candles("U", kStart2021, 525600, 10.0, 5.0)});
  REQUIRE(run_cli("clock --data-dir " + q(dir / "uniform") + " --year 2021 --out " + q(dir / "o1")) == 0);
  {
    std::ifstream in(dir / "o1" / "clock.csv");
    const auto c = read_clock_csv(in, 2021, ClockKind::DollarWeighted);
    for (double h : {0.0, 0.5, 100.25, 4000.0, 8759.5}) CHECK(c.to_txn_time(kStart2021 + h * 3600.0) == doctest::Approx(h).epsilon(1e-9).scale(1.0));
  }
  write_corpus(dir / "short", {constant_candles("U", kStart2021 + 86400 * 10, 600, 10.0)});
  REQUIRE(run_cli("clock --data-dir " + q(dir / "short") + " --year 2021 --kind clock --out " + q(dir / "o2")) == 0);
  {
    std::ifstream in(dir / "o2" / "clock.csv");
    const auto c = read_clock_csv(in, 2021, ClockKind::Clock);
    CHECK(c.to_txn_time(kStart2021 + 3600.0 * 1000.0) == doctest::Approx(1000.0));
    CHECK(c.to_txn_time(kStart2021 + 3600.0 * 7000.0) == doctest::Approx(7000.0));
  }
  const auto err = dir / "err.txt";
  CHECK(run_cli("clock --data-dir " + q(dir / "nope") + " --year 2021 --out " + q(dir / "o3"), err) == 3);
  CHECK(slurp(err).find("nope") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o3"));
  CHECK(run_cli("clock --data-dir " + q(dir / "uniform") + " --year 2021 --kind sundial --out " + q(dir / "o4")) == 2);
}

TEST_CASE("variogram command") {
  const auto dir = fresh_dir("cli_variogram");
  write_corpus(dir / "data", factor_corpus(8, kStart2021, 60 * 24 * 30, 0.0, 1e-4, 5));
  REQUIRE(run_cli("variogram --data-dir " + q(dir / "data") + " --year 2021 --tau-grid 1:100:5 --out " +
                  q(dir / "flat")) == 0);
  const auto flat = rows(dir / "flat" / "ensemble.csv");
  REQUIRE(flat.size() == 11);
  for (const auto& r : flat) {
    const double tau = std::stod(r[0]), p50 = std::stod(r[3]);
    CHECK(std::abs(p50 - 1.0) < (tau <= 10.0 ? 0.1 : 0.3));
  }
  CHECK(fs::exists(dir / "flat" / "tickers" / "S00.csv"));
  const auto s = read_json(dir / "flat" / "summary.json");
  CHECK(s["n_ensemble"] == 8);
  CHECK(s["median_exponent"].get<double>() == doctest::Approx(1.0).epsilon(0.1));

  // Point estimates on minute-averaged candle prices lose a third of the
  // variance at one-candle spacing.
  REQUIRE(run_cli("variogram --data-dir " + q(dir / "data") +
                  " --year 2021 --method two_point --tau-grid 0.21,1,10 --normalize-at 10 --out " + q(dir / "tp")) ==
          0);
  const auto tp = rows(dir / "tp" / "ensemble.csv");
  CHECK(std::stod(tp[0][3]) < 0.85);
  CHECK(std::stod(tp[2][3]) == doctest::Approx(1.0));

  CHECK(run_cli("variogram --data-dir " + q(dir / "data") + " --year 2021 --method wavelet --out " + q(dir / "bad")) ==
        2);
  CHECK_FALSE(fs::exists(dir / "bad"));
}

TEST_CASE("backtest command") {
  const auto dir = fresh_dir("cli_backtest");
  REQUIRE(run_cli("simulate --epsilon 0 --years 50 --seed 9 --out " + q(dir / "sim")) == 0);
  REQUIRE(run_cli("backtest --strategy sim-meanrev --input " + q(dir / "sim" / "panel.csv") + " --out " +
                  q(dir / "null")) == 0);
  const auto s = read_json(dir / "null" / "summary.json");
  CHECK(std::abs(s["mean_P_y"].get<double>()) < 3.0 * s["stderr_P_y"].get<double>());
  CHECK(rows(dir / "null" / "yearly.csv").size() == 50);

  const auto train = two_component_panel(dir, "train", 100, 1, 21);
  const auto trade = two_component_panel(dir, "trade", 100, 1, 22);
  CHECK(run_cli("backtest --strategy xcorr --input " + q(trade) + " --out " + q(dir / "nocoeffs")) == 2);
  CHECK_FALSE(fs::exists(dir / "nocoeffs"));

  REQUIRE(run_cli("predict --input " + q(train) + " --train-year 0 --out " + q(dir / "coeffs")) == 0);
  const auto coeffs = dir / "coeffs" / "coeffs_0.csv";
  double yield[2];
  int i = 0;
  for (int S : {1, 24}) {
    const auto out = dir / ("x" + std::to_string(S));
    REQUIRE(run_cli("backtest --strategy xcorr --input " + q(trade) + " --coeffs " + q(coeffs) + " --staleness " +
                    std::to_string(S) + " --out " + q(out)) == 0);
    yield[i++] = read_json(out / "summary.json")["annualized_yield"].get<double>();
  }
  CHECK(yield[0] > 0.0);
  CHECK(yield[0] > yield[1]);

  REQUIRE(run_cli("backtest --strategy market-meanrev --min-side-count 10 --input " + q(trade) + " --out " +
                  q(dir / "mkt")) == 0);
  const auto eq = rows(dir / "mkt" / "equity.csv");
  CHECK(eq.size() == 8760);
  const auto ms = read_json(dir / "mkt" / "summary.json");
  CHECK(csv::parse_double(eq.back()[1]) == ms["end_pnl"].get<double>());
  CHECK(rows(dir / "mkt" / "ledger.csv").size() == ms["n_trades"].get<std::size_t>());
}

TEST_CASE("predict command") {
  const auto dir = fresh_dir("cli_predict");
  const auto panel = two_component_panel(dir, "p", 20, 2, 31);
  REQUIRE(run_cli("predict --input " + q(panel) + " --train-years 0,1 --predict-years 0,1 --out " + q(dir / "g")) ==
          0);
  std::map<std::pair<int, int>, double> fve;
  for (const auto& r : rows(dir / "g" / "grid.csv"))
    if (r[2] == "loo") fve[{std::stoi(r[0]), std::stoi(r[1])}] = std::stod(r[3]);
  REQUIRE(fve.size() == 4);
  CHECK(fve[{0, 0}] > fve[{1, 0}]);
  CHECK(fve[{1, 1}] > fve[{0, 1}]);
  CHECK(fs::exists(dir / "g" / "coeffs_1.csv"));

  REQUIRE(run_cli("predict --input " + q(panel) + " --train-year 0 --predict-years 0,1 --refine --out " +
                  q(dir / "r")) == 0);
  const auto rep = read_json(dir / "r" / "report.json");
  const auto& v = rep["refine"]["0"]["validation_fmse"];
  const int best = rep["refine"]["0"]["best_step"];
  CHECK(v[best].get<double>() <= v[0].get<double>());
  CHECK(fs::exists(dir / "r" / "coeffs_0_refined.csv"));

  // Two identical tickers make the covariance singular.
  {
    std::ofstream out(dir / "dup.csv");
    out << "year,txn_hour,A,B,C\n";
    double a = 1.0, c = 1.0;
    for (int h = 0; h < 300; ++h) {
      a *= std::exp(0.01 * std::sin(h * 1.3));
      c *= std::exp(0.01 * std::cos(h * 0.7));
      out << "0," << h << ',' << csv::format(a) << ',' << csv::format(a) << ',' << csv::format(c) << '\n';
    }
  }
  CHECK(run_cli("predict --input " + q(dir / "dup.csv") + " --train-year 0 --ridge 0 --out " + q(dir / "sing")) == 4);
  CHECK_FALSE(fs::exists(dir / "sing"));
  CHECK(run_cli("predict --input " + q(dir / "dup.csv") + " --train-year 0 --out " + q(dir / "ridged")) == 0);
  CHECK(no_staging_left(dir));
}

TEST_CASE("correlate command") {
  const auto dir = fresh_dir("cli_correlate");
  write_corpus(dir / "indep", factor_corpus(2, kStart2021, 60 * 24 * 30, 0.0, 1e-4, 41));
  REQUIRE(run_cli("correlate --data-dir " + q(dir / "indep") + " --years 2021 --out " + q(dir / "i")) == 0);
  const auto rho = read_csv_matrix(dir / "i" / "corr_2021.csv").values;
  CHECK(rho(0, 0) == 1.0);
  CHECK(std::abs(rho(0, 1)) < 3.0 / std::sqrt(8760.0));
  CHECK(fs::exists(dir / "i" / "nobs_2021.csv"));

  write_corpus(dir / "factor", factor_corpus(6, kStart2021, 60 * 24 * 30, 0.5, 1e-4, 42));
  REQUIRE(run_cli("correlate --data-dir " + q(dir / "factor") + " --years 2021 --tau-grid 0.5:50:3 --out " +
                  q(dir / "f")) == 0);
  for (const auto& r : rows(dir / "f" / "predicted.csv")) {
    CHECK(std::abs(std::stod(r[1]) - 1.0) < 0.15);
    CHECK(std::abs(std::stod(r[2]) - 1.0) < 0.15);
  }

  // Memoryless common part plus independent long-memory parts, in minutes.
  TwoComponentPathConfig cfg;
  cfg.n_tickers = 8;
  cfg.n_steps = 60 * 24 * 60;
  cfg.rho = 0.6;
  cfg.uncorr_scale = 1.0;
  cfg.epsilon = 0.05;
  cfg.seed = 43;
  write_corpus(dir / "tc", candles_from_log_paths(simulate_two_component_paths(cfg), kStart2021, 1e-3));
  REQUIRE(run_cli("correlate --data-dir " + q(dir / "tc") + " --years 2021 --tau-grid 0.5,1,5,50 --out " +
                  q(dir / "t")) == 0);
  const auto pr = rows(dir / "t" / "predicted.csv");
  REQUIRE(pr.size() == 4);
  const double measured = std::stod(pr[3][1]), predicted = std::stod(pr[3][2]);
  CHECK(predicted > 1.08);
  CHECK(measured > 1.0);
  CHECK(std::abs(measured - predicted) < 0.15);
}

TEST_CASE("manifest replay is bit-identical and checks inputs") {
  const auto dir = fresh_dir("cli_manifest");
  const auto panel = two_component_panel(dir, "p", 6, 2, 51);
  REQUIRE(run_cli("predict --input " + q(panel) + " --train-year 0 --refine --max-iterations 20 --out " +
                  q(dir / "run1")) == 0);
  REQUIRE(run_cli("--manifest " + q(dir / "run1" / "manifest.json") + " --out " + q(dir / "run2")) == 0);
  const auto m1 = read_json(dir / "run1" / "manifest.json"), m2 = read_json(dir / "run2" / "manifest.json");
  CHECK(m1["outputs"] == m2["outputs"]);
  CHECK(m1["args"] == m2["args"]);
  for (const auto& o : m1["outputs"]) {
    const std::string p = o["path"];
    CHECK(slurp(dir / "run1" / p) == slurp(dir / "run2" / p));
  }
  // A changed input is refused.
  std::ofstream(panel, std::ios::app) << "\n";
  CHECK(run_cli("--manifest " + q(dir / "run1" / "manifest.json") + " --out " + q(dir / "run3")) == 3);
  CHECK_FALSE(fs::exists(dir / "run3"));
}
