#include <map>

#include "hurstarb/backtest.hpp"
#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/hurst_process.hpp"
#include "hurstarb/stats.hpp"
#include "options.hpp"

namespace hurstarb::cli {

namespace {
struct BacktestOpts {
  std::string strategy;
  std::string input;
  std::string data_dir;
  std::string years;
  std::string clock_kind = "dollar";
  std::string coeffs;
  int staleness = 1;
  double cost = 0.0;
  double top_fraction = 0.05;
  int min_side_count = 100;
  double min_active_fraction = 0.5;
  double stake = 1.0;
  bool long_only = false;
  std::uint64_t seed = 0;
};

// Coefficients reordered to the panel's tickers.
PredictionCoeffs align(const PredictionCoeffs& c, const std::vector<std::string>& tickers) {
  std::map<std::string, Eigen::Index> pos;
  for (std::size_t i = 0; i < c.tickers.size(); ++i) pos[c.tickers[i]] = static_cast<Eigen::Index>(i);
  if (pos.size() != tickers.size()) throw DataError("coefficient tickers differ from the panel's");
  std::vector<Eigen::Index> idx;
  for (const auto& t : tickers) {
    const auto it = pos.find(t);
    if (it == pos.end()) throw DataError("ticker " + t + " has no coefficients");
    idx.push_back(it->second);
  }
  PredictionCoeffs out;
  out.tickers = tickers;
  const auto n = static_cast<Eigen::Index>(tickers.size());
  out.B.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) out.B(i, k) = c.B(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)]);
  return out;
}

void run_backtest(const BacktestOpts& o, RunContext& ctx) {
  StrategyConfig cfg;
  cfg.kind = parse_strategy(o.strategy);
  cfg.staleness = o.staleness;
  cfg.cost = o.cost;
  cfg.top_fraction = o.top_fraction;
  cfg.min_side_count = o.min_side_count;
  cfg.min_active_fraction = o.min_active_fraction;
  cfg.stake = o.stake;
  cfg.long_only = o.long_only;
  cfg.validate();
  ctx.set_seed(o.seed);

  if (cfg.kind == StrategyKind::SimMeanRev) {
    if (o.input.empty()) throw std::invalid_argument("sim-meanrev needs --input (a simulated year,hour,price panel)");
    auto in = csv::open_input(ctx.input(o.input));
    const auto res = run_sim_meanrev(read_panel_csv(in));
    {
      auto out = ctx.output("yearly.csv");
      write_yearly_csv(out, res);
    }
    ctx.write_json("summary.json", {{"strategy", "sim-meanrev"},
                                    {"n_years", res.yearly_return.size()},
                                    {"r_rms", res.r_rms},
                                    {"mean_P_y", stats::mean(res.yearly_return)},
                                    {"stderr_P_y", stats::standard_error(res.yearly_return)}});
    return;
  }
  if (cfg.kind == StrategyKind::XCorrDiscrepancy && o.coeffs.empty())
    throw std::invalid_argument("xcorr needs --coeffs (from the predict command)");
  const auto kind = parse_clock_kind(o.clock_kind);
  const auto panel = load_hourly_panel(ctx, o.input, o.data_dir, o.years, kind);
  BacktestResult res;
  if (cfg.kind == StrategyKind::MarketMeanRev) {
    res = run_market_meanrev(panel, cfg);
  } else {
    auto in = csv::open_input(ctx.input(o.coeffs));
    res = run_xcorr_strategy(panel, align(read_coeffs_csv(in), panel.tickers), cfg);
  }
  {
    auto out = ctx.output("ledger.csv");
    write_ledger_csv(out, res.ledger);
  }
  {
    auto out = ctx.output("equity.csv");
    write_equity_csv(out, res.equity);
  }
  ctx.write_json("summary.json", {{"strategy", std::string(to_string(cfg.kind))},
                                  {"staleness", cfg.staleness},
                                  {"n_hours", res.equity.n_hours()},
                                  {"n_trades", res.ledger.trades.size()},
                                  {"n_skipped_hours", res.ledger.skipped_hours.size()},
                                  {"end_pnl", res.equity.cum_pnl.empty() ? 0.0 : res.equity.cum_pnl.back()},
                                  {"annualized_yield", annualized_yield(res.equity)}});
}
}  // namespace

Command register_backtest(CLI::App& root) {
  auto o = std::make_shared<BacktestOpts>();
  auto* app = root.add_subcommand("backtest", "Run a trading strategy on a price panel");
  app->add_option("--strategy", o->strategy, "sim-meanrev, market-meanrev or xcorr")->required();
  app->add_option("--input", o->input, "Panel CSV (year,hour,price for sim-meanrev; wide hourly panel otherwise)");
  app->add_option("--data-dir", o->data_dir, "Candle directory, instead of --input");
  app->add_option("--years", o->years, "Years to load from --data-dir");
  app->add_option("--clock-kind", o->clock_kind, "clock, dollar or volume")->capture_default_str();
  app->add_option("--coeffs", o->coeffs, "Prediction coefficients CSV (xcorr)");
  app->add_option("--staleness", o->staleness, "Hours of delay S >= 1")->capture_default_str();
  app->add_option("--cost", o->cost, "Round-trip cost as a fraction of notional")->capture_default_str();
  app->add_option("--top-fraction", o->top_fraction, "xcorr: fraction traded on each side")->capture_default_str();
  app->add_option("--min-side-count", o->min_side_count, "market-meanrev: minimum tickers per side")
      ->capture_default_str();
  app->add_option("--min-active-fraction", o->min_active_fraction, "Eligibility: share of hours with a price")
      ->capture_default_str();
  app->add_option("--stake", o->stake, "Stake per side per hour")->capture_default_str();
  app->add_flag("--long-only", o->long_only, "Trade only the long side");
  app->add_option("--seed", o->seed, "Recorded in the manifest; the backtest itself is deterministic")
      ->capture_default_str();
  return {app, [o](RunContext& ctx) { run_backtest(*o, ctx); }};
}

}  // namespace hurstarb::cli
