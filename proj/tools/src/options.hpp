#pragma once

#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hurstarb/market_data.hpp"
#include "hurstarb/transaction_clock.hpp"
#include "run_context.hpp"

namespace hurstarb::cli {

struct Command {
  CLI::App* app = nullptr;
  std::function<void(RunContext&)> run;
};

// Each registers a subcommand on `root`.
Command register_clock(CLI::App& root);
Command register_variogram(CLI::App& root);
Command register_simulate(CLI::App& root);
Command register_backtest(CLI::App& root);
Command register_predict(CLI::App& root);
Command register_correlate(CLI::App& root);

// "lo:hi:per_decade" (log spaced), a comma list, or "default".
std::vector<double> parse_tau_grid(const std::string& spec);
// "2018", "2018,2020" or "2018-2022".
std::vector<int> parse_years(const std::string& spec);

// Resolved value of every option of `app` except help, as strings.
nlohmann::json option_values(const CLI::App& app);

// Candles of each ticker restricted to `year`; tickers with none are dropped.
std::vector<CandleSeries> candles_in_year(const std::vector<CandleSeries>& all, int year);

// Clock for `year` from `--clock` if given, else built from the candles.
ClockMap year_clock(RunContext& ctx, const std::vector<CandleSeries>& year_candles, int year,
                    const std::string& clock_file, ClockKind kind);

// Hourly panel from a wide panel CSV or from a candle directory.
HourlyPanel load_hourly_panel(RunContext& ctx, const std::string& input, const std::string& data_dir,
                              const std::string& years, ClockKind kind);

}  // namespace hurstarb::cli
