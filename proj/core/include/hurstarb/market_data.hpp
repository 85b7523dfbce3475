#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hurstarb/candle.hpp"
#include "hurstarb/transaction_clock.hpp"

namespace hurstarb {

// Parses the per-ticker candle CSV
//   timestamp,open,high,low,close,volume
// and returns candles sorted by timestamp. Throws DataError naming the line
// for malformed rows, OHLC violations, non-positive prices, timestamps that
// are not minute-aligned, and duplicate timestamps.
CandleSeries parse_candles(std::istream& in, std::string ticker);
// Ticker is the file stem (`AAPL.csv` -> "AAPL").
CandleSeries parse_candles(const std::filesystem::path& path);
// Every `*.csv` in `dir`, ordered by ticker.
std::vector<CandleSeries> load_candle_dir(const std::filesystem::path& dir);

void write_candles(std::ostream& out, const CandleSeries& series);

// A price observed at a transaction-time coordinate (hours).
struct TimedPrice {
  double time = 0.0;
  double price = 0.0;
};

// Candles of `s` mapped through `clock` (mid-minute coordinate, OHLC-mean
// price). Candles outside the clock's year are an error.
std::vector<TimedPrice> to_timed_prices(const CandleSeries& s, const ClockMap& clock);

struct Bin {
  std::int64_t index = 0;  // k for the half-open bin [k*tau, (k+1)*tau)
  double mean_time = 0.0;
  double mean_price = 0.0;
  std::size_t n_candles = 0;
};

// Non-empty tau-bins of a series; empty bins are absent.
struct BinnedSeries {
  std::string ticker;
  double tau = 0.0;
  std::vector<Bin> bins;
};

// Bins observations sorted by time into [k*tau, (k+1)*tau), k counted from
// transaction time 0. A point on a boundary belongs to the later bin.
BinnedSeries bin_points(std::span<const TimedPrice> points, double tau, std::string ticker = {});

// bin_points over the candles' transaction-time coordinates. tau is in
// transaction hours and must be at least one minute.
BinnedSeries bin_series(const CandleSeries& s, const ClockMap& clock, double tau);

struct ReturnEntry {
  double r = 0.0;             // log(p_{i+1} / p_i)
  double dt = 0.0;            // mean_time_{i+1} - mean_time_i
  std::size_t start_index = 0;  // position i in BinnedSeries::bins
  std::int64_t start_bin = 0;   // grid index of bin i
};

struct ReturnSeries {
  std::vector<ReturnEntry> entries;
};

// Log-returns between consecutive known bins. Requires >= 2 bins; throws
// DataError on a non-positive price.
ReturnSeries log_returns(const BinnedSeries& b);

// Prices on a common hourly grid, one column per ticker, NaN where unknown.
// Rows are consecutive transaction hours; multi-year panels concatenate the
// years, and `year_start_row` marks where each begins.
struct HourlyPanel {
  std::vector<std::string> tickers;
  std::vector<int> years;
  std::vector<std::int64_t> year_start_row;
  Eigen::MatrixXd prices;  // rows = hours, cols = tickers

  std::int64_t n_hours() const { return prices.rows(); }
  std::int64_t n_tickers() const { return prices.cols(); }
  // Rows [begin, end) belonging to years[y].
  std::pair<std::int64_t, std::int64_t> year_rows(std::size_t y) const;
};

// Assembles a panel from 1-hour BinnedSeries, one vector per year. Tickers are
// the sorted union over years; a ticker absent in a year is all-NaN there.
HourlyPanel build_hourly_panel(const std::vector<std::vector<BinnedSeries>>& by_year,
                               const std::vector<int>& years,
                               const std::vector<std::int64_t>& hours_per_year);

// Single-year panel from a dense price matrix (rows = hours).
HourlyPanel make_hourly_panel(std::vector<std::string> tickers, Eigen::MatrixXd prices,
                              int year = 0);

// Hour-to-hour log returns, row h = log(p_{h+1} / p_h); NaN unless both are known.
Eigen::MatrixXd hourly_returns(const HourlyPanel& panel);

// Wide CSV `year,txn_hour,<ticker>...`, txn_hour counted within the year and
// unknown prices left empty.
void write_hourly_panel_csv(std::ostream& out, const HourlyPanel& panel);
// Years must appear in contiguous blocks with consecutive hours from 0.
HourlyPanel read_hourly_panel_csv(std::istream& in);

}  // namespace hurstarb
