#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hurstarb/loo_predictor.hpp"
#include "hurstarb/market_data.hpp"

namespace hurstarb {

inline constexpr double kHoursPerYear = 8760.0;

enum class StrategyKind { SimMeanRev, MarketMeanRev, XCorrDiscrepancy };

std::string_view to_string(StrategyKind k);
// "sim-meanrev", "market-meanrev", "xcorr" (underscores accepted).
StrategyKind parse_strategy(std::string_view name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::MarketMeanRev;
  // Returns from hours h and h+1 are traded by entering in hour h+1+S and
  // exiting in hour h+2+S. S = 1 enters in h+2.
  int staleness = 1;
  double top_fraction = 0.05;
  int min_side_count = 100;
  double min_active_fraction = 0.5;
  double stake = 1.0;
  // Charged per round trip as a fraction of the position's notional.
  double cost = 0.0;
  bool long_only = false;

  void validate() const;
};

struct TradeRecord {
  std::int64_t hour = 0;  // decision hour h
  std::size_t ticker = 0;
  int side = 0;           // +1 long, -1 short
  double qty = 0.0;       // signed shares
  double entry = 0.0;
  double exit = 0.0;
  double pnl = 0.0;
};

struct TradeLedger {
  std::vector<std::string> tickers;
  std::vector<TradeRecord> trades;
  std::vector<std::int64_t> skipped_hours;
};

// Cumulative uncompounded P&L at every hour of the panel; a trade's P&L is
// booked at its exit hour.
struct EquityCurve {
  std::vector<double> cum_pnl;
  double stake = 1.0;

  std::size_t n_hours() const { return cum_pnl.size(); }
};

struct BacktestResult {
  TradeLedger ledger;
  EquityCurve equity;
};

// Mean over years of the per-year rms hourly log return (prices: rows = years).
double rms_hourly_return(const Eigen::MatrixXd& prices);

struct SimMeanRevResult {
  std::vector<double> yearly_return;  // P_y
  double r_rms = 0.0;
};

// Per year: r_hat = log(p[h+1]/p[h]) / r_rms, q = -r_hat / p[h+1], pnl
// q (p[h+3] - p[h+2]); P_y = annualization * sum pnl / sum |r_hat| over the
// traded hours.
SimMeanRevResult run_sim_meanrev(const Eigen::MatrixXd& prices, double annualization = kHoursPerYear);

// Columns whose share of known prices is at least `min_active_fraction` in
// every year of the panel.
std::vector<std::size_t> eligibility_filter(const HourlyPanel& panel, double min_active_fraction = 0.5);

// Long the negative-return side and short the positive-return side with stake
// split in proportion to |r|, skipping hours where either side has fewer than
// min_side_count tickers. `long_only` drops the short leg.
BacktestResult run_market_meanrev(const HourlyPanel& panel, const StrategyConfig& cfg);

// Long the top fraction of r_hat - r, short the bottom fraction, equal weights.
// B must be over the panel's tickers, in the same order.
BacktestResult run_xcorr_strategy(const HourlyPanel& panel, const PredictionCoeffs& B, const StrategyConfig& cfg);

// End-point P&L per unit stake, scaled to 8760 hours.
double annualized_yield(const EquityCurve& curve);

// `hour,ticker,side,qty,entry,exit,pnl`
void write_ledger_csv(std::ostream& out, const TradeLedger& ledger);
// `txn_hour,cum_pnl,annualized`
void write_equity_csv(std::ostream& out, const EquityCurve& curve);
// `year,P_y`
void write_yearly_csv(std::ostream& out, const SimMeanRevResult& r);

}  // namespace hurstarb
