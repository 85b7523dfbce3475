#include "hurstarb/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"

namespace hurstarb {

std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::SimMeanRev: return "sim-meanrev";
    case StrategyKind::MarketMeanRev: return "market-meanrev";
    case StrategyKind::XCorrDiscrepancy: return "xcorr";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "sim-meanrev") return StrategyKind::SimMeanRev;
  if (s == "market-meanrev") return StrategyKind::MarketMeanRev;
  if (s == "xcorr" || s == "xcorr-discrepancy") return StrategyKind::XCorrDiscrepancy;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void StrategyConfig::validate() const {
  if (staleness < 1)
    throw std::invalid_argument("staleness must be at least 1 (the return uses the average price of hour h+1)");
  if (!(top_fraction > 0.0 && top_fraction <= 0.5)) throw std::invalid_argument("top_fraction must lie in (0, 0.5]");
  if (min_side_count < 0) throw std::invalid_argument("min_side_count must be non-negative");
  if (!(min_active_fraction > 0.0 && min_active_fraction <= 1.0))
    throw std::invalid_argument("min_active_fraction must lie in (0, 1]");
  if (!(stake > 0.0)) throw std::invalid_argument("stake must be positive");
  if (!(cost >= 0.0)) throw std::invalid_argument("cost must be non-negative");
}

double rms_hourly_return(const Eigen::MatrixXd& prices) {
  if (prices.rows() < 1 || prices.cols() < 2) throw std::invalid_argument("rms_hourly_return: panel too small");
  double total = 0.0;
  for (Eigen::Index y = 0; y < prices.rows(); ++y) {
    double s = 0.0;
    for (Eigen::Index h = 0; h + 1 < prices.cols(); ++h) {
      const double r = std::log(prices(y, h + 1) / prices(y, h));
      s += r * r;
    }
    total += std::sqrt(s / static_cast<double>(prices.cols() - 1));
  }
  return total / static_cast<double>(prices.rows());
}

SimMeanRevResult run_sim_meanrev(const Eigen::MatrixXd& prices, double annualization) {
  if (prices.cols() < 4) throw std::invalid_argument("run_sim_meanrev: need at least 4 hours per year");
  if ((prices.array() <= 0.0).any() || !prices.allFinite()) throw DataError("run_sim_meanrev: prices must be positive");
  SimMeanRevResult out;
  out.r_rms = rms_hourly_return(prices);
  for (Eigen::Index y = 0; y < prices.rows(); ++y) {
    double pnl = 0.0, denom = 0.0;
    if (out.r_rms > 0.0) {
      for (Eigen::Index h = 0; h + 3 < prices.cols(); ++h) {
        const double r_hat = std::log(prices(y, h + 1) / prices(y, h)) / out.r_rms;
        const double q = -r_hat / prices(y, h + 1);
        pnl += q * (prices(y, h + 3) - prices(y, h + 2));
        denom += std::abs(r_hat);
      }
    }
    out.yearly_return.push_back(denom > 0.0 ? annualization * pnl / denom : 0.0);
  }
  return out;
}

std::vector<std::size_t> eligibility_filter(const HourlyPanel& panel, double min_active_fraction) {
  if (!(min_active_fraction > 0.0 && min_active_fraction <= 1.0))
    throw std::invalid_argument("min_active_fraction must lie in (0, 1]");
  std::vector<std::size_t> keep;
  const std::size_t n_years = std::max<std::size_t>(1, panel.years.size());
  for (Eigen::Index k = 0; k < panel.n_tickers(); ++k) {
    bool ok = true;
    for (std::size_t y = 0; y < n_years && ok; ++y) {
      std::int64_t b = 0, e = panel.n_hours();
      if (!panel.years.empty()) std::tie(b, e) = panel.year_rows(y);
      if (e <= b) continue;
      std::int64_t active = 0;
      for (std::int64_t h = b; h < e; ++h) active += std::isfinite(panel.prices(h, k)) ? 1 : 0;
      ok = static_cast<double>(active) >= min_active_fraction * static_cast<double>(e - b);
    }
    if (ok) keep.push_back(static_cast<std::size_t>(k));
  }
  return keep;
}

namespace {

struct Leg {
  std::size_t ticker;
  double weight;
};

// Opens one side of an hour: drops tickers lacking an entry or exit price and
// splits the stake over the rest by weight. Returns false if nothing is left.
bool open_side(const HourlyPanel& panel, std::vector<Leg> legs, int side, std::int64_t h, std::int64_t entry_row,
               const StrategyConfig& cfg, std::vector<TradeRecord>& out) {
  std::erase_if(legs, [&](const Leg& l) {
    const auto k = static_cast<Eigen::Index>(l.ticker);
    return !std::isfinite(panel.prices(entry_row, k)) || !std::isfinite(panel.prices(entry_row + 1, k)) ||
           !(l.weight > 0.0);
  });
  if (legs.empty()) return false;
  double total = 0.0;
  for (const auto& l : legs) total += l.weight;
  for (const auto& l : legs) {
    const auto k = static_cast<Eigen::Index>(l.ticker);
    TradeRecord t;
    t.hour = h;
    t.ticker = l.ticker;
    t.side = side;
    t.entry = panel.prices(entry_row, k);
    t.exit = panel.prices(entry_row + 1, k);
    const double notional = cfg.stake * l.weight / total;
    t.qty = side * notional / t.entry;
    t.pnl = t.qty * (t.exit - t.entry) - cfg.cost * notional;
    out.push_back(t);
  }
  return true;
}

// Left fold over the ledger in order, so the endpoint equals the ledger sum
// exactly. Trades are ordered by decision hour and all close S+2 hours later.
EquityCurve make_curve(const TradeLedger& ledger, std::int64_t n_hours, int staleness, double stake) {
  EquityCurve c;
  c.stake = stake;
  c.cum_pnl.assign(static_cast<std::size_t>(n_hours), 0.0);
  double cum = 0.0;
  std::size_t i = 0;
  for (std::int64_t hr = 0; hr < n_hours; ++hr) {
    for (; i < ledger.trades.size() && ledger.trades[i].hour + 2 + staleness <= hr; ++i) cum += ledger.trades[i].pnl;
    c.cum_pnl[static_cast<std::size_t>(hr)] = cum;
  }
  return c;
}

std::vector<double> hour_returns(const HourlyPanel& panel, std::int64_t h, const std::vector<std::size_t>& cols) {
  std::vector<double> r(static_cast<std::size_t>(panel.n_tickers()), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k : cols) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double a = panel.prices(h, kk), b = panel.prices(h + 1, kk);
    if (std::isfinite(a) && std::isfinite(b)) r[k] = std::log(b / a);
  }
  return r;
}

}  // namespace

BacktestResult run_market_meanrev(const HourlyPanel& panel, const StrategyConfig& cfg) {
  cfg.validate();
  BacktestResult res;
  res.ledger.tickers = panel.tickers;
  const auto cols = eligibility_filter(panel, cfg.min_active_fraction);
  const std::int64_t H = panel.n_hours();
  const int S = cfg.staleness;
  for (std::int64_t h = 0; h + 2 + S < H; ++h) {
    const auto r = hour_returns(panel, h, cols);
    std::vector<Leg> longs, shorts;
    for (std::size_t k : cols) {
      if (!std::isfinite(r[k])) continue;
      if (r[k] < 0.0) longs.push_back({k, -r[k]});
      if (r[k] > 0.0) shorts.push_back({k, r[k]});
    }
    if (static_cast<int>(longs.size()) < cfg.min_side_count || static_cast<int>(shorts.size()) < cfg.min_side_count ||
        longs.empty() || shorts.empty()) {
      res.ledger.skipped_hours.push_back(h);
      continue;
    }
    std::vector<TradeRecord> trades;
    const std::int64_t entry = h + 1 + S;
    bool ok = open_side(panel, std::move(longs), +1, h, entry, cfg, trades);
    if (ok && !cfg.long_only) ok = open_side(panel, std::move(shorts), -1, h, entry, cfg, trades);
    if (!ok) {
      res.ledger.skipped_hours.push_back(h);
      continue;
    }
    res.ledger.trades.insert(res.ledger.trades.end(), trades.begin(), trades.end());
  }
  res.equity = make_curve(res.ledger, H, S, cfg.stake);
  return res;
}

BacktestResult run_xcorr_strategy(const HourlyPanel& panel, const PredictionCoeffs& B, const StrategyConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = panel.n_tickers();
  if (B.B.rows() != n || B.B.cols() != n) throw std::invalid_argument("coefficients do not match the panel width");
  if (!B.tickers.empty() && B.tickers != panel.tickers)
    throw DataError("coefficient tickers do not match the panel tickers");
  BacktestResult res;
  res.ledger.tickers = panel.tickers;
  const auto cols = eligibility_filter(panel, cfg.min_active_fraction);
  const std::int64_t H = panel.n_hours();
  const int S = cfg.staleness;
  for (std::int64_t h = 0; h + 2 + S < H; ++h) {
    const auto r = hour_returns(panel, h, cols);
    const Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
    const Eigen::VectorXd r_hat = predict(B, rv);
    std::vector<std::size_t> known;
    for (std::size_t k : cols)
      if (std::isfinite(r[k])) known.push_back(k);
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(cfg.top_fraction * static_cast<double>(known.size()) + 1e-9)));
    if (known.size() < 2 * count) {
      res.ledger.skipped_hours.push_back(h);
      continue;
    }
    std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k : known) delta[k] = r_hat(static_cast<Eigen::Index>(k)) - r[k];
    std::stable_sort(known.begin(), known.end(), [&](std::size_t a, std::size_t b) { return delta[a] > delta[b]; });
    std::vector<Leg> longs, shorts;
    for (std::size_t i = 0; i < count; ++i) {
      longs.push_back({known[i], 1.0});
      shorts.push_back({known[known.size() - count + i], 1.0});
    }
    std::vector<TradeRecord> trades;
    const std::int64_t entry = h + 1 + S;
    bool ok = open_side(panel, std::move(longs), +1, h, entry, cfg, trades);
    if (ok && !cfg.long_only) ok = open_side(panel, std::move(shorts), -1, h, entry, cfg, trades);
    if (!ok) {
      res.ledger.skipped_hours.push_back(h);
      continue;
    }
    res.ledger.trades.insert(res.ledger.trades.end(), trades.begin(), trades.end());
  }
  res.equity = make_curve(res.ledger, H, S, cfg.stake);
  return res;
}

double annualized_yield(const EquityCurve& curve) {
  if (curve.cum_pnl.empty()) return 0.0;
  return curve.cum_pnl.back() / curve.stake * kHoursPerYear / static_cast<double>(curve.n_hours());
}

void write_ledger_csv(std::ostream& out, const TradeLedger& ledger) {
  out << "hour,ticker,side,qty,entry,exit,pnl\n";
  for (const auto& t : ledger.trades)
    out << t.hour << ',' << ledger.tickers.at(t.ticker) << ',' << (t.side > 0 ? "long" : "short") << ','
        << csv::format(t.qty) << ',' << csv::format(t.entry) << ',' << csv::format(t.exit) << ','
        << csv::format(t.pnl) << '\n';
}

void write_equity_csv(std::ostream& out, const EquityCurve& curve) {
  out << "txn_hour,cum_pnl,annualized\n";
  for (std::size_t h = 0; h < curve.cum_pnl.size(); ++h) {
    const double ann = curve.cum_pnl[h] / curve.stake * kHoursPerYear / static_cast<double>(h + 1);
    out << h << ',' << csv::format(curve.cum_pnl[h]) << ',' << csv::format(ann) << '\n';
  }
}

void write_yearly_csv(std::ostream& out, const SimMeanRevResult& r) {
  out << "year,P_y\n";
  for (std::size_t y = 0; y < r.yearly_return.size(); ++y) out << y << ',' << csv::format(r.yearly_return[y]) << '\n';
}

}  // namespace hurstarb
