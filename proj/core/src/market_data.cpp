#include "hurstarb/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"

namespace hurstarb {

namespace {

constexpr std::string_view kCandleHeader = "timestamp,open,high,low,close,volume";

std::string at_line(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

}  // namespace

CandleSeries parse_candles(std::istream& in, std::string ticker) {
  CandleSeries out;
  out.ticker = std::move(ticker);
  std::string line;
  if (!std::getline(in, line)) throw DataError(out.ticker + ": empty candle file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCandleHeader)
    throw DataError(out.ticker + ": " + at_line(1) + "expected header '" + std::string(kCandleHeader) + "'");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 6) throw DataError(out.ticker + ": " + at_line(lineno) + "expected 6 fields");
    Candle c;
    try {
      c.timestamp = csv::parse_int(f[0]);
      c.open = csv::parse_double(f[1]);
      c.high = csv::parse_double(f[2]);
      c.low = csv::parse_double(f[3]);
      c.close = csv::parse_double(f[4]);
      c.volume = csv::parse_double(f[5]);
    } catch (const std::invalid_argument& e) {
      throw DataError(out.ticker + ": " + at_line(lineno) + e.what());
    }
    const std::string where = out.ticker + ": " + at_line(lineno);
    if (c.timestamp % 60 != 0) throw DataError(where + "timestamp is not a multiple of 60");
    for (double p : {c.open, c.high, c.low, c.close})
      if (!(p > 0.0) || !std::isfinite(p)) throw DataError(where + "prices must be positive and finite");
    if (!(c.volume >= 0.0) || !std::isfinite(c.volume)) throw DataError(where + "volume must be non-negative");
    if (c.low > std::min(c.open, c.close)) throw DataError(where + "low exceeds min(open, close)");
    if (c.high < std::max(c.open, c.close)) throw DataError(where + "high is below max(open, close)");
    out.candles.push_back(c);
  }

  std::stable_sort(out.candles.begin(), out.candles.end(),
                   [](const Candle& a, const Candle& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < out.candles.size(); ++i)
    if (out.candles[i].timestamp == out.candles[i - 1].timestamp)
      throw DataError(out.ticker + ": duplicate timestamp " + std::to_string(out.candles[i].timestamp));
  return out;
}

CandleSeries parse_candles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open candle file " + path.string());
  return parse_candles(in, path.stem().string());
}

std::vector<CandleSeries> load_candle_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no candle CSV files in " + dir.string());
  std::vector<CandleSeries> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(parse_candles(f));
  return out;
}

void write_candles(std::ostream& out, const CandleSeries& series) {
  out << kCandleHeader << '\n';
  for (const auto& c : series.candles)
    out << c.timestamp << ',' << csv::format(c.open) << ',' << csv::format(c.high) << ','
        << csv::format(c.low) << ',' << csv::format(c.close) << ',' << csv::format(c.volume) << '\n';
}

std::vector<TimedPrice> to_timed_prices(const CandleSeries& s, const ClockMap& clock) {
  std::vector<TimedPrice> pts;
  pts.reserve(s.candles.size());
  for (const auto& c : s.candles) {
    const double mid = static_cast<double>(c.timestamp) + 30.0;
    if (!clock.contains(mid))
      throw DataError(s.ticker + ": candle at " + std::to_string(c.timestamp) +
                      " outside the clock's domain (year " + std::to_string(clock.year()) + ")");
    pts.push_back({clock.to_txn_time(mid), representative_price(c)});
  }
  return pts;
}

BinnedSeries bin_points(std::span<const TimedPrice> points, double tau, std::string ticker) {
  if (!(tau > 0.0)) throw std::invalid_argument("bin width must be positive");
  BinnedSeries out;
  out.ticker = std::move(ticker);
  out.tau = tau;
  double sum_t = 0.0, sum_p = 0.0;
  std::size_t n = 0;
  std::int64_t current = std::numeric_limits<std::int64_t>::min();
  auto flush = [&] {
    if (n == 0) return;
    out.bins.push_back({current, sum_t / static_cast<double>(n), sum_p / static_cast<double>(n), n});
    sum_t = sum_p = 0.0;
    n = 0;
  };
  double last_t = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.time < last_t) throw std::invalid_argument("bin_points: observations must be sorted by time");
    last_t = p.time;
    auto k = static_cast<std::int64_t>(std::floor(p.time / tau));
    // Guard the half-open convention against rounding in p.time / tau.
    if (static_cast<double>(k + 1) * tau <= p.time) ++k;
    if (static_cast<double>(k) * tau > p.time) --k;
    if (k != current) {
      flush();
      current = k;
    }
    sum_t += p.time;
    sum_p += p.price;
    ++n;
  }
  flush();
  return out;
}

BinnedSeries bin_series(const CandleSeries& s, const ClockMap& clock, double tau) {
  if (!(tau >= 1.0 / 60.0 - 1e-12))
    throw std::invalid_argument("bin width must be at least one minute (1/60 transaction hour)");
  const auto pts = to_timed_prices(s, clock);
  return bin_points(pts, tau, s.ticker);
}

ReturnSeries log_returns(const BinnedSeries& b) {
  if (b.bins.size() < 2) throw std::invalid_argument("log_returns needs at least two bins");
  ReturnSeries out;
  out.entries.reserve(b.bins.size() - 1);
  for (const auto& bin : b.bins)
    if (!(bin.mean_price > 0.0)) throw DataError(b.ticker + ": non-positive bin price");
  for (std::size_t i = 0; i + 1 < b.bins.size(); ++i) {
    const auto& a = b.bins[i];
    const auto& c = b.bins[i + 1];
    out.entries.push_back({std::log(c.mean_price / a.mean_price), c.mean_time - a.mean_time, i, a.index});
  }
  return out;
}

std::pair<std::int64_t, std::int64_t> HourlyPanel::year_rows(std::size_t y) const {
  if (y >= year_start_row.size()) throw std::out_of_range("year index");
  const auto end = y + 1 < year_start_row.size() ? year_start_row[y + 1] : n_hours();
  return {year_start_row[y], end};
}

HourlyPanel build_hourly_panel(const std::vector<std::vector<BinnedSeries>>& by_year,
                               const std::vector<int>& years,
                               const std::vector<std::int64_t>& hours_per_year) {
  if (by_year.size() != years.size() || years.size() != hours_per_year.size())
    throw std::invalid_argument("build_hourly_panel: per-year inputs differ in length");
  std::set<std::string> names;
  for (const auto& ys : by_year)
    for (const auto& s : ys) names.insert(s.ticker);
  HourlyPanel p;
  p.tickers.assign(names.begin(), names.end());
  p.years = years;
  std::map<std::string, Eigen::Index> col;
  for (std::size_t i = 0; i < p.tickers.size(); ++i) col[p.tickers[i]] = static_cast<Eigen::Index>(i);

  std::int64_t total = 0;
  for (auto h : hours_per_year) {
    p.year_start_row.push_back(total);
    total += h;
  }
  p.prices = Eigen::MatrixXd::Constant(total, static_cast<Eigen::Index>(p.tickers.size()),
                                       std::numeric_limits<double>::quiet_NaN());
  for (std::size_t y = 0; y < by_year.size(); ++y) {
    for (const auto& s : by_year[y]) {
      const Eigen::Index c = col.at(s.ticker);
      for (const auto& bin : s.bins) {
        if (bin.index < 0 || bin.index >= hours_per_year[y])
          throw DataError(s.ticker + ": bin index outside the year's hour range");
        p.prices(p.year_start_row[y] + bin.index, c) = bin.mean_price;
      }
    }
  }
  return p;
}

HourlyPanel make_hourly_panel(std::vector<std::string> tickers, Eigen::MatrixXd prices, int year) {
  if (static_cast<Eigen::Index>(tickers.size()) != prices.cols())
    throw std::invalid_argument("make_hourly_panel: ticker count differs from column count");
  HourlyPanel p;
  p.tickers = std::move(tickers);
  p.years = {year};
  p.year_start_row = {0};
  p.prices = std::move(prices);
  return p;
}

Eigen::MatrixXd hourly_returns(const HourlyPanel& panel) {
  const auto h = panel.n_hours();
  const auto n = panel.n_tickers();
  Eigen::MatrixXd r(std::max<Eigen::Index>(h - 1, 0), n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index t = 0; t + 1 < h; ++t) {
      const double a = panel.prices(t, k), b = panel.prices(t + 1, k);
      r(t, k) = (std::isnan(a) || std::isnan(b)) ? std::numeric_limits<double>::quiet_NaN() : std::log(b / a);
    }
  return r;
}

void write_hourly_panel_csv(std::ostream& out, const HourlyPanel& panel) {
  out << "year,txn_hour";
  for (const auto& t : panel.tickers) out << ',' << t;
  out << '\n';
  for (std::size_t y = 0; y < panel.years.size(); ++y) {
    const auto [b, e] = panel.year_rows(y);
    for (std::int64_t h = b; h < e; ++h) {
      out << panel.years[y] << ',' << (h - b);
      for (Eigen::Index k = 0; k < panel.n_tickers(); ++k) {
        out << ',';
        const double v = panel.prices(h, k);
        if (!std::isnan(v)) out << csv::format(v);
      }
      out << '\n';
    }
  }
}

HourlyPanel read_hourly_panel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("hourly panel: empty input");
  const auto head = csv::split(line);
  if (head.size() < 3 || head[0] != "year" || head[1] != "txn_hour")
    throw DataError("hourly panel: header must be year,txn_hour,<tickers>");
  HourlyPanel p;
  for (std::size_t i = 2; i < head.size(); ++i) p.tickers.emplace_back(head[i]);
  const auto n = static_cast<Eigen::Index>(p.tickers.size());
  std::vector<double> values;
  std::int64_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (static_cast<Eigen::Index>(f.size()) != n + 2)
      throw DataError("hourly panel line " + std::to_string(line_no) + ": wrong field count");
    int year = 0;
    long long hour = 0;
    try {
      year = static_cast<int>(csv::parse_int(f[0]));
      hour = csv::parse_int(f[1]);
    } catch (const std::invalid_argument&) {
      throw DataError("hourly panel line " + std::to_string(line_no) + ": bad year or hour");
    }
    if (p.years.empty() || p.years.back() != year) {
      if (std::find(p.years.begin(), p.years.end(), year) != p.years.end())
        throw DataError("hourly panel: year " + std::to_string(year) + " is not contiguous");
      p.years.push_back(year);
      p.year_start_row.push_back(row);
    }
    if (hour != row - p.year_start_row.back())
      throw DataError("hourly panel line " + std::to_string(line_no) + ": hours must be consecutive from 0");
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto cell = f[static_cast<std::size_t>(k) + 2];
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!cell.empty()) {
        try {
          v = csv::parse_double(cell);
        } catch (const std::invalid_argument&) {
          throw DataError("hourly panel line " + std::to_string(line_no) + ": bad price");
        }
        if (!(v > 0.0) && !std::isnan(v)) throw DataError("hourly panel line " + std::to_string(line_no) + ": non-positive price");
      }
      values.push_back(v);
    }
    ++row;
  }
  if (row == 0) throw DataError("hourly panel: no rows");
  p.prices = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), row, n);
  return p;
}

}  // namespace hurstarb
