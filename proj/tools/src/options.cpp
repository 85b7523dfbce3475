#include "options.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/variogram.hpp"

namespace hurstarb::cli {

std::vector<double> parse_tau_grid(const std::string& spec) {
  if (spec.empty() || spec == "default") return default_tau_grid();
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    const auto f = csv::split(spec, ':');
    if (f.size() != 3) throw std::invalid_argument("--tau-grid expects lo:hi:per_decade");
    const auto per = csv::parse_int(f[2]);
    if (per < 1 || per > 1000) throw std::invalid_argument("--tau-grid points per decade must be in [1, 1000]");
    grid = log_tau_grid(csv::parse_double(f[0]), csv::parse_double(f[1]), static_cast<int>(per));
  } else {
    for (auto f : csv::split(spec, ',')) grid.push_back(csv::parse_double(f));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("--tau-grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("--tau-grid must be increasing");
  }
  return grid;
}

std::vector<int> parse_years(const std::string& spec) {
  std::vector<int> out;
  for (auto part : csv::split(spec, ',')) {
    const auto dash = part.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(static_cast<int>(csv::parse_int(part)));
      continue;
    }
    const auto a = csv::parse_int(part.substr(0, dash)), b = csv::parse_int(part.substr(dash + 1));
    if (b < a || b - a > 1000) throw std::invalid_argument("bad year range '" + std::string(part) + "'");
    for (auto y = a; y <= b; ++y) out.push_back(static_cast<int>(y));
  }
  if (out.empty()) throw std::invalid_argument("no years given");
  if (std::set<int>(out.begin(), out.end()).size() != out.size()) throw std::invalid_argument("repeated year");
  return out;
}

nlohmann::json option_values(const CLI::App& app) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* o : app.get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "out") continue;
    if (o->count() > 0) {
      const auto& r = o->results();
      j[name] = r.size() == 1 ? nlohmann::json(r.front()) : nlohmann::json(r);
    } else {
      j[name] = o->get_default_str();
    }
  }
  return j;
}

std::vector<CandleSeries> candles_in_year(const std::vector<CandleSeries>& all, int year) {
  const auto [b, e] = year_bounds(year);
  std::vector<CandleSeries> out;
  for (const auto& s : all) {
    CandleSeries c{s.ticker, {}};
    for (const auto& k : s.candles)
      if (k.timestamp >= b && k.timestamp < e) c.candles.push_back(k);
    if (!c.candles.empty()) out.push_back(std::move(c));
  }
  return out;
}

ClockMap year_clock(RunContext& ctx, const std::vector<CandleSeries>& year_candles, int year,
                    const std::string& clock_file, ClockKind kind) {
  if (!clock_file.empty()) {
    auto in = csv::open_input(ctx.input(clock_file));
    return read_clock_csv(in, year, kind);
  }
  if (year_candles.empty()) throw DataError("no candles in " + std::to_string(year));
  return build_clock(year_candles, year, kind);
}

HourlyPanel load_hourly_panel(RunContext& ctx, const std::string& input, const std::string& data_dir,
                              const std::string& years, ClockKind kind) {
  if (!input.empty() && !data_dir.empty()) throw std::invalid_argument("give either --input or --data-dir, not both");
  if (!input.empty()) {
    auto in = csv::open_input(ctx.input(input));
    return read_hourly_panel_csv(in);
  }
  if (data_dir.empty()) throw std::invalid_argument("one of --input or --data-dir is required");
  if (years.empty()) throw std::invalid_argument("--years is required with --data-dir");
  const auto ys = parse_years(years);
  ctx.input_dir(data_dir);
  const auto all = load_candle_dir(data_dir);
  std::vector<std::vector<BinnedSeries>> by_year;
  std::vector<std::int64_t> hours;
  for (int y : ys) {
    const auto yc = candles_in_year(all, y);
    const auto clock = year_clock(ctx, yc, y, {}, kind);
    std::vector<BinnedSeries> bs;
    for (const auto& s : yc) bs.push_back(bin_series(s, clock, 1.0));
    by_year.push_back(std::move(bs));
    hours.push_back(std::llround(clock.total_txn_hours()));
  }
  return build_hourly_panel(by_year, ys, hours);
}

}  // namespace hurstarb::cli
