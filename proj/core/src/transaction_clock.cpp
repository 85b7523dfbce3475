#include "hurstarb/transaction_clock.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"

namespace hurstarb {

namespace {

// Days since 1970-01-01 of a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr std::int64_t kSecondsPerDay = 86400;

}  // namespace

std::string_view to_string(ClockKind kind) {
  switch (kind) {
    case ClockKind::Clock: return "clock";
    case ClockKind::DollarWeighted: return "dollar";
    case ClockKind::VolumeWeighted: return "volume";
  }
  return "unknown";
}

ClockKind parse_clock_kind(std::string_view name) {
  if (name == "clock") return ClockKind::Clock;
  if (name == "dollar" || name == "usd" || name == "$tw") return ClockKind::DollarWeighted;
  if (name == "volume" || name == "vtw") return ClockKind::VolumeWeighted;
  throw std::invalid_argument("unknown clock kind '" + std::string(name) +
                              "' (expected clock, dollar or volume)");
}

std::pair<std::int64_t, std::int64_t> year_bounds(int year) {
  return {days_from_civil(year, 1, 1) * kSecondsPerDay,
          days_from_civil(static_cast<std::int64_t>(year) + 1, 1, 1) * kSecondsPerDay};
}

double hours_in_year(int year) {
  const auto [s, e] = year_bounds(year);
  return static_cast<double>(e - s) / 3600.0;
}

int year_of(std::int64_t unix_seconds) {
  // Civil year from days (inverse of days_from_civil).
  std::int64_t z = (unix_seconds >= 0 ? unix_seconds : unix_seconds - (kSecondsPerDay - 1)) /
                   kSecondsPerDay;
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return static_cast<int>(y + (m <= 2));
}

ClockMap::ClockMap(int year, ClockKind kind, std::vector<ClockKnot> knots)
    : year_(year), kind_(kind), knots_(std::move(knots)) {
  if (knots_.size() < 2) throw std::invalid_argument("ClockMap needs at least two knots");
  if (knots_.front().txn_hours != 0.0)
    throw std::invalid_argument("ClockMap must start at transaction time 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i].clock_unix <= knots_[i - 1].clock_unix)
      throw std::invalid_argument("ClockMap knots must have strictly increasing clock times");
    if (knots_[i].txn_hours < knots_[i - 1].txn_hours)
      throw std::invalid_argument("ClockMap knots must have non-decreasing transaction times");
  }
  if (!(knots_.back().txn_hours > 0.0))
    throw std::invalid_argument("ClockMap must span positive transaction time");
}

double ClockMap::to_txn_time(double t) const {
  if (!contains(t))
    throw std::out_of_range("clock time " + csv::format(t) + " outside clock domain [" +
                            std::to_string(start()) + ", " + std::to_string(end()) + "]");
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const ClockKnot& k) { return v < static_cast<double>(k.clock_unix); });
  if (it == knots_.end()) return knots_.back().txn_hours;
  const ClockKnot& hi = *it;
  const ClockKnot& lo = *(it - 1);
  const double span = static_cast<double>(hi.clock_unix - lo.clock_unix);
  const double frac = (t - static_cast<double>(lo.clock_unix)) / span;
  return lo.txn_hours + frac * (hi.txn_hours - lo.txn_hours);
}

double ClockMap::to_clock_time(double tt) const {
  if (!(tt >= 0.0 && tt <= total_txn_hours()))
    throw std::out_of_range("transaction time " + csv::format(tt) + " outside [0, " +
                            csv::format(total_txn_hours()) + "]");
  auto it = std::lower_bound(knots_.begin(), knots_.end(), tt,
                             [](const ClockKnot& k, double v) { return k.txn_hours < v; });
  if (it->txn_hours == tt) return static_cast<double>(it->clock_unix);
  const ClockKnot& hi = *it;
  const ClockKnot& lo = *(it - 1);
  const double frac = (tt - lo.txn_hours) / (hi.txn_hours - lo.txn_hours);
  return static_cast<double>(lo.clock_unix) +
         frac * static_cast<double>(hi.clock_unix - lo.clock_unix);
}

ClockMap build_clock_from_weights(int year, ClockKind kind, std::int64_t start, std::int64_t end,
                                  double total_hours, std::span<const MinuteWeight> weights) {
  if (end <= start) throw std::invalid_argument("clock span must be non-empty");
  if (!(total_hours > 0.0)) throw std::invalid_argument("total transaction hours must be positive");
  if (kind == ClockKind::Clock) return ClockMap(year, kind, {{start, 0.0}, {end, total_hours}});

  if (weights.empty()) throw DataError("no candles to build a weighted clock");
  double total_weight = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& w = weights[i];
    if (!(w.weight >= 0.0) || !std::isfinite(w.weight)) throw DataError("negative or non-finite minute weight");
    if (w.minute_start < start || w.minute_start + 60 > end)
      throw DataError("minute weight outside the clock span");
    if (i > 0 && w.minute_start < weights[i - 1].minute_start + 60)
      throw std::invalid_argument("minute weights must be sorted and non-overlapping");
    total_weight += w.weight;
  }
  if (!(total_weight > 0.0)) throw DataError("total trading weight is zero");

  std::vector<ClockKnot> knots;
  knots.reserve(2 * weights.size() + 2);
  knots.push_back({start, 0.0});
  double cum = 0.0;
  for (const auto& w : weights) {
    if (w.weight == 0.0) continue;
    const double before = cum / total_weight * total_hours;
    if (knots.back().clock_unix != w.minute_start) {
      // Flat span since the last traded minute.
      knots.push_back({w.minute_start, before});
    }
    cum += w.weight;
    knots.push_back({w.minute_start + 60, cum / total_weight * total_hours});
  }
  // The final cumulative weight equals the total exactly, so the last traded
  // minute already ends at total_hours.
  if (knots.back().clock_unix != end) knots.push_back({end, total_hours});
  knots.back().txn_hours = total_hours;
  return ClockMap(year, kind, std::move(knots));
}

ClockMap build_clock(std::span<const CandleSeries> all_candles, int year, ClockKind kind) {
  const auto [start, end] = year_bounds(year);
  const double hours = hours_in_year(year);
  if (kind == ClockKind::Clock) {
    bool any = false;
    for (const auto& s : all_candles)
      for (const auto& c : s.candles) any = any || (c.timestamp >= start && c.timestamp < end);
    if (!any) throw DataError("no candles in year " + std::to_string(year));
    return build_clock_from_weights(year, kind, start, end, hours, {});
  }
  const auto n_minutes = static_cast<std::size_t>((end - start) / 60);
  std::vector<double> per_minute(n_minutes, 0.0);
  std::vector<char> seen(n_minutes, 0);
  bool any = false;
  for (const auto& s : all_candles) {
    for (const auto& c : s.candles) {
      if (c.timestamp < start || c.timestamp >= end) continue;
      const auto m = static_cast<std::size_t>((c.timestamp - start) / 60);
      const double w = kind == ClockKind::DollarWeighted ? representative_price(c) * c.volume : c.volume;
      per_minute[m] += w;
      seen[m] = 1;
      any = true;
    }
  }
  if (!any) throw DataError("no candles in year " + std::to_string(year));
  std::vector<MinuteWeight> weights;
  for (std::size_t m = 0; m < n_minutes; ++m)
    if (seen[m]) weights.push_back({start + static_cast<std::int64_t>(m) * 60, per_minute[m]});
  return build_clock_from_weights(year, kind, start, end, hours, weights);
}

double candle_txn_time(const ClockMap& clock, const Candle& c) {
  return clock.to_txn_time(static_cast<double>(c.timestamp) + 30.0);
}

void write_clock_csv(std::ostream& out, const ClockMap& clock) {
  out << "clock_unix,txn_hours\n";
  for (const auto& k : clock.knots()) out << k.clock_unix << ',' << csv::format(k.txn_hours) << '\n';
}

ClockMap read_clock_csv(std::istream& in, int year, ClockKind kind) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("clock_unix,txn_hours", 0) != 0)
    throw DataError("clock CSV: expected header clock_unix,txn_hours");
  std::vector<ClockKnot> knots;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 2) throw DataError("clock CSV line " + std::to_string(lineno) + ": expected 2 fields");
    try {
      knots.push_back({csv::parse_int(f[0]), csv::parse_double(f[1])});
    } catch (const std::invalid_argument& e) {
      throw DataError("clock CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    return ClockMap(year, kind, std::move(knots));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("clock CSV: ") + e.what());
  }
}

}  // namespace hurstarb
