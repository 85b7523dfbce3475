#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hurstarb/candle.hpp"

namespace hurstarb {

enum class ClockKind { Clock, DollarWeighted, VolumeWeighted };

std::string_view to_string(ClockKind kind);
// Accepts "clock", "dollar", "volume" (and "usd"/"$tw", "vtw").
ClockKind parse_clock_kind(std::string_view name);

// [start, end) of a calendar year (UTC) in unix seconds.
std::pair<std::int64_t, std::int64_t> year_bounds(int year);
// 8760, or 8784 in leap years.
double hours_in_year(int year);
// Calendar year (UTC) containing a unix second.
int year_of(std::int64_t unix_seconds);

struct ClockKnot {
  std::int64_t clock_unix = 0;
  double txn_hours = 0.0;
};

// Monotone piecewise-linear map from clock time to transaction time over one
// year. Knot clock times are strictly increasing; transaction times are
// non-decreasing (flat between trading sessions).
class ClockMap {
 public:
  ClockMap(int year, ClockKind kind, std::vector<ClockKnot> knots);

  int year() const { return year_; }
  ClockKind kind() const { return kind_; }
  std::int64_t start() const { return knots_.front().clock_unix; }
  std::int64_t end() const { return knots_.back().clock_unix; }
  double total_txn_hours() const { return knots_.back().txn_hours; }
  const std::vector<ClockKnot>& knots() const { return knots_; }

  bool contains(double unix_seconds) const {
    return unix_seconds >= static_cast<double>(start()) && unix_seconds <= static_cast<double>(end());
  }

  // Throws std::out_of_range outside [start, end].
  double to_txn_time(double unix_seconds) const;

  // Inverse map. Inside a flat span returns the earliest clock time that
  // attains `txn_hours`. Throws std::out_of_range outside [0, total].
  double to_clock_time(double txn_hours) const;

 private:
  int year_;
  ClockKind kind_;
  std::vector<ClockKnot> knots_;
};

// Weight accumulated in one clock minute.
struct MinuteWeight {
  std::int64_t minute_start = 0;
  double weight = 0.0;
};

// Builds a map over [start, end] normalized to `total_hours`, with each
// minute's share of transaction time proportional to its weight and linear
// within the minute. Weights must be sorted by minute and lie inside the span.
ClockMap build_clock_from_weights(int year, ClockKind kind, std::int64_t start,
                                  std::int64_t end, double total_hours,
                                  std::span<const MinuteWeight> weights);

// Builds the clock for `year` from every ticker's candles falling in that year.
// Dollar weight of a minute is the sum over tickers of representative price
// times volume; volume weight is the sum of volumes.
ClockMap build_clock(std::span<const CandleSeries> all_candles, int year, ClockKind kind);

// Transaction-time coordinate of a candle: the map evaluated at mid-minute.
double candle_txn_time(const ClockMap& clock, const Candle& c);

// CSV with header `clock_unix,txn_hours`, one row per knot.
void write_clock_csv(std::ostream& out, const ClockMap& clock);
ClockMap read_clock_csv(std::istream& in, int year, ClockKind kind);

}  // namespace hurstarb
