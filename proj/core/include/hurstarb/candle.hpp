#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hurstarb {

// One-minute OHLCV bar. `timestamp` is the unix second at the start of the minute.
struct Candle {
  std::int64_t timestamp = 0;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;
};

// Candles of one ticker, strictly increasing timestamps. Minutes without a
// trade are absent.
struct CandleSeries {
  std::string ticker;
  std::vector<Candle> candles;
};

// Mean of open, high, low and close.
constexpr double representative_price(const Candle& c) {
  return (c.open + c.high + c.low + c.close) / 4.0;
}

}  // namespace hurstarb
