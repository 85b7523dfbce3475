#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hurstarb/candle.hpp"
#include "hurstarb/transaction_clock.hpp"

namespace hurstarb::testing {

CandleSeries constant_candles(std::string ticker, std::int64_t start, std::size_t n_minutes, double price,
                              double volume = 1.0);

// One-second Gaussian log-price walk aggregated into minute candles. Minutes
// are skipped with probability 1 - trade_prob. `common` (optional, one value
// per second) is added to the ticker's own walk.
CandleSeries walk_candles(std::string ticker, std::int64_t start, std::size_t n_minutes, double sigma_per_second,
                          std::uint64_t seed, double trade_prob = 1.0, const std::vector<double>* common = nullptr);

// Tickers sharing a common factor: each log price is
// sqrt(rho) W_common + sqrt(1 - rho) W_own at one-second resolution.
std::vector<CandleSeries> factor_corpus(std::size_t n_tickers, std::int64_t start, std::size_t n_minutes,
                                        double rho, double sigma_per_second, std::uint64_t seed,
                                        double trade_prob = 1.0);

ClockMap identity_clock(int year);

// Minute candles whose OHLC all equal exp(scale * lp(m, k)); rows are minutes.
std::vector<CandleSeries> candles_from_log_paths(const Eigen::MatrixXd& lp, std::int64_t start, double scale);

// One `<ticker>.csv` per series.
void write_corpus(const std::filesystem::path& dir, const std::vector<CandleSeries>& series);

std::string slurp(const std::filesystem::path& p);

// Fresh empty directory under the system temp dir.
std::filesystem::path fresh_dir(const std::string& name);

}  // namespace hurstarb::testing
