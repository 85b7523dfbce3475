#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hurstarb/market_data.hpp"

namespace hurstarb::testing {

CandleSeries constant_candles(std::string ticker, std::int64_t start, std::size_t n_minutes, double price,
                              double volume) {
  CandleSeries s{std::move(ticker), {}};
  for (std::size_t i = 0; i < n_minutes; ++i)
    s.candles.push_back({start + static_cast<std::int64_t>(60 * i), price, price, price, price, volume});
  return s;
}

CandleSeries walk_candles(std::string ticker, std::int64_t start, std::size_t n_minutes, double sigma_per_second,
                          std::uint64_t seed, double trade_prob, const std::vector<double>* common) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma_per_second);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_real_distribution<double> vol(50.0, 150.0);
  CandleSeries s{std::move(ticker), {}};
  double x = 0.0;
  for (std::size_t m = 0; m < n_minutes; ++m) {
    double o = 0, h = -1e300, l = 1e300, c = 0;
    for (int k = 0; k < 60; ++k) {
      x += normal(rng);
      const std::size_t sec = m * 60 + static_cast<std::size_t>(k);
      const double lp = x + (common ? (*common)[sec] : 0.0);
      const double p = 100.0 * std::exp(lp);
      if (k == 0) o = p;
      h = std::max(h, p);
      l = std::min(l, p);
      c = p;
    }
    const double v = std::round(vol(rng));
    if (unif(rng) < trade_prob) s.candles.push_back({start + static_cast<std::int64_t>(60 * m), o, h, l, c, v});
  }
  return s;
}

std::vector<CandleSeries> factor_corpus(std::size_t n_tickers, std::int64_t start, std::size_t n_minutes,
                                        double rho, double sigma_per_second, std::uint64_t seed,
                                        double trade_prob) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma_per_second * std::sqrt(rho));
  std::vector<double> common(n_minutes * 60);
  double x = 0.0;
  for (double& v : common) v = (x += normal(rng));
  std::vector<CandleSeries> out;
  for (std::size_t k = 0; k < n_tickers; ++k) {
    std::string name = "S" + std::string(k < 10 ? "0" : "") + std::to_string(k);
    out.push_back(walk_candles(name, start, n_minutes, sigma_per_second * std::sqrt(1.0 - rho),
                               seed * 1000 + k + 1, trade_prob, &common));
  }
  return out;
}

ClockMap identity_clock(int year) {
  const auto [b, e] = year_bounds(year);
  return ClockMap(year, ClockKind::Clock, {{b, 0.0}, {e, hours_in_year(year)}});
}

std::vector<CandleSeries> candles_from_log_paths(const Eigen::MatrixXd& lp, std::int64_t start, double scale) {
  std::vector<CandleSeries> out;
  for (Eigen::Index k = 0; k < lp.cols(); ++k) {
    CandleSeries s{"P" + std::string(k < 10 ? "0" : "") + std::to_string(k), {}};
    for (Eigen::Index m = 0; m < lp.rows(); ++m) {
      const double p = 100.0 * std::exp(scale * lp(m, k));
      s.candles.push_back({start + 60 * static_cast<std::int64_t>(m), p, p, p, p, 100.0});
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<CandleSeries>& series) {
  std::filesystem::create_directories(dir);
  for (const auto& s : series) {
    std::ofstream out(dir / (s.ticker + ".csv"));
    write_candles(out, s);
  }
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("hurstarb_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace hurstarb::testing
