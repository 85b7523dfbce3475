#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hurstarb/candle.hpp"
#include "hurstarb/market_data.hpp"
#include "hurstarb/transaction_clock.hpp"

namespace hurstarb {

// Estimates of V(tau) = E[r(tau)^2] (log-return squared) on a tau grid in
// transaction hours. Grid points without enough data are listed in
// `omitted_tau` instead.
struct Variogram {
  std::vector<double> tau;
  std::vector<double> V;
  std::vector<std::size_t> n_samples;
  std::vector<double> omitted_tau;

  std::size_t size() const { return tau.size(); }
};

// V(tau) ~ amplitude * tau^exponent over [tau_min, tau_max].
struct PowerLawFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  double residual = 0.0;  // rms of log-log residuals
  std::size_t n_points = 0;

  double epsilon() const { return (1.0 - exponent) / 2.0; }
  double hurst() const { return exponent / 2.0; }
};

enum class TwoPointMode { GridPoints, FullResolution };

// Returns whose elapsed time exceeds this multiple of tau are discarded.
inline constexpr double kMaxElapsedFactor = 3.0;

// `per_decade` logarithmically spaced values from lo to hi inclusive.
std::vector<double> log_tau_grid(double lo, double hi, int per_decade);
// 2 minutes to 200 hours, 25 points per decade.
std::vector<double> default_tau_grid();
// log_tau_grid rounded to whole multiples of `step` and de-duplicated; for
// regularly sampled series.
std::vector<double> integer_tau_grid(double lo, double hi, int per_decade, double step = 1.0);

// Difference-of-average estimator. At each tau the observations are binned,
// log returns between consecutive non-empty bins with elapsed time dt <= 3 tau
// are kept, and V(tau) is the mean of r^2 * tau / dt.
Variogram variogram_diff_of_avg(std::span<const TimedPrice> points, std::span<const double> tau_grid);
Variogram variogram_diff_of_avg(const CandleSeries& s, const ClockMap& clock,
                                std::span<const double> tau_grid);

// Two-point estimator on point prices. GridPoints takes the first observation
// in each cell [k tau, (k+1) tau) and differences adjacent cells;
// FullResolution pairs every observation with the first one at least tau
// later. Both use the same r^2 * tau / dt reweighting and 3 tau cutoff.
Variogram variogram_two_point(std::span<const TimedPrice> points, std::span<const double> tau_grid,
                              TwoPointMode mode);
Variogram variogram_two_point(const CandleSeries& s, const ClockMap& clock,
                              std::span<const double> tau_grid, TwoPointMode mode);

// Sample-count weighted combination of estimates on a common grid (e.g. the
// years of a simulated panel). Grid points omitted by any input are omitted.
Variogram pool_variograms(std::span<const Variogram> parts);

// Value at x by linear interpolation in (log tau, log V); falls back to
// linear-in-log-tau when a bracketing value is not positive. Throws
// std::out_of_range when x is outside the grid.
double interpolate_loglog(std::span<const double> tau, std::span<const double> values, double x);

// Divides V by its interpolated value at tau0. Throws NumericalError if that
// value is zero.
Variogram normalize_at(const Variogram& v, double tau0 = 1.0);

// Least-squares line in (log tau, log V) over grid points in [tau_min, tau_max]
// with V > 0. Needs at least 3 points.
PowerLawFit fit_power_law(const Variogram& v, double tau_min, double tau_max);

inline constexpr double kDefaultPercentiles[] = {10.0, 25.0, 50.0, 75.0, 90.0};

struct PercentileCurves {
  std::vector<double> tau;
  std::vector<double> percentiles;
  std::vector<std::vector<double>> values;  // values[p][i]
};

// Per-tau order statistics (linear interpolation) across curves sampled on a
// common grid.
PercentileCurves ensemble_percentiles(std::span<const double> tau,
                                      const std::vector<std::vector<double>>& curves,
                                      std::span<const double> percentiles = kDefaultPercentiles);
PercentileCurves ensemble_percentiles(std::span<const Variogram> vs,
                                      std::span<const double> percentiles = kDefaultPercentiles);

// `tau_hours,V,n_samples`
void write_variogram_csv(std::ostream& out, const Variogram& v);
// `tau_hours,p10,p25,p50,p75,p90` (column names follow `percentiles`)
void write_percentiles_csv(std::ostream& out, const PercentileCurves& pc);

// Streams a regularly sampled path in bins of M points and accumulates, for
// adjacent bins, the squared difference of bin averages and the squared
// difference of the bins' midpoint values (p_{M/2} and p_{3M/2}).
class AveragingRatioAccumulator {
 public:
  explicit AveragingRatioAccumulator(std::size_t points_per_bin);

  void push(std::span<const double> values);

  std::size_t n_returns() const { return n_returns_; }
  double diff_of_avg_variance() const;
  double two_point_variance() const;
  // diff_of_avg_variance / two_point_variance; 2/3 for a random walk.
  double ratio() const { return diff_of_avg_variance() / two_point_variance(); }
  // Per-return squared differences, for error estimates.
  const std::vector<double>& avg_squares() const { return avg_sq_; }
  const std::vector<double>& point_squares() const { return pt_sq_; }

 private:
  std::size_t m_;
  std::size_t fill_ = 0;
  double sum_ = 0.0;
  double mid_ = 0.0;
  bool have_prev_ = false;
  double prev_avg_ = 0.0;
  double prev_mid_ = 0.0;
  std::size_t n_returns_ = 0;
  std::vector<double> avg_sq_;
  std::vector<double> pt_sq_;
};

}  // namespace hurstarb
