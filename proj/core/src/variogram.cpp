#include "hurstarb/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/stats.hpp"

namespace hurstarb {

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("tau grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("tau grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("tau grid must be strictly increasing");
  }
}

struct Accum {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double r, double dt, double tau) {
    sum += r * r * (tau / dt);
    ++n;
  }
};

void record(Variogram& v, double tau, const Accum& a) {
  if (a.n == 0) {
    v.omitted_tau.push_back(tau);
    return;
  }
  v.tau.push_back(tau);
  v.V.push_back(a.sum / static_cast<double>(a.n));
  v.n_samples.push_back(a.n);
}

bool accepted(double dt, double tau) { return dt > 0.0 && dt <= kMaxElapsedFactor * tau; }

}  // namespace

std::vector<double> log_tau_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1) throw std::invalid_argument("invalid tau grid bounds");
  const double decades = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::floor(decades * per_decade + 1e-9));
  std::vector<double> g;
  g.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  if (g.back() < hi * (1.0 - 1e-12)) g.push_back(hi);
  g.back() = std::min(g.back(), hi);
  return g;
}

std::vector<double> default_tau_grid() { return log_tau_grid(2.0 / 60.0, 200.0, 25); }

std::vector<double> integer_tau_grid(double lo, double hi, int per_decade, double step) {
  std::vector<double> out;
  for (double t : log_tau_grid(lo, hi, per_decade)) {
    const double r = std::max(1.0, std::round(t / step)) * step;
    if (out.empty() || r > out.back()) out.push_back(r);
  }
  return out;
}

Variogram variogram_diff_of_avg(std::span<const TimedPrice> points, std::span<const double> tau_grid) {
  check_grid(tau_grid);
  Variogram v;
  for (double tau : tau_grid) {
    Accum a;
    const auto binned = bin_points(points, tau);
    if (binned.bins.size() >= 2) {
      for (const auto& e : log_returns(binned).entries)
        if (accepted(e.dt, tau)) a.add(e.r, e.dt, tau);
    }
    record(v, tau, a);
  }
  return v;
}

Variogram variogram_diff_of_avg(const CandleSeries& s, const ClockMap& clock,
                                std::span<const double> tau_grid) {
  const auto pts = to_timed_prices(s, clock);
  return variogram_diff_of_avg(pts, tau_grid);
}

Variogram variogram_two_point(std::span<const TimedPrice> points, std::span<const double> tau_grid,
                              TwoPointMode mode) {
  check_grid(tau_grid);
  std::vector<double> t(points.size()), lp(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].time < points[i - 1].time)
      throw std::invalid_argument("variogram_two_point: observations must be sorted by time");
    if (!(points[i].price > 0.0)) throw DataError("non-positive price");
    t[i] = points[i].time;
    lp[i] = std::log(points[i].price);
  }
  Variogram v;
  for (double tau : tau_grid) {
    Accum a;
    const double eps = 1e-9 * tau;
    if (mode == TwoPointMode::FullResolution) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto it = std::lower_bound(t.begin() + static_cast<std::ptrdiff_t>(i), t.end(), t[i] + tau - eps);
        if (it == t.end()) break;
        const auto j = static_cast<std::size_t>(it - t.begin());
        const double dt = t[j] - t[i];
        if (accepted(dt, tau)) a.add(lp[j] - lp[i], dt, tau);
      }
    } else {
      // First observation of each grid cell.
      std::int64_t prev_cell = -1;
      std::size_t prev_idx = 0;
      bool have_prev = false;
      for (std::size_t i = 0; i < t.size(); ++i) {
        auto k = static_cast<std::int64_t>(std::floor(t[i] / tau));
        if (static_cast<double>(k + 1) * tau <= t[i]) ++k;
        if (static_cast<double>(k) * tau > t[i]) --k;
        if (have_prev && k == prev_cell) continue;
        if (have_prev && k == prev_cell + 1) {
          const double dt = t[i] - t[prev_idx];
          if (accepted(dt, tau)) a.add(lp[i] - lp[prev_idx], dt, tau);
        }
        prev_cell = k;
        prev_idx = i;
        have_prev = true;
      }
    }
    record(v, tau, a);
  }
  return v;
}

Variogram variogram_two_point(const CandleSeries& s, const ClockMap& clock,
                              std::span<const double> tau_grid, TwoPointMode mode) {
  const auto pts = to_timed_prices(s, clock);
  return variogram_two_point(pts, tau_grid, mode);
}

Variogram pool_variograms(std::span<const Variogram> parts) {
  if (parts.empty()) throw std::invalid_argument("pool_variograms: no inputs");
  // Union of reported and omitted grid points, in order.
  std::vector<double> grid;
  for (const auto& p : parts) {
    grid.insert(grid.end(), p.tau.begin(), p.tau.end());
    grid.insert(grid.end(), p.omitted_tau.begin(), p.omitted_tau.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  Variogram out;
  for (double tau : grid) {
    double sum = 0.0;
    std::size_t n = 0;
    bool complete = true;
    for (const auto& p : parts) {
      const auto it = std::find(p.tau.begin(), p.tau.end(), tau);
      if (it == p.tau.end()) {
        complete = false;
        break;
      }
      const auto i = static_cast<std::size_t>(it - p.tau.begin());
      sum += p.V[i] * static_cast<double>(p.n_samples[i]);
      n += p.n_samples[i];
    }
    if (!complete || n == 0) {
      out.omitted_tau.push_back(tau);
      continue;
    }
    out.tau.push_back(tau);
    out.V.push_back(sum / static_cast<double>(n));
    out.n_samples.push_back(n);
  }
  return out;
}

double interpolate_loglog(std::span<const double> tau, std::span<const double> values, double x) {
  if (tau.size() != values.size() || tau.empty()) throw std::invalid_argument("interpolate_loglog: bad inputs");
  const double tol = 1e-12 * x;
  if (x < tau.front() - tol || x > tau.back() + tol)
    throw std::out_of_range("interpolation point " + csv::format(x) + " outside grid span");
  auto it = std::lower_bound(tau.begin(), tau.end(), x - tol);
  auto i = static_cast<std::size_t>(it - tau.begin());
  if (i < tau.size() && std::abs(tau[i] - x) <= tol) return values[i];
  const std::size_t lo = i - 1, hi = i;
  const double a = values[lo], b = values[hi];
  const double w = (std::log(x) - std::log(tau[lo])) / (std::log(tau[hi]) - std::log(tau[lo]));
  if (a > 0.0 && b > 0.0) return std::exp(std::log(a) + w * (std::log(b) - std::log(a)));
  return a + w * (b - a);
}

Variogram normalize_at(const Variogram& v, double tau0) {
  if (v.tau.empty()) throw std::invalid_argument("normalize_at: empty variogram");
  const double ref = interpolate_loglog(v.tau, v.V, tau0);
  if (!(ref != 0.0) || !std::isfinite(ref)) throw NumericalError("normalize_at: V(tau0) is zero");
  Variogram out = v;
  for (double& x : out.V) x /= ref;
  return out;
}

PowerLawFit fit_power_law(const Variogram& v, double tau_min, double tau_max) {
  if (!(tau_min > 0.0) || !(tau_max > tau_min)) throw std::invalid_argument("fit_power_law: degenerate range");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < v.tau.size(); ++i) {
    if (v.tau[i] < tau_min * (1 - 1e-12) || v.tau[i] > tau_max * (1 + 1e-12) || !(v.V[i] > 0.0)) continue;
    x.push_back(std::log(v.tau[i]));
    y.push_back(std::log(v.V[i]));
  }
  if (x.size() < 3) throw std::invalid_argument("fit_power_law: fewer than 3 grid points in range");
  const auto line = stats::fit_line(x, y);
  PowerLawFit f;
  f.exponent = line.slope;
  f.amplitude = std::exp(line.intercept);
  f.tau_min = std::exp(x.front());
  f.tau_max = std::exp(x.back());
  f.residual = line.rms_residual;
  f.n_points = x.size();
  return f;
}

PercentileCurves ensemble_percentiles(std::span<const double> tau,
                                      const std::vector<std::vector<double>>& curves,
                                      std::span<const double> percentiles) {
  if (curves.empty()) throw std::invalid_argument("ensemble_percentiles: no curves");
  for (const auto& c : curves)
    if (c.size() != tau.size()) throw std::invalid_argument("ensemble_percentiles: mismatched grids");
  PercentileCurves pc;
  pc.tau.assign(tau.begin(), tau.end());
  pc.percentiles.assign(percentiles.begin(), percentiles.end());
  pc.values.assign(percentiles.size(), std::vector<double>(tau.size()));
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    for (std::size_t c = 0; c < curves.size(); ++c) column[c] = curves[c][i];
    for (std::size_t p = 0; p < percentiles.size(); ++p) pc.values[p][i] = stats::percentile(column, percentiles[p]);
  }
  return pc;
}

PercentileCurves ensemble_percentiles(std::span<const Variogram> vs, std::span<const double> percentiles) {
  if (vs.empty()) throw std::invalid_argument("ensemble_percentiles: no variograms");
  std::vector<std::vector<double>> curves;
  for (const auto& v : vs) {
    if (v.tau != vs.front().tau) throw std::invalid_argument("ensemble_percentiles: mismatched grids");
    curves.push_back(v.V);
  }
  return ensemble_percentiles(vs.front().tau, curves, percentiles);
}

void write_variogram_csv(std::ostream& out, const Variogram& v) {
  out << "tau_hours,V,n_samples\n";
  for (std::size_t i = 0; i < v.tau.size(); ++i)
    out << csv::format(v.tau[i]) << ',' << csv::format(v.V[i]) << ',' << v.n_samples[i] << '\n';
}

void write_percentiles_csv(std::ostream& out, const PercentileCurves& pc) {
  out << "tau_hours";
  for (double p : pc.percentiles) out << ",p" << csv::format(p);
  out << '\n';
  for (std::size_t i = 0; i < pc.tau.size(); ++i) {
    out << csv::format(pc.tau[i]);
    for (const auto& col : pc.values) out << ',' << csv::format(col[i]);
    out << '\n';
  }
}

AveragingRatioAccumulator::AveragingRatioAccumulator(std::size_t points_per_bin) : m_(points_per_bin) {
  if (m_ < 2) throw std::invalid_argument("AveragingRatioAccumulator needs at least 2 points per bin");
}

void AveragingRatioAccumulator::push(std::span<const double> values) {
  const std::size_t mid_offset = m_ / 2 - 1;  // p_{M/2} in 1-based indexing
  for (double x : values) {
    sum_ += x;
    if (fill_ == mid_offset) mid_ = x;
    if (++fill_ < m_) continue;
    const double avg = sum_ / static_cast<double>(m_);
    if (have_prev_) {
      const double da = avg - prev_avg_, dp = mid_ - prev_mid_;
      avg_sq_.push_back(da * da);
      pt_sq_.push_back(dp * dp);
      ++n_returns_;
    }
    prev_avg_ = avg;
    prev_mid_ = mid_;
    have_prev_ = true;
    sum_ = 0.0;
    fill_ = 0;
  }
}

double AveragingRatioAccumulator::diff_of_avg_variance() const {
  if (avg_sq_.empty()) throw NumericalError("no complete bin pairs accumulated");
  return stats::mean(avg_sq_);
}

double AveragingRatioAccumulator::two_point_variance() const {
  if (pt_sq_.empty()) throw NumericalError("no complete bin pairs accumulated");
  return stats::mean(pt_sq_);
}

}  // namespace hurstarb
