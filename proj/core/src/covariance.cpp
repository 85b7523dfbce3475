#include "hurstarb/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/hurst_process.hpp"

namespace hurstarb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct KeyedReturn {
  std::int64_t bin;
  double x;   // mean-subtracted return
  double dt;
};

// Fills the imputed matrix from `raw` and `n_obs`.
void finish(CovMatrix& c, std::size_t min_obs) {
  const Eigen::Index n = c.raw.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(c.raw(i, i) > 0.0) || !std::isfinite(c.raw(i, i)))
      throw DataError("ticker " + c.tickers[static_cast<std::size_t>(i)] +
                      " has no usable return variance at tau " + csv::format(c.tau));
  }
  c.missing.setConstant(n, n, false);
  double rho_sum = 0.0;
  std::size_t rho_n = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (static_cast<std::size_t>(c.n_obs(i, j)) < min_obs || !std::isfinite(c.raw(i, j))) {
        c.missing(i, j) = c.missing(j, i) = true;
        c.raw(i, j) = c.raw(j, i) = kNaN;
        continue;
      }
      const double r = c.raw(i, j) / std::sqrt(c.raw(i, i) * c.raw(j, j));
      rho_sum += std::clamp(r, -1.0, 1.0);
      ++rho_n;
    }
  const double fill = rho_n > 0 ? rho_sum / static_cast<double>(rho_n) : 0.0;
  c.C = c.raw;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (c.missing(i, j)) c.C(i, j) = fill * std::sqrt(c.raw(i, i) * c.raw(j, j));
}

}  // namespace

CovMatrix estimate_cov(std::span<const BinnedSeries> series, std::size_t min_obs) {
  if (series.empty()) throw std::invalid_argument("estimate_cov: no series");
  const double tau = series.front().tau;
  for (const auto& s : series)
    if (s.tau != tau) throw std::invalid_argument("estimate_cov: series have different tau");

  const std::size_t n = series.size();
  std::vector<std::vector<KeyedReturn>> rets(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (series[k].bins.size() < 2) continue;
    std::vector<KeyedReturn> v;
    double sum = 0.0;
    for (const auto& e : log_returns(series[k]).entries) {
      if (!(e.dt > 0.0) || e.dt > kMaxElapsedFactor * tau) continue;
      v.push_back({e.start_bin, e.r, e.dt});
      sum += e.r;
    }
    if (!v.empty()) {
      const double mu = sum / static_cast<double>(v.size());
      for (auto& x : v) x.x -= mu;
    }
    rets[k] = std::move(v);
  }

  CovMatrix c;
  c.tau = tau;
  for (const auto& s : series) c.tickers.push_back(s.ticker);
  const auto N = static_cast<Eigen::Index>(n);
  c.raw.setConstant(N, N, kNaN);
  c.n_obs.setZero(N, N);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const auto& A = rets[a];
      const auto& B = rets[b];
      double sum = 0.0;
      int cnt = 0;
      std::size_t i = 0, j = 0;
      while (i < A.size() && j < B.size()) {
        if (A[i].bin < B[j].bin) {
          ++i;
        } else if (B[j].bin < A[i].bin) {
          ++j;
        } else {
          sum += A[i].x * B[j].x * tau / std::sqrt(A[i].dt * B[j].dt);
          ++cnt;
          ++i;
          ++j;
        }
      }
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      c.n_obs(ia, ib) = c.n_obs(ib, ia) = cnt;
      const bool ok = a == b ? cnt >= 2 : cnt > 0;
      if (ok) c.raw(ia, ib) = c.raw(ib, ia) = sum / cnt;
    }
  }
  finish(c, min_obs);
  return c;
}

CovMatrix estimate_cov(const Eigen::MatrixXd& returns, std::vector<std::string> tickers, double tau,
                       std::size_t min_obs) {
  const Eigen::Index n = returns.cols();
  if (n == 0) throw std::invalid_argument("estimate_cov: no tickers");
  if (static_cast<std::size_t>(n) != tickers.size())
    throw std::invalid_argument("estimate_cov: ticker count does not match returns");
  if (!(tau > 0.0)) throw std::invalid_argument("estimate_cov: tau must be positive");

  const Eigen::MatrixXd mask = returns.unaryExpr([](double x) { return std::isfinite(x) ? 1.0 : 0.0; });
  Eigen::MatrixXd x = returns.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });
  for (Eigen::Index k = 0; k < n; ++k) {
    const double cnt = mask.col(k).sum();
    if (cnt > 0) x.col(k).array() -= x.col(k).sum() / cnt;
    x.col(k).array() *= mask.col(k).array();
  }
  const Eigen::MatrixXd sums = x.transpose() * x;
  const Eigen::MatrixXd counts = mask.transpose() * mask;

  CovMatrix c;
  c.tickers = std::move(tickers);
  c.tau = tau;
  c.raw.setConstant(n, n, kNaN);
  c.n_obs = counts.unaryExpr([](double v) { return static_cast<int>(std::lround(v)); });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const int cnt = c.n_obs(i, j);
      if (cnt >= (i == j ? 2 : 1)) c.raw(i, j) = sums(i, j) / cnt;
    }
  finish(c, min_obs);
  return c;
}

CorrMatrix cov_to_corr(const CovMatrix& c) {
  const Eigen::Index n = c.C.rows();
  CorrMatrix out;
  out.tickers = c.tickers;
  out.rho.resize(n, n);
  out.rho_raw.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(c.C(i, i) > 0.0)) throw NumericalError("cov_to_corr: non-positive variance for " + c.tickers[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        out.rho(i, j) = out.rho_raw(i, j) = 1.0;
        continue;
      }
      const double r = c.C(i, j) / std::sqrt(c.C(i, i) * c.C(j, j));
      out.rho_raw(i, j) = r;
      out.rho(i, j) = std::clamp(r, -1.0, 1.0);
    }
  return out;
}

CorrCurves corr_vs_tau(std::span<const std::vector<TimedPrice>> points, std::vector<std::string> tickers,
                       std::span<const double> tau_grid, double tau0, std::size_t min_obs) {
  if (points.size() != tickers.size()) throw std::invalid_argument("corr_vs_tau: ticker count mismatch");
  if (points.size() < 2) throw std::invalid_argument("corr_vs_tau: need at least two tickers");
  if (tau_grid.empty()) throw std::invalid_argument("corr_vs_tau: empty tau grid");
  const std::size_t n = points.size();
  CorrCurves out;
  out.tau.assign(tau_grid.begin(), tau_grid.end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.pairs.emplace_back(i, j);
  out.raw.assign(out.pairs.size(), std::vector<double>(tau_grid.size(), kNaN));

  for (std::size_t t = 0; t < tau_grid.size(); ++t) {
    std::vector<BinnedSeries> binned;
    binned.reserve(n);
    for (std::size_t k = 0; k < n; ++k) binned.push_back(bin_points(points[k], tau_grid[t], tickers[k]));
    const CovMatrix c = estimate_cov(binned, min_obs);
    const CorrMatrix r = cov_to_corr(c);
    for (std::size_t p = 0; p < out.pairs.size(); ++p) {
      const auto [i, j] = out.pairs[p];
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (!c.missing(ii, jj)) out.raw[p][t] = r.rho(ii, jj);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> kept;
  std::vector<std::vector<double>> kept_raw;
  for (std::size_t p = 0; p < out.pairs.size(); ++p) {
    const auto& curve = out.raw[p];
    bool complete = std::all_of(curve.begin(), curve.end(), [](double v) { return std::isfinite(v); });
    double ref = 0.0;
    if (complete) {
      ref = interpolate_loglog(out.tau, curve, tau0);
      complete = ref != 0.0 && std::isfinite(ref);
    }
    if (!complete) {
      out.dropped.push_back(out.pairs[p]);
      continue;
    }
    std::vector<double> norm(curve.size());
    for (std::size_t t = 0; t < curve.size(); ++t) norm[t] = curve[t] / ref;
    out.normalized.push_back(std::move(norm));
    kept.push_back(out.pairs[p]);
    kept_raw.push_back(curve);
  }
  out.pairs = std::move(kept);
  out.raw = std::move(kept_raw);
  out.tickers = std::move(tickers);
  return out;
}

std::vector<double> predicted_corr_ratio(const Variogram& v_tot, double tau0) {
  if (v_tot.tau.empty()) throw std::invalid_argument("predicted_corr_ratio: empty variogram");
  std::vector<double> ratio(v_tot.tau.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (!(v_tot.V[i] > 0.0)) throw NumericalError("predicted_corr_ratio: non-positive variogram value");
    ratio[i] = v_tot.tau[i] / v_tot.V[i];
  }
  const double ref = interpolate_loglog(v_tot.tau, ratio, tau0);
  for (double& r : ratio) r /= ref;
  return ratio;
}

PairedReturns simulate_two_component(const TwoComponentModel& m, double tau, std::size_t n, std::uint64_t seed) {
  if (!m.V || !m.U) throw std::invalid_argument("simulate_two_component: V and U are required");
  if (!(m.rho >= -1.0 && m.rho <= 1.0)) throw std::invalid_argument("simulate_two_component: rho outside [-1, 1]");
  const double v = m.V(tau), u = m.U(tau);
  if (!(v >= 0.0) || !(u >= 0.0)) throw std::invalid_argument("simulate_two_component: V and U must be non-negative");
  const double sv = std::sqrt(v), su = std::sqrt(u);
  const double load = std::sqrt(std::abs(m.rho)), idio = std::sqrt(1.0 - std::abs(m.rho));
  const double sign_b = m.rho < 0.0 ? -1.0 : 1.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PairedReturns out;
  out.a.resize(n);
  out.b.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double nc = normal(rng), na1 = normal(rng), na2 = normal(rng), nb1 = normal(rng), nb2 = normal(rng);
    out.a[t] = sv * (load * nc + idio * na1) + su * na2;
    out.b[t] = sv * (sign_b * load * nc + idio * nb1) + su * nb2;
  }
  return out;
}

Eigen::MatrixXd simulate_two_component_paths(const TwoComponentPathConfig& cfg) {
  if (cfg.n_tickers < 1 || cfg.n_steps < 2) throw std::invalid_argument("two-component paths: empty panel");
  if (!(cfg.rho >= -1.0 && cfg.rho <= 1.0)) throw std::invalid_argument("two-component paths: rho outside [-1, 1]");
  if (cfg.rho < 0.0 && cfg.n_tickers > 2)
    throw std::invalid_argument("two-component paths: negative rho needs exactly two tickers");
  if (!(cfg.corr_scale >= 0.0) || !(cfg.uncorr_scale >= 0.0))
    throw std::invalid_argument("two-component paths: scales must be non-negative");
  const auto T = static_cast<Eigen::Index>(cfg.n_steps);
  const auto n = static_cast<Eigen::Index>(cfg.n_tickers);
  const double load = std::sqrt(std::abs(cfg.rho)), idio = std::sqrt(1.0 - std::abs(cfg.rho));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd common(T);
  common(0) = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) common(t) = common(t - 1) + normal(rng);

  Eigen::MatrixXd out(T, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double sign = (cfg.rho < 0.0 && k == 1) ? -1.0 : 1.0;
    double w = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      if (t > 0) w += normal(rng);
      out(t, k) = cfg.corr_scale * (sign * load * common(t) + idio * w);
    }
  }
  if (cfg.uncorr_scale > 0.0) {
    std::uniform_int_distribution<std::uint64_t> seeds;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto f = fbm_path(cfg.epsilon, cfg.delta, cfg.n_steps, seeds(rng));
      for (Eigen::Index t = 0; t < T; ++t) out(t, k) += cfg.uncorr_scale * f[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

void write_cov_csv(std::ostream& out, const std::vector<std::string>& tickers, const Eigen::MatrixXd& m) {
  csv::write_matrix(out, tickers, m);
}

void write_nobs_csv(std::ostream& out, const CovMatrix& c) {
  csv::write_matrix(out, c.tickers, c.n_obs.cast<double>());
}

}  // namespace hurstarb
