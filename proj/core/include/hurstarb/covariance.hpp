#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hurstarb/market_data.hpp"
#include "hurstarb/variogram.hpp"

namespace hurstarb {

inline constexpr std::size_t kDefaultMinObs = 50;

// Return covariances at resolution tau. `raw` keeps the estimates (NaN where a
// pair has fewer than the floor of overlapping returns); `C` has those entries
// imputed so it can be inverted.
struct CovMatrix {
  std::vector<std::string> tickers;
  double tau = 1.0;
  Eigen::MatrixXd C;
  Eigen::MatrixXd raw;
  Eigen::MatrixXi n_obs;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> missing;

  Eigen::Index size() const { return C.rows(); }
};

struct CorrMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd rho;      // clamped to [-1, 1], unit diagonal
  Eigen::MatrixXd rho_raw;  // before clamping
};

// Pairwise-complete covariance of binned series sharing one tau. Returns of
// two tickers are paired when they start in the same grid bin; each product of
// mean-subtracted returns is weighted by tau / sqrt(dt_A dt_B), and returns with
// dt > 3 tau are dropped. Pairs with fewer than `min_obs` products are missing
// and imputed with the mean observed off-diagonal correlation. Throws
// DataError if a ticker's own variance is missing or zero.
CovMatrix estimate_cov(std::span<const BinnedSeries> series, std::size_t min_obs = kDefaultMinObs);

// Same for synchronous returns, one column per ticker (NaN = missing), all
// with elapsed time tau.
CovMatrix estimate_cov(const Eigen::MatrixXd& returns, std::vector<std::string> tickers, double tau = 1.0,
                       std::size_t min_obs = kDefaultMinObs);

// rho = C_AB / sqrt(C_AA C_BB), clamped to [-1, 1]. Throws NumericalError on
// a non-positive diagonal.
CorrMatrix cov_to_corr(const CovMatrix& c);

// Correlation of every ticker pair (i < j) across a tau grid, normalized to 1
// at tau0. Pairs missing at any tau, or with zero correlation at tau0, are
// dropped from `normalized` and listed in `dropped`.
struct CorrCurves {
  std::vector<double> tau;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::vector<double>> raw;         // raw[pair][i]
  std::vector<std::vector<double>> normalized;  // normalized[pair][i]
  std::vector<std::pair<std::size_t, std::size_t>> dropped;
  std::vector<std::string> tickers;
};

// `points[k]` holds ticker k's observations in transaction time.
CorrCurves corr_vs_tau(std::span<const std::vector<TimedPrice>> points, std::vector<std::string> tickers,
                       std::span<const double> tau_grid, double tau0 = 1.0,
                       std::size_t min_obs = kDefaultMinObs);

// tau / V_tot(tau) on the variogram's grid, normalized to 1 at tau0.
std::vector<double> predicted_corr_ratio(const Variogram& v_tot, double tau0 = 1.0);

// Two stocks whose returns at one resolution are
//   r = sqrt(V) (s sqrt|rho| N_C + sqrt(1 - |rho|) N_1) + sqrt(U) N_2
// with a shared draw N_C; s = -1 on the second stock when rho < 0.
struct TwoComponentModel {
  std::function<double(double)> V;
  std::function<double(double)> U;
  double rho = 0.0;
};

struct PairedReturns {
  std::vector<double> a;
  std::vector<double> b;
};

PairedReturns simulate_two_component(const TwoComponentModel& m, double tau, std::size_t n,
                                     std::uint64_t seed);

// Path-level version used to test resolution dependence: each ticker's log
// price is `corr_scale` times a correlated random walk with latent correlation
// rho plus `uncorr_scale` times an independent long-memory path with exponent
// epsilon (unit-variance innovations).
struct TwoComponentPathConfig {
  std::size_t n_tickers = 2;
  std::size_t n_steps = 8760;
  double rho = 0.5;
  double corr_scale = 1.0;
  double uncorr_scale = 1.0;
  double epsilon = 0.05;
  double delta = 1.0 / 3600.0;
  std::uint64_t seed = 1;
};

// Log prices, rows = steps, cols = tickers, starting at 0.
Eigen::MatrixXd simulate_two_component_paths(const TwoComponentPathConfig& cfg);

// Header row of tickers, then one row per matrix row.
void write_cov_csv(std::ostream& out, const std::vector<std::string>& tickers, const Eigen::MatrixXd& m);
void write_nobs_csv(std::ostream& out, const CovMatrix& c);

}  // namespace hurstarb
