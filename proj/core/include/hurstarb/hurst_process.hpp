#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hurstarb {

// Power-law shot-noise parameters. Times are in transaction hours.
struct HurstParams {
  double epsilon = 0.0;        // H = 1/2 - epsilon, in (-1/2, 1/2)
  double delta = 1.0 / 3600.0;  // impulse rise time
  double lambda = 50.0;        // Poisson event rate per hour
  double sigma = 1.0;          // amplitude scale

  double hurst() const { return 0.5 - epsilon; }
  // Throws std::invalid_argument when out of range.
  void validate() const;
};

enum class SimMethod { FftGaussian, ShotNoise };

std::string_view to_string(SimMethod m);
// "fft" / "fft_gaussian", "shot" / "shot_noise".
SimMethod parse_sim_method(std::string_view name);

struct SimConfig {
  int n_years = 1;
  int hours_per_year = 8760;
  double target_vol = 0.15;
  std::uint64_t seed = 1;
  SimMethod method = SimMethod::FftGaussian;

  void validate() const;
};

// Simulated hourly prices, one row per year. Every row starts and ends at 1.
struct PricePanel {
  Eigen::MatrixXd prices;  // rows = years, cols = hours
  HurstParams params;
  SimConfig config;

  int n_years() const { return static_cast<int>(prices.rows()); }
  int hours_per_year() const { return static_cast<int>(prices.cols()); }
};

// f(t) = (t/delta)^(-epsilon) for t >= delta, else 0. A unit step at
// epsilon = 0.
double impulse_response(double epsilon, double delta, double t);

// Kernel for unit-spaced innovations that are spread uniformly over their
// step: k[m] = integral of f over [m-1, m], k[0] = 0.
std::vector<double> integrated_kernel(double epsilon, double delta, std::size_t length);

// Raw (unscaled, undetrended) Gaussian long-memory path of n hourly samples:
// i.i.d. normals convolved with integrated_kernel.
std::vector<double> fbm_path(double epsilon, double delta, std::size_t n, std::uint64_t seed);

// Raw shot-noise path sampled at integer hours 0..n-1: events with
// Exponential(lambda) gaps, Normal(0, sigma) amplitudes, and response f.
std::vector<double> shot_noise_path(const HurstParams& p, std::size_t n, std::uint64_t seed);

// Splits a raw log path into years, detrends each year to start and end at
// exactly 0, rescales to population standard deviation `target_vol`
// (skipped for an all-zero path) and exponentiates.
Eigen::MatrixXd postprocess_log_path(const std::vector<double>& path, int n_years, int hours_per_year,
                                     double target_vol);

PricePanel simulate_fbm(const HurstParams& p, const SimConfig& c);
PricePanel simulate_shot_noise(const HurstParams& p, const SimConfig& c);
// Dispatches on c.method.
PricePanel simulate(const HurstParams& p, const SimConfig& c);

// tau^(1 - 2 epsilon), unit constant.
double analytic_variogram(double epsilon, double tau);
// -2 epsilon (1 - 2 epsilon) tau^(-1 - 2 epsilon), tau >= 1.
double analytic_autocorr(double epsilon, double tau);
// Exact lag-k autocorrelation of unit-step fractional Gaussian noise,
// (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2.
double fgn_autocorr(double epsilon, double k);
// sqrt(2N) epsilon log(tau)
double snr_variogram(double epsilon, double n, double tau);
// 2 sqrt(N) epsilon tau^(-1 - 2 epsilon)
double snr_autocorr(double epsilon, double n, double tau);

// `year,hour,price` with 0-based year and hour.
void write_panel_csv(std::ostream& out, const PricePanel& panel);
// Reads the CSV above; years must be complete and of equal length.
Eigen::MatrixXd read_panel_csv(std::istream& in);

}  // namespace hurstarb
