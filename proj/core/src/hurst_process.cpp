#include "hurstarb/hurst_process.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/fft.hpp"

namespace hurstarb {

void HurstParams::validate() const {
  if (!(epsilon > -0.5 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (-0.5, 0.5)");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

void SimConfig::validate() const {
  if (n_years < 1) throw std::invalid_argument("n_years must be at least 1");
  if (hours_per_year < 4) throw std::invalid_argument("hours_per_year must be at least 4");
  if (!(target_vol > 0.0)) throw std::invalid_argument("target_vol must be positive");
}

std::string_view to_string(SimMethod m) {
  return m == SimMethod::FftGaussian ? "fft_gaussian" : "shot_noise";
}

SimMethod parse_sim_method(std::string_view name) {
  if (name == "fft" || name == "fft_gaussian") return SimMethod::FftGaussian;
  if (name == "shot" || name == "shot_noise") return SimMethod::ShotNoise;
  throw std::invalid_argument("unknown simulation method '" + std::string(name) + "'");
}

double impulse_response(double epsilon, double delta, double t) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (t < delta) return 0.0;
  return std::pow(t / delta, -epsilon);
}

namespace {

// a^q - b^q for 0 <= b <= a, without cancellation when b is close to a.
double power_diff(double a, double b, double q) {
  if (b <= 0.0) return std::pow(a, q);
  return -std::pow(a, q) * std::expm1(q * std::log1p(-(a - b) / a));
}

}  // namespace

std::vector<double> integrated_kernel(double epsilon, double delta, std::size_t length) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  std::vector<double> k(length, 0.0);
  const double q = 1.0 - epsilon;
  const double scale = std::pow(delta, epsilon) / q;
  for (std::size_t m = 1; m < length; ++m) {
    const double hi = static_cast<double>(m);
    const double lo = std::max(hi - 1.0, delta);
    if (hi <= delta) continue;
    k[m] = scale * power_diff(hi, lo, q);
  }
  return k;
}

std::vector<double> fbm_path(double epsilon, double delta, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n);
  for (double& x : z) x = normal(rng);
  const auto k = integrated_kernel(epsilon, delta, n);
  return fft::convolve(z, k, n);
}

std::vector<double> shot_noise_path(const HurstParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;

  // Lags below m0 are summed directly; farther lags use
  // (m - u)^(-eps) = m^(-eps) sum_k c_k (u/m)^k with c_k = (eps)_k / k!.
  const std::size_t m0 = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(p.delta)) + 1);
  std::vector<double> coef{1.0};
  for (;;) {
    const double k = static_cast<double>(coef.size());
    const double next = coef.back() * (p.epsilon + k - 1.0) / k;
    if (next == 0.0 || std::abs(next) * std::pow(static_cast<double>(m0), -k) < 1e-12) break;
    coef.push_back(next);
  }
  std::vector<std::vector<double>> moments(coef.size(), std::vector<double>(n, 0.0));

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(p.lambda);
  std::normal_distribution<double> amp(0.0, p.sigma);
  const double last = static_cast<double>(n - 1);
  for (double t = gap(rng); t <= last; t += gap(rng)) {
    const double a = amp(rng);
    const auto j = static_cast<std::size_t>(t);
    const double u = t - static_cast<double>(j);
    for (std::size_t m = 0; m < m0 && j + m < n; ++m) {
      const double s = static_cast<double>(m) - u;
      if (s >= p.delta) out[j + m] += a * std::pow(s / p.delta, -p.epsilon);
    }
    double uk = 1.0;
    for (auto& w : moments) {
      w[j] += a * uk;
      uk *= u;
    }
  }

  if (n > m0) {
    const double scale = std::pow(p.delta, p.epsilon);
    std::vector<double> g(n, 0.0);
    for (std::size_t k = 0; k < coef.size(); ++k) {
      const double e = -p.epsilon - static_cast<double>(k);
      for (std::size_t m = m0; m < n; ++m) g[m] = std::pow(static_cast<double>(m), e);
      fft::convolve_add(moments[k], g, scale * coef[k], out);
    }
  }
  return out;
}

Eigen::MatrixXd postprocess_log_path(const std::vector<double>& path, int n_years, int hours_per_year,
                                     double target_vol) {
  const auto H = static_cast<std::size_t>(hours_per_year);
  if (n_years < 1 || hours_per_year < 2 || path.size() != static_cast<std::size_t>(n_years) * H)
    throw std::invalid_argument("path length does not match n_years * hours_per_year");
  Eigen::MatrixXd lp(n_years, hours_per_year);
  for (int y = 0; y < n_years; ++y) {
    const double* row = path.data() + static_cast<std::size_t>(y) * H;
    const double a = row[0], b = row[H - 1];
    for (std::size_t h = 0; h < H; ++h)
      lp(y, static_cast<Eigen::Index>(h)) = row[h] - (a + (b - a) * static_cast<double>(h) / static_cast<double>(H - 1));
    lp(y, 0) = 0.0;
    lp(y, hours_per_year - 1) = 0.0;
  }
  const double mu = lp.mean();
  const double sd = std::sqrt((lp.array() - mu).square().mean());
  if (sd > 0.0) lp *= target_vol / sd;
  return lp.array().exp().matrix();
}

PricePanel simulate_fbm(const HurstParams& p, const SimConfig& c) {
  p.validate();
  c.validate();
  const auto n = static_cast<std::size_t>(c.n_years) * static_cast<std::size_t>(c.hours_per_year);
  PricePanel out;
  out.params = p;
  out.config = c;
  out.config.method = SimMethod::FftGaussian;
  out.prices = postprocess_log_path(fbm_path(p.epsilon, p.delta, n, c.seed), c.n_years, c.hours_per_year,
                                    c.target_vol);
  return out;
}

PricePanel simulate_shot_noise(const HurstParams& p, const SimConfig& c) {
  p.validate();
  c.validate();
  const auto n = static_cast<std::size_t>(c.n_years) * static_cast<std::size_t>(c.hours_per_year);
  PricePanel out;
  out.params = p;
  out.config = c;
  out.config.method = SimMethod::ShotNoise;
  out.prices = postprocess_log_path(shot_noise_path(p, n, c.seed), c.n_years, c.hours_per_year, c.target_vol);
  return out;
}

PricePanel simulate(const HurstParams& p, const SimConfig& c) {
  return c.method == SimMethod::ShotNoise ? simulate_shot_noise(p, c) : simulate_fbm(p, c);
}

double analytic_variogram(double epsilon, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  return std::pow(tau, 1.0 - 2.0 * epsilon);
}

double analytic_autocorr(double epsilon, double tau) {
  if (!(tau >= 1.0)) throw std::invalid_argument("analytic_autocorr requires tau >= 1");
  return -2.0 * epsilon * (1.0 - 2.0 * epsilon) * std::pow(tau, -1.0 - 2.0 * epsilon);
}

double fgn_autocorr(double epsilon, double k) {
  const double h2 = 1.0 - 2.0 * epsilon;
  const auto pw = [h2](double x) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), h2); };
  return 0.5 * (pw(k + 1.0) - 2.0 * pw(k) + pw(k - 1.0));
}

double snr_variogram(double epsilon, double n, double tau) {
  if (!(tau > 0.0) || !(n >= 0.0)) throw std::invalid_argument("snr_variogram: bad arguments");
  return std::sqrt(2.0 * n) * epsilon * std::log(tau);
}

double snr_autocorr(double epsilon, double n, double tau) {
  if (!(tau > 0.0) || !(n >= 0.0)) throw std::invalid_argument("snr_autocorr: bad arguments");
  return 2.0 * std::sqrt(n) * epsilon * std::pow(tau, -1.0 - 2.0 * epsilon);
}

void write_panel_csv(std::ostream& out, const PricePanel& panel) {
  out << "year,hour,price\n";
  for (Eigen::Index y = 0; y < panel.prices.rows(); ++y)
    for (Eigen::Index h = 0; h < panel.prices.cols(); ++h)
      out << y << ',' << h << ',' << csv::format(panel.prices(y, h)) << '\n';
}

Eigen::MatrixXd read_panel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty panel file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "year,hour,price") throw DataError("line 1: expected header 'year,hour,price'");
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = csv::split(line);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (f.size() != 3) throw DataError(where + "expected 3 fields");
    long long y = 0, h = 0;
    double p = 0.0;
    try {
      y = csv::parse_int(f[0]);
      h = csv::parse_int(f[1]);
      p = csv::parse_double(f[2]);
    } catch (const std::invalid_argument& e) {
      throw DataError(where + e.what());
    }
    if (!(p > 0.0)) throw DataError(where + "price must be positive");
    if (y == static_cast<long long>(rows.size())) rows.emplace_back();
    if (y + 1 != static_cast<long long>(rows.size())) throw DataError(where + "years must be consecutive from 0");
    if (h != static_cast<long long>(rows.back().size())) throw DataError(where + "hours must be consecutive from 0");
    rows.back().push_back(p);
  }
  if (rows.empty()) throw DataError("panel file has no rows");
  const std::size_t H = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(H));
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != H) throw DataError("year " + std::to_string(y) + " has a different number of hours");
    for (std::size_t h = 0; h < H; ++h) m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(h)) = rows[y][h];
  }
  return m;
}

}  // namespace hurstarb
