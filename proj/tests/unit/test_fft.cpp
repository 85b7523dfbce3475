#include <doctest.h>

#include <cmath>
#include <random>

#include "hurstarb/fft.hpp"

using namespace hurstarb;

namespace {
std::vector<double> direct(const std::vector<double>& x, const std::vector<double>& k, std::size_t n) {
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i && j < k.size(); ++j)
      if (i - j < x.size()) y[i] += k[j] * x[i - j];
  return y;
}
std::vector<double> randn(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}
}  // namespace

TEST_SUITE("fft") {
  TEST_CASE("good sizes are 7-smooth and minimal") {
    CHECK(fft::good_size(1) == 1);
    CHECK(fft::good_size(11) == 12);
    CHECK(fft::good_size(97) == 98);
    CHECK(fft::good_size(1000) == 1000);
    CHECK(fft::good_size(1025) == 1029);
  }

  TEST_CASE("matches direct linear convolution") {
    for (std::size_t n : {1u, 7u, 64u, 333u}) {
      const auto x = randn(n, n), k = randn(n, n + 1);
      const auto y = fft::convolve(x, k, n);
      const auto ref = direct(x, k, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(10.0));
    }
    const auto x = randn(5, 1), k = randn(3, 2);
    const auto y = fft::convolve(x, k, 12);
    const auto ref = direct(x, k, 12);
    for (std::size_t i = 0; i < 12; ++i) CHECK(y[i] == doctest::Approx(ref[i]).scale(10.0));
  }

  TEST_CASE("no circular leakage: leading zeros shift the output") {
    const std::size_t n = 1000, pad = 137;
    const auto x = randn(n, 4), k = randn(n + pad, 5);
    std::vector<double> xp(pad, 0.0);
    xp.insert(xp.end(), x.begin(), x.end());
    const auto y = fft::convolve(x, k, n);
    const auto yp = fft::convolve(xp, k, n + pad);
    for (std::size_t i = 0; i < pad; ++i) CHECK(std::abs(yp[i]) < 1e-10);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(yp[i + pad] - y[i]) < 1e-10);
  }

  TEST_CASE("convolve_add accumulates with a scale") {
    const auto x = randn(50, 8), k = randn(50, 9);
    std::vector<double> out(50, 1.0);
    fft::convolve_add(x, k, 2.0, out);
    const auto ref = direct(x, k, 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(out[i] == doctest::Approx(1.0 + 2.0 * ref[i]).scale(10.0));
  }
}
