#include "hurstarb/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <new>
#include <stdexcept>

namespace hurstarb::fft {

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct PlanDeleter {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

}  // namespace

std::size_t good_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

void convolve_add(std::span<const double> x, std::span<const double> kernel, double scale,
                  std::span<double> out) {
  const std::size_t out_len = out.size();
  if (out_len == 0 || x.empty() || kernel.empty()) return;
  const std::size_t nx = std::min(x.size(), out_len);
  const std::size_t nk = std::min(kernel.size(), out_len);
  // Every retained output index is < out_len <= nx + nk - 1, so a buffer of
  // nx + nk - 1 holds the full linear convolution without wrap-around.
  const std::size_t n = good_size(nx + nk - 1);
  const std::size_t nc = n / 2 + 1;

  auto a = alloc<double>(n);
  auto b = alloc<double>(n);
  auto fa = alloc<fftw_complex>(nc);
  auto fb = alloc<fftw_complex>(nc);

  const int ni = static_cast<int>(n);
  Plan pa(fftw_plan_dft_r2c_1d(ni, a.get(), fa.get(), FFTW_ESTIMATE));
  Plan pb(fftw_plan_dft_r2c_1d(ni, b.get(), fb.get(), FFTW_ESTIMATE));
  Plan inv(fftw_plan_dft_c2r_1d(ni, fa.get(), a.get(), FFTW_ESTIMATE));
  if (!pa || !pb || !inv) throw std::runtime_error("FFTW planning failed");

  std::fill(a.get(), a.get() + n, 0.0);
  std::fill(b.get(), b.get() + n, 0.0);
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nx), a.get());
  std::copy(kernel.begin(), kernel.begin() + static_cast<std::ptrdiff_t>(nk), b.get());
  fftw_execute(pa.get());
  fftw_execute(pb.get());
  for (std::size_t i = 0; i < nc; ++i) {
    const std::complex<double> u(fa[i][0], fa[i][1]), v(fb[i][0], fb[i][1]);
    const auto w = u * v;
    fa[i][0] = w.real();
    fa[i][1] = w.imag();
  }
  fftw_execute(inv.get());
  const double norm = scale / static_cast<double>(n);
  const std::size_t keep = std::min(out_len, nx + nk - 1);
  for (std::size_t i = 0; i < keep; ++i) out[i] += a[i] * norm;
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> kernel,
                             std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  convolve_add(x, kernel, 1.0, out);
  return out;
}

}  // namespace hurstarb::fft
