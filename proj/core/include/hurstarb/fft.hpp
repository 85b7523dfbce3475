#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hurstarb::fft {

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t good_size(std::size_t n);

// Causal linear convolution y[n] = sum_{j=0..n} kernel[j] * x[n - j] for
// n < out_len, computed with a zero-padded real FFT (no circular wrap).
std::vector<double> convolve(std::span<const double> x, std::span<const double> kernel,
                             std::size_t out_len);

// Same, accumulating `scale * (x conv kernel)` into `out` (out.size() is the
// output length). Avoids reallocating for repeated convolutions.
void convolve_add(std::span<const double> x, std::span<const double> kernel, double scale,
                  std::span<double> out);

}  // namespace hurstarb::fft
