#pragma once

#include <span>
#include <vector>

namespace hurstarb::stats {

double mean(std::span<const double> x);

// Population variance (divides by n).
double variance(std::span<const double> x);

// Sample standard deviation (divides by n - 1); 0 for n < 2.
double sample_sd(std::span<const double> x);

// Standard error of the mean, sample_sd / sqrt(n).
double standard_error(std::span<const double> x);

// Percentile in [0, 100] with linear interpolation between order
// statistics at rank (n - 1) * p / 100.
double percentile(std::span<const double> x, double p);

double median(std::span<const double> x);

// Asymptotic standard error of the sample median, sqrt(pi / 2) * sd / sqrt(n).
double median_standard_error(std::span<const double> x);

double correlation(std::span<const double> x, std::span<const double> y);

// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hurstarb::stats
