#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hurstarb/covariance.hpp"

namespace hurstarb {

struct PrecisionMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd A;
  double ridge = 0.0;
};

// B(I, K) weights ticker K's return in the prediction of ticker I's; zero
// diagonal.
struct PredictionCoeffs {
  std::vector<std::string> tickers;
  Eigen::MatrixXd B;
};

// 1e-4 times the mean diagonal of C.
double default_ridge(const Eigen::MatrixXd& C);

// (C + ridge I)^-1 by Cholesky. Throws std::invalid_argument for an
// asymmetric C or negative ridge and NumericalError if the ridged matrix is
// not positive definite.
PrecisionMatrix invert_with_ridge(const Eigen::MatrixXd& C, double ridge, std::vector<std::string> tickers = {});
PrecisionMatrix invert_with_ridge(const CovMatrix& C, double ridge);

// B(I, K) = -A(K, I) / A(I, I) for K != I. Throws NumericalError on a zero
// diagonal entry of A.
PredictionCoeffs loo_coefficients(const PrecisionMatrix& A);

// Inverse of C with row and column I deleted, re-padded with zeros at I,
// computed from A = C^-1 as A(K,J) - A(J,I) A(K,I) / A(I,I).
Eigen::MatrixXd partitioned_inverse(const Eigen::MatrixXd& A, Eigen::Index I);
// The same by deleting, inverting and padding; reference for tests.
Eigen::MatrixXd deletion_inverse(const Eigen::MatrixXd& C, Eigen::Index I);

// r_hat(I) = sum_{K != I} B(I, K) r(K). NaN returns contribute 0.
Eigen::VectorXd predict(const PredictionCoeffs& B, const Eigen::VectorXd& r);
// Row-wise predict over a panel (rows = periods).
Eigen::MatrixXd predict_panel(const Eigen::MatrixXd& B, const Eigen::MatrixXd& returns);

// r_hat(I) = sqrt(var_I) * mean_{J != I, r_J known} r_J / sqrt(var_J); 0 when
// no other return is known.
Eigen::VectorXd naive_predict(const Eigen::VectorXd& r, const Eigen::VectorXd& variances);
Eigen::MatrixXd naive_predict_panel(const Eigen::MatrixXd& returns, const Eigen::VectorXd& variances);

// Coefficients of the equal-correlation model with common correlation rho
// and the given variances.
PredictionCoeffs equal_correlation_coeffs(const Eigen::VectorXd& variances, double rho,
                                          std::vector<std::string> tickers = {});

// <(r_hat - r)^2> / <r^2> over one ticker's known periods.
double fmse(std::span<const double> r_hat, std::span<const double> r);
// (1 - fmse/2)^2
double fve(std::span<const double> r_hat, std::span<const double> r);
double fve_from_fmse(double x);
// Squared Pearson correlation of r_hat and r.
double fve_rho2(std::span<const double> r_hat, std::span<const double> r);

struct PredictionReport {
  std::vector<std::string> tickers;
  std::vector<double> fmse;      // per ticker
  std::vector<double> fve;       // per ticker, (1 - fmse/2)^2
  std::vector<double> fve_rho2;  // per ticker, squared correlation
  std::vector<std::size_t> n_periods;
  double mean_fmse = 0.0;
  double mean_fve = 0.0;  // mean over tickers of (1 - fmse/2)^2
  double mean_fve_rho2 = 0.0;
};

// Scores predictions against actual returns (rows = periods). Periods where a
// ticker's return is unknown are excluded for that ticker; tickers with fewer
// than two known periods are skipped in the means and reported as NaN.
PredictionReport evaluate(const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& returns,
                          std::vector<std::string> tickers = {});
// One report per group label (e.g. month index per row).
std::map<int, PredictionReport> evaluate_by_group(const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& returns,
                                                  std::span<const int> group, std::vector<std::string> tickers = {});

struct RefineConfig {
  double learning_rate = 0.5;
  int max_iterations = 500;
  int patience = 10;
  int max_halvings = 30;
};

struct RefineResult {
  PredictionCoeffs coeffs;  // best validation FMSE seen, including the start
  std::vector<double> train_fmse;       // per accepted step, starting point first
  std::vector<double> validation_fmse;  // aligned with train_fmse
  int best_step = 0;
  std::string stop_reason;
};

// Mean over tickers of each ticker's FMSE for coefficients B on a panel.
double panel_fmse(const Eigen::MatrixXd& B, const Eigen::MatrixXd& returns);

// Gradient descent on the training panel's mean FMSE over B with a zero
// diagonal, starting from `init`. A step that does not lower the training
// loss is retried at half the rate. Stops after `patience` accepted steps
// without a new best mean validation FMSE and returns the best coefficients.
// Throws NumericalError if the loss becomes non-finite.
RefineResult gradient_refine(const PredictionCoeffs& init, const Eigen::MatrixXd& train,
                             std::span<const Eigen::MatrixXd> validation, const RefineConfig& cfg = {});

void write_coeffs_csv(std::ostream& out, const PredictionCoeffs& c);
PredictionCoeffs read_coeffs_csv(std::istream& in);

}  // namespace hurstarb
