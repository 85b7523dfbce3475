#include "hurstarb/loo_predictor.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/stats.hpp"

namespace hurstarb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd zero_missing(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });
}

Eigen::MatrixXd known_mask(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return std::isfinite(v) ? 1.0 : 0.0; });
}

std::vector<std::string> default_names(std::vector<std::string> names, Eigen::Index n) {
  if (names.empty())
    for (Eigen::Index i = 0; i < n; ++i) names.push_back("T" + std::to_string(i));
  if (static_cast<Eigen::Index>(names.size()) != n) throw std::invalid_argument("ticker count does not match matrix");
  return names;
}

// Per-ticker loss terms for the panel: residual and <r^2> normalizer.
struct Residuals {
  Eigen::MatrixXd E;      // (X B^T - X) on known entries, 0 elsewhere
  Eigen::VectorXd denom;  // sum_h r^2 per ticker
  Eigen::VectorXd count;  // known periods per ticker
};

Residuals residuals(const Eigen::MatrixXd& B, const Eigen::MatrixXd& X, const Eigen::MatrixXd& M) {
  Residuals r;
  r.E = ((X * B.transpose()) - X).cwiseProduct(M);
  r.denom = X.cwiseProduct(X).colwise().sum().transpose();
  r.count = M.colwise().sum().transpose();
  return r;
}

double mean_fmse(const Residuals& r) {
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index k = 0; k < r.E.cols(); ++k) {
    if (r.count(k) < 2 || !(r.denom(k) > 0.0)) continue;
    sum += r.E.col(k).squaredNorm() / r.denom(k);
    ++n;
  }
  return n > 0 ? sum / n : kNaN;
}

}  // namespace

double default_ridge(const Eigen::MatrixXd& C) {
  if (C.rows() == 0) return 0.0;
  return 1e-4 * C.diagonal().mean();
}

PrecisionMatrix invert_with_ridge(const Eigen::MatrixXd& C, double ridge, std::vector<std::string> tickers) {
  const Eigen::Index n = C.rows();
  if (C.cols() != n) throw std::invalid_argument("covariance matrix must be square");
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
  if (!C.allFinite()) throw std::invalid_argument("covariance matrix has non-finite entries");
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("covariance matrix is not symmetric");
  Eigen::MatrixXd R = C;
  R.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance matrix plus ridge is not positive definite");
  // Rounding can leave a tiny positive pivot on an exactly singular matrix.
  const Eigen::VectorXd pivots = Eigen::MatrixXd(llt.matrixL()).diagonal().array().square();
  if (n > 0 && pivots.minCoeff() <= 1e-13 * R.diagonal().maxCoeff())
    throw NumericalError("covariance matrix plus ridge is numerically singular");
  PrecisionMatrix p;
  p.tickers = default_names(std::move(tickers), n);
  p.A = llt.solve(Eigen::MatrixXd::Identity(n, n));
  p.A = 0.5 * (p.A + p.A.transpose());
  if (!p.A.allFinite()) throw NumericalError("precision matrix has non-finite entries");
  p.ridge = ridge;
  return p;
}

PrecisionMatrix invert_with_ridge(const CovMatrix& C, double ridge) {
  return invert_with_ridge(C.C, ridge, C.tickers);
}

PredictionCoeffs loo_coefficients(const PrecisionMatrix& A) {
  const Eigen::Index n = A.A.rows();
  PredictionCoeffs out;
  out.tickers = default_names(A.tickers, n);
  out.B.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double aii = A.A(i, i);
    if (aii == 0.0 || !std::isfinite(aii)) throw NumericalError("precision matrix has a zero diagonal entry");
    for (Eigen::Index k = 0; k < n; ++k) out.B(i, k) = k == i ? 0.0 : -A.A(k, i) / aii;
  }
  return out;
}

Eigen::MatrixXd partitioned_inverse(const Eigen::MatrixXd& A, Eigen::Index I) {
  const Eigen::Index n = A.rows();
  if (I < 0 || I >= n) throw std::out_of_range("partitioned_inverse: index out of range");
  const double aii = A(I, I);
  if (aii == 0.0) throw NumericalError("partitioned_inverse: zero diagonal entry");
  Eigen::MatrixXd out = A - A.col(I) * A.row(I) / aii;
  out.row(I).setZero();
  out.col(I).setZero();
  return out;
}

Eigen::MatrixXd deletion_inverse(const Eigen::MatrixXd& C, Eigen::Index I) {
  const Eigen::Index n = C.rows();
  if (I < 0 || I >= n) throw std::out_of_range("deletion_inverse: index out of range");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != I) keep.push_back(i);
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = C(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (m == 0) return out;
  const Eigen::MatrixXd inv = sub.inverse();
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) out(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]) = inv(a, b);
  return out;
}

Eigen::VectorXd predict(const PredictionCoeffs& B, const Eigen::VectorXd& r) {
  if (B.B.cols() != r.size() || B.B.rows() != r.size()) throw std::invalid_argument("predict: dimension mismatch");
  const Eigen::VectorXd x = r.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });
  return B.B * x;
}

Eigen::MatrixXd predict_panel(const Eigen::MatrixXd& B, const Eigen::MatrixXd& returns) {
  if (B.rows() != returns.cols() || B.cols() != returns.cols())
    throw std::invalid_argument("predict_panel: dimension mismatch");
  return zero_missing(returns) * B.transpose();
}

Eigen::VectorXd naive_predict(const Eigen::VectorXd& r, const Eigen::VectorXd& variances) {
  const Eigen::Index n = r.size();
  if (variances.size() != n) throw std::invalid_argument("naive_predict: dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(variances(i) > 0.0)) throw std::invalid_argument("naive_predict: variances must be positive");
  Eigen::VectorXd z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = r(j) / std::sqrt(variances(j));
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Running mean, exact when all inputs are equal.
    double m = 0.0;
    int count = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || !std::isfinite(z(j))) continue;
      ++count;
      m += (z(j) - m) / count;
    }
    out(i) = count > 0 ? std::sqrt(variances(i)) * m : 0.0;
  }
  return out;
}

Eigen::MatrixXd naive_predict_panel(const Eigen::MatrixXd& returns, const Eigen::VectorXd& variances) {
  Eigen::MatrixXd out(returns.rows(), returns.cols());
  for (Eigen::Index h = 0; h < returns.rows(); ++h)
    out.row(h) = naive_predict(returns.row(h).transpose(), variances).transpose();
  return out;
}

PredictionCoeffs equal_correlation_coeffs(const Eigen::VectorXd& variances, double rho,
                                          std::vector<std::string> tickers) {
  const Eigen::Index n = variances.size();
  if (!(rho > -1.0 / std::max<double>(1.0, static_cast<double>(n - 1)) && rho < 1.0))
    throw std::invalid_argument("equal_correlation_coeffs: rho makes the matrix singular");
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      C(i, j) = (i == j ? 1.0 : rho) * std::sqrt(variances(i) * variances(j));
  return loo_coefficients(invert_with_ridge(C, 0.0, std::move(tickers)));
}

double fmse(std::span<const double> r_hat, std::span<const double> r) {
  if (r_hat.size() != r.size()) throw std::invalid_argument("fmse: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i])) continue;
    num += (r_hat[i] - r[i]) * (r_hat[i] - r[i]);
    den += r[i] * r[i];
  }
  if (!(den > 0.0)) throw NumericalError("fmse: actual returns have zero mean square");
  return num / den;
}

double fve_from_fmse(double x) { return (1.0 - x / 2.0) * (1.0 - x / 2.0); }

double fve(std::span<const double> r_hat, std::span<const double> r) { return fve_from_fmse(fmse(r_hat, r)); }

double fve_rho2(std::span<const double> r_hat, std::span<const double> r) {
  if (r_hat.size() != r.size()) throw std::invalid_argument("fve_rho2: length mismatch");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::isfinite(r[i])) {
      a.push_back(r_hat[i]);
      b.push_back(r[i]);
    }
  const double c = stats::correlation(a, b);
  return c * c;
}

PredictionReport evaluate(const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& returns,
                          std::vector<std::string> tickers) {
  if (r_hat.rows() != returns.rows() || r_hat.cols() != returns.cols())
    throw std::invalid_argument("evaluate: dimension mismatch");
  const Eigen::Index n = returns.cols();
  PredictionReport rep;
  rep.tickers = default_names(std::move(tickers), n);
  double s_fmse = 0.0, s_fve = 0.0, s_rho = 0.0;
  int used = 0, used_rho = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> a, b;
    for (Eigen::Index h = 0; h < returns.rows(); ++h)
      if (std::isfinite(returns(h, k))) {
        a.push_back(r_hat(h, k));
        b.push_back(returns(h, k));
      }
    rep.n_periods.push_back(b.size());
    double m = kNaN, f = kNaN, q = kNaN;
    bool ok = b.size() >= 2;
    if (ok) {
      double den = 0.0;
      for (double x : b) den += x * x;
      ok = den > 0.0;
    }
    if (ok) {
      m = fmse(a, b);
      f = fve_from_fmse(m);
      s_fmse += m;
      s_fve += f;
      ++used;
      const double sa = stats::variance(a);
      if (sa > 0.0) {
        q = fve_rho2(a, b);
        s_rho += q;
        ++used_rho;
      }
    }
    rep.fmse.push_back(m);
    rep.fve.push_back(f);
    rep.fve_rho2.push_back(q);
  }
  rep.mean_fmse = used ? s_fmse / used : kNaN;
  rep.mean_fve = used ? s_fve / used : kNaN;
  rep.mean_fve_rho2 = used_rho ? s_rho / used_rho : kNaN;
  return rep;
}

std::map<int, PredictionReport> evaluate_by_group(const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& returns,
                                                  std::span<const int> group, std::vector<std::string> tickers) {
  if (static_cast<Eigen::Index>(group.size()) != returns.rows())
    throw std::invalid_argument("evaluate_by_group: one label per row required");
  std::map<int, std::vector<Eigen::Index>> rows;
  for (std::size_t i = 0; i < group.size(); ++i) rows[group[i]].push_back(static_cast<Eigen::Index>(i));
  std::map<int, PredictionReport> out;
  for (const auto& [g, idx] : rows) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd a(m, returns.cols()), b(m, returns.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
      a.row(i) = r_hat.row(idx[static_cast<std::size_t>(i)]);
      b.row(i) = returns.row(idx[static_cast<std::size_t>(i)]);
    }
    out.emplace(g, evaluate(a, b, tickers));
  }
  return out;
}

double panel_fmse(const Eigen::MatrixXd& B, const Eigen::MatrixXd& returns) {
  if (B.rows() != returns.cols() || B.cols() != returns.cols())
    throw std::invalid_argument("panel_fmse: dimension mismatch");
  return mean_fmse(residuals(B, zero_missing(returns), known_mask(returns)));
}

RefineResult gradient_refine(const PredictionCoeffs& init, const Eigen::MatrixXd& train,
                             std::span<const Eigen::MatrixXd> validation, const RefineConfig& cfg) {
  const Eigen::Index n = init.B.rows();
  if (init.B.cols() != n || train.cols() != n) throw std::invalid_argument("gradient_refine: dimension mismatch");
  for (const auto& v : validation)
    if (v.cols() != n) throw std::invalid_argument("gradient_refine: validation panel has wrong width");
  if (validation.empty()) throw std::invalid_argument("gradient_refine: at least one validation panel is required");
  if (!(cfg.learning_rate >= 0.0) || cfg.max_iterations < 0 || cfg.patience < 1)
    throw std::invalid_argument("gradient_refine: invalid configuration");

  const Eigen::MatrixXd X = zero_missing(train);
  const Eigen::MatrixXd M = known_mask(train);
  const auto val_loss = [&](const Eigen::MatrixXd& B) {
    double s = 0.0;
    for (const auto& v : validation) s += panel_fmse(B, v);
    return s / static_cast<double>(validation.size());
  };
  const auto check = [](double x, const char* what, int step, double lr) {
    if (!std::isfinite(x))
      throw NumericalError(std::string("gradient_refine: non-finite ") + what + " at step " + std::to_string(step) +
                           " (learning rate " + csv::format(lr) + ")");
  };

  Eigen::MatrixXd B = init.B;
  B.diagonal().setZero();
  Residuals res = residuals(B, X, M);
  double loss = mean_fmse(res);
  double vloss = val_loss(B);
  check(loss, "training loss", 0, cfg.learning_rate);
  check(vloss, "validation loss", 0, cfg.learning_rate);

  RefineResult out;
  out.coeffs = {init.tickers, B};
  out.train_fmse.push_back(loss);
  out.validation_fmse.push_back(vloss);
  double best = vloss;
  int since_best = 0;
  double lr = cfg.learning_rate;
  out.stop_reason = "max_iterations";
  if (lr == 0.0) {
    out.stop_reason = "zero_learning_rate";
    return out;
  }

  Eigen::VectorXd w(n);
  int used = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const bool ok = res.count(k) >= 2 && res.denom(k) > 0.0;
    w(k) = ok ? 1.0 / res.denom(k) : 0.0;
    used += ok ? 1 : 0;
  }
  if (used == 0) throw NumericalError("gradient_refine: training panel has no usable tickers");

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Eigen::MatrixXd G = (2.0 / used) * w.asDiagonal() * (res.E.transpose() * X);
    G.diagonal().setZero();
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      Eigen::MatrixXd trial = B - lr * G;
      Residuals r2 = residuals(trial, X, M);
      const double l2 = mean_fmse(r2);
      check(l2, "training loss", it, lr);
      if (l2 < loss) {
        B = std::move(trial);
        res = std::move(r2);
        loss = l2;
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) {
      out.stop_reason = "no_descent";
      break;
    }
    vloss = val_loss(B);
    check(vloss, "validation loss", it, lr);
    out.train_fmse.push_back(loss);
    out.validation_fmse.push_back(vloss);
    if (vloss < best) {
      best = vloss;
      out.coeffs.B = B;
      out.best_step = static_cast<int>(out.train_fmse.size()) - 1;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      out.stop_reason = "early_stopping";
      break;
    }
  }
  return out;
}

void write_coeffs_csv(std::ostream& out, const PredictionCoeffs& c) { csv::write_matrix(out, c.tickers, c.B); }

PredictionCoeffs read_coeffs_csv(std::istream& in) {
  auto m = csv::read_matrix(in);
  if (m.values.rows() != m.values.cols()) throw DataError("coefficient matrix is not square");
  for (Eigen::Index i = 0; i < m.values.rows(); ++i)
    if (m.values(i, i) != 0.0) throw DataError("coefficient matrix must have a zero diagonal");
  return {std::move(m.tickers), std::move(m.values)};
}

}  // namespace hurstarb
