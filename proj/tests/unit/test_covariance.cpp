#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hurstarb/covariance.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/stats.hpp"

using namespace hurstarb;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// r_i = sqrt(rho) f + sqrt(1 - rho) e_i, one row per period.
Eigen::MatrixXd factor_returns(Eigen::Index n_periods, Eigen::Index n_tickers, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXd r(n_periods, n_tickers);
  for (Eigen::Index t = 0; t < n_periods; ++t) {
    const double f = d(rng);
    for (Eigen::Index k = 0; k < n_tickers; ++k) r(t, k) = std::sqrt(rho) * f + std::sqrt(1.0 - rho) * d(rng);
  }
  return r;
}

std::vector<TimedPrice> cumulate(const Eigen::VectorXd& r, double dt) {
  std::vector<TimedPrice> pts;
  double lp = 0.0;
  pts.push_back({0.5 * dt, 1.0});
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    lp += r(i);
    pts.push_back({(static_cast<double>(i) + 1.5) * dt, std::exp(lp)});
  }
  return pts;
}

double sample_corr(const PairedReturns& p) { return stats::correlation(p.a, p.b); }

}  // namespace

TEST_SUITE("covariance") {
  TEST_CASE("self-covariance equals the variance") {
    const Eigen::MatrixXd r = factor_returns(500, 1, 0.0, 3);
    Eigen::MatrixXd two(500, 2);
    two << r, r;
    const auto c = estimate_cov(two, {"A", "B"});
    std::vector<double> v(r.data(), r.data() + r.size());
    CHECK(c.C(0, 1) == doctest::Approx(c.C(0, 0)).epsilon(1e-14));
    CHECK(c.C(0, 0) == doctest::Approx(stats::variance(v)).epsilon(1e-12));
    CHECK(c.n_obs(0, 1) == 500);

    // Same through binned asynchronous series.
    const auto pts = cumulate(r.col(0), 1.0);
    const BinnedSeries b[2] = {bin_points(pts, 1.0, "A"), bin_points(pts, 1.0, "B")};
    const auto cb = estimate_cov(b);
    CHECK(cb.C(0, 1) == doctest::Approx(cb.C(0, 0)).epsilon(1e-14));
    CHECK(cb.C(0, 0) == doctest::Approx(c.C(0, 0)).epsilon(1e-12));
  }

  TEST_CASE("independent walks are uncorrelated") {
    const auto r = factor_returns(20000, 2, 0.0, 11);
    const auto rho = cov_to_corr(estimate_cov(r, {"A", "B"})).rho;
    CHECK(std::abs(rho(0, 1)) < 3.0 / std::sqrt(20000.0));
  }

  TEST_CASE("single-factor returns recover rho") {
    const auto r = factor_returns(10000, 4, 0.49, 12);
    const auto rho = cov_to_corr(estimate_cov(r, {"A", "B", "C", "D"})).rho;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) CHECK(rho(i, j) == 1.0);
        else CHECK(std::abs(rho(i, j) - 0.49) < 0.05);
      }
  }

  TEST_CASE("asynchronous points with gaps are reweighted") {
    // Same factor walk at minute resolution, each ticker dropping points at random.
    const auto r = factor_returns(60 * 2000, 2, 0.49, 13);
    std::mt19937_64 rng(14);
    std::bernoulli_distribution keep(0.3);
    std::vector<BinnedSeries> bs;
    for (int k = 0; k < 2; ++k) {
      auto all = cumulate(r.col(k) / std::sqrt(60.0), 1.0 / 60.0);
      std::vector<TimedPrice> some;
      for (const auto& p : all)
        if (keep(rng)) some.push_back(p);
      bs.push_back(bin_points(some, 1.0, k == 0 ? "A" : "B"));
    }
    const auto rho = cov_to_corr(estimate_cov(bs)).rho;
    CHECK(std::abs(rho(0, 1) - 0.49) < 0.05);
  }

  TEST_CASE("cov_to_corr examples") {
    CovMatrix c;
    c.tickers = {"A", "B"};
    c.C.resize(2, 2);
    c.C << 4, 1, 1, 1;
    auto rho = cov_to_corr(c).rho;
    CHECK(rho(0, 0) == 1.0);
    CHECK(rho(1, 1) == 1.0);
    CHECK(rho(0, 1) == doctest::Approx(0.5));
    c.C << 4, 0, 0, 9;
    CHECK(cov_to_corr(c).rho.isIdentity());
    c.C << 1, 2, 2, 1;
    const auto cc = cov_to_corr(c);
    CHECK(cc.rho(0, 1) == 1.0);
    CHECK(cc.rho_raw(0, 1) == doctest::Approx(2.0));
    c.C << 0, 0, 0, 1;
    CHECK_THROWS_AS(cov_to_corr(c), NumericalError);
  }

  TEST_CASE("thin overlap is missing and imputed") {
    auto r = factor_returns(400, 3, 0.5, 15);
    // Tickers 1 and 2 never overlap.
    for (Eigen::Index t = 0; t < 400; ++t) r(t, t % 2 == 0 ? 1 : 2) = kNaN;
    const auto c = estimate_cov(r, {"A", "B", "C"});
    CHECK(c.missing(1, 2));
    CHECK(c.missing(2, 1));
    CHECK(std::isnan(c.raw(1, 2)));
    CHECK(c.n_obs(1, 2) == 0);
    CHECK_FALSE(c.missing(0, 1));
    const double r01 = c.C(0, 1) / std::sqrt(c.C(0, 0) * c.C(1, 1));
    const double r02 = c.C(0, 2) / std::sqrt(c.C(0, 0) * c.C(2, 2));
    CHECK(c.C(1, 2) == doctest::Approx(0.5 * (r01 + r02) * std::sqrt(c.C(1, 1) * c.C(2, 2))));
    CHECK(c.C(1, 2) == c.C(2, 1));
  }

  TEST_CASE("zero variance is a data error") {
    Eigen::MatrixXd r = factor_returns(100, 2, 0.0, 16);
    r.col(1).setZero();
    CHECK_THROWS_AS(estimate_cov(r, {"A", "B"}), DataError);
  }

  TEST_CASE("permutation equivariance") {
    auto r = factor_returns(3000, 4, 0.3, 17);
    std::mt19937_64 rng(18);
    std::bernoulli_distribution gap(0.2);
    for (Eigen::Index t = 0; t < r.rows(); ++t)
      for (Eigen::Index k = 0; k < 4; ++k)
        if (gap(rng)) r(t, k) = kNaN;
    const auto c = estimate_cov(r, {"A", "B", "C", "D"});
    const std::vector<int> perm{2, 0, 3, 1};
    Eigen::MatrixXd rp(r.rows(), 4);
    for (int k = 0; k < 4; ++k) rp.col(k) = r.col(perm[k]);
    const auto cp = estimate_cov(rp, {"C", "A", "D", "B"});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        CHECK(cp.C(i, j) == doctest::Approx(c.C(perm[i], perm[j])).epsilon(1e-12));
        CHECK(cp.n_obs(i, j) == c.n_obs(perm[i], perm[j]));
      }
  }

  TEST_CASE("no clamping on synchronous complete data") {
    for (double rho : {0.0, 0.9, 0.999}) {
      const auto r = factor_returns(200, 5, rho, 19);
      const auto cc = cov_to_corr(estimate_cov(r, {"a", "b", "c", "d", "e"}));
      CHECK((cc.rho - cc.rho_raw).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("factor model gives a flat normalized correlation curve") {
    const Eigen::Index n = 60 * 4000;
    const double rho = 0.49;
    const auto r = factor_returns(n, 2, rho, 20);
    std::vector<std::vector<TimedPrice>> pts;
    for (int k = 0; k < 2; ++k) pts.push_back(cumulate(r.col(k) / std::sqrt(60.0), 1.0 / 60.0));
    const std::vector<double> grid{0.25, 1.0, 4.0, 16.0};
    const auto cc = corr_vs_tau(pts, {"A", "B"}, grid);
    REQUIRE(cc.normalized.size() == 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double m = 4000.0 / grid[i];
      const double se = (1.0 - rho * rho) / std::sqrt(m) / rho;
      CHECK(std::abs(cc.normalized[0][i] - 1.0) < 3.0 * std::sqrt(se * se + (1.0 - rho * rho) * (1.0 - rho * rho) / 4000.0 / rho / rho));
    }

    const std::vector<double> one{1.0};
    const auto single = corr_vs_tau(pts, {"A", "B"}, one);
    REQUIRE(single.normalized.size() == 1);
    CHECK(single.normalized[0] == std::vector<double>{1.0});
  }

  TEST_CASE("pairs missing at some tau are dropped") {
    const auto r = factor_returns(300, 2, 0.5, 21);
    std::vector<std::vector<TimedPrice>> pts{cumulate(r.col(0), 1.0), cumulate(r.col(1), 1.0)};
    const std::vector<double> grid{1.0, 50.0};
    const auto cc = corr_vs_tau(pts, {"A", "B"}, grid);
    CHECK(cc.normalized.empty());
    CHECK(cc.dropped.size() == 1);
  }

  TEST_CASE("predicted correlation ratio") {
    Variogram v;
    v.tau = {0.5, 1.0, 2.0, 10.0, 100.0};
    for (double t : v.tau) v.V.push_back(3.0 * t);
    for (double x : predicted_corr_ratio(v)) CHECK(x == doctest::Approx(1.0));
    v.V.clear();
    for (double t : v.tau) v.V.push_back(2.0 * std::pow(t, 0.93));
    const auto p = predicted_corr_ratio(v);
    CHECK(p[1] == 1.0);
    for (std::size_t i = 0; i < v.tau.size(); ++i) CHECK(p[i] == doctest::Approx(std::pow(v.tau[i], 0.07)));
  }

  TEST_CASE("two-component draws") {
    const std::size_t n = 100000;
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    TwoComponentModel m{[](double t) { return t; }, [](double) { return 0.0; }, 0.6};
    CHECK(std::abs(sample_corr(simulate_two_component(m, 1.0, n, 1)) - 0.6) < 3.0 * se * (1 - 0.36));
    m.V = [](double) { return 0.0; };
    m.U = [](double t) { return t; };
    CHECK(std::abs(sample_corr(simulate_two_component(m, 1.0, n, 2))) < 3.0 * se);
    m.V = [](double t) { return t; };
    m.U = [](double t) { return t * t; };
    CHECK(std::abs(sample_corr(simulate_two_component(m, 1.0, n, 3)) - 0.3) < 3.0 * se);
    m.rho = -0.6;
    m.U = [](double) { return 0.0; };
    CHECK(std::abs(sample_corr(simulate_two_component(m, 1.0, n, 4)) + 0.6) < 3.0 * se);
    m.rho = 1.5;
    CHECK_THROWS_AS(simulate_two_component(m, 1.0, 10, 5), std::invalid_argument);
  }

  TEST_CASE("observed correlation is V/(V+U) times latent rho") {
    const double rho = 0.5;
    const std::size_t n = 50000;
    TwoComponentModel m{[](double t) { return t; }, [](double t) { return 2.0 * std::pow(t, 0.9); }, rho};
    std::uint64_t seed = 30;
    for (double tau : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const double pred = tau / (tau + 2.0 * std::pow(tau, 0.9)) * rho;
      const double got = sample_corr(simulate_two_component(m, tau, n, seed++));
      CHECK(std::abs(got - pred) < 3.0 * (1.0 - pred * pred) / std::sqrt(static_cast<double>(n)));
    }
  }

  TEST_CASE("two-component paths") {
    TwoComponentPathConfig cfg;
    cfg.n_tickers = 3;
    cfg.n_steps = 20000;
    cfg.uncorr_scale = 0.0;
    const auto p = simulate_two_component_paths(cfg);
    CHECK(p.row(0).isZero());
    const Eigen::MatrixXd r = p.bottomRows(cfg.n_steps - 1) - p.topRows(cfg.n_steps - 1);
    const auto rho = cov_to_corr(estimate_cov(r, {"a", "b", "c"})).rho;
    CHECK(std::abs(rho(0, 2) - 0.5) < 0.03);
    cfg.rho = -0.5;
    CHECK_THROWS_AS(simulate_two_component_paths(cfg), std::invalid_argument);
    cfg.n_tickers = 2;
    const auto q = simulate_two_component_paths(cfg);
    const Eigen::MatrixXd rq = q.bottomRows(cfg.n_steps - 1) - q.topRows(cfg.n_steps - 1);
    CHECK(std::abs(cov_to_corr(estimate_cov(rq, {"a", "b"})).rho(0, 1) + 0.5) < 0.03);
    CHECK(simulate_two_component_paths(cfg) == q);
  }

  TEST_CASE("matrix csv") {
    CovMatrix c = estimate_cov(factor_returns(100, 2, 0.5, 40), {"A", "B"});
    std::stringstream ss;
    write_nobs_csv(ss, c);
    CHECK(ss.str() == "A,B\n100,100\n100,100\n");
  }
}
