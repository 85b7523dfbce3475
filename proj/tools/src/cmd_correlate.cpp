#include "hurstarb/covariance.hpp"
#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/stats.hpp"
#include "options.hpp"

namespace hurstarb::cli {

namespace {
struct CorrOpts {
  std::string data_dir;
  std::string years;
  std::string clock_kind = "dollar";
  double tau = 0.0;
  std::string tau_grid;
  double normalize_at = 1.0;
  std::size_t min_obs = kDefaultMinObs;
};

void write_matrices(RunContext& ctx, int year, const CovMatrix& c) {
  const auto corr = cov_to_corr(c);
  const auto y = std::to_string(year);
  auto write = [&](const std::string& name, const Eigen::MatrixXd& m) {
    auto out = ctx.output(name + "_" + y + ".csv");
    write_cov_csv(out, c.tickers, m);
  };
  write("cov", c.C);
  write("cov_raw", c.raw);
  write("corr", corr.rho);
  write("corr_raw", corr.rho_raw);
  auto out = ctx.output("nobs_" + y + ".csv");
  write_nobs_csv(out, c);
}

void run_correlate(const CorrOpts& o, RunContext& ctx) {
  const auto years = parse_years(o.years);
  const auto kind = parse_clock_kind(o.clock_kind);
  const bool want_grid = !o.tau_grid.empty();
  const double tau = (o.tau > 0.0 || want_grid) ? o.tau : 1.0;
  if (o.tau < 0.0) throw std::invalid_argument("--tau must be positive");
  const auto grid = want_grid ? parse_tau_grid(o.tau_grid) : std::vector<double>{};

  ctx.input_dir(o.data_dir);
  const auto all = load_candle_dir(o.data_dir);

  std::vector<std::vector<double>> pair_curves, predicted;
  nlohmann::json per_year = nlohmann::json::object();
  std::ofstream rho_csv;
  if (want_grid) {
    rho_csv = ctx.output("rho_tau.csv");
    rho_csv << "year,ticker_a,ticker_b,tau_hours,rho,rho_normalized\n";
  }
  for (int y : years) {
    const auto yc = candles_in_year(all, y);
    if (yc.size() < 2) throw DataError("fewer than two tickers trade in " + std::to_string(y));
    const auto clock = year_clock(ctx, yc, y, {}, kind);
    nlohmann::json info{{"tickers", yc.size()}};
    if (tau > 0.0) {
      std::vector<BinnedSeries> bins;
      for (const auto& s : yc) bins.push_back(bin_series(s, clock, tau));
      const auto c = estimate_cov(bins, o.min_obs);
      write_matrices(ctx, y, c);
      info["missing_pairs"] = (c.missing.count()) / 2;
    }
    if (want_grid) {
      std::vector<std::vector<TimedPrice>> pts;
      std::vector<std::string> names;
      for (const auto& s : yc) {
        pts.push_back(to_timed_prices(s, clock));
        names.push_back(s.ticker);
      }
      const auto cc = corr_vs_tau(pts, names, grid, o.normalize_at, o.min_obs);
      for (std::size_t p = 0; p < cc.pairs.size(); ++p) {
        const auto [a, b] = cc.pairs[p];
        for (std::size_t i = 0; i < grid.size(); ++i)
          rho_csv << y << ',' << names[a] << ',' << names[b] << ',' << csv::format(grid[i]) << ','
                  << csv::format(cc.raw[p][i]) << ',' << csv::format(cc.normalized[p][i]) << '\n';
      }
      pair_curves.insert(pair_curves.end(), cc.normalized.begin(), cc.normalized.end());
      nlohmann::json dropped = nlohmann::json::array();
      for (auto [a, b] : cc.dropped) dropped.push_back({names[a], names[b]});
      info["dropped_pairs"] = dropped;
      // Predicted ratio from each ticker's total variogram.
      for (const auto& p : pts) {
        const auto v = variogram_diff_of_avg(p, grid);
        if (v.size() != grid.size()) continue;
        try {
          predicted.push_back(predicted_corr_ratio(v, o.normalize_at));
        } catch (const std::exception&) {
        }
      }
    }
    per_year[std::to_string(y)] = info;
  }
  nlohmann::json summary{{"years", years}, {"tau", tau}, {"per_year", per_year}};
  if (want_grid) {
    if (pair_curves.empty()) throw DataError("no ticker pair has a correlation at every grid tau");
    {
      auto out = ctx.output("rho_percentiles.csv");
      write_percentiles_csv(out, ensemble_percentiles(grid, pair_curves));
    }
    auto out = ctx.output("predicted.csv");
    out << "tau_hours,median_rho_normalized,predicted\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> m, p;
      for (const auto& c : pair_curves) m.push_back(c[i]);
      for (const auto& c : predicted) p.push_back(c[i]);
      out << csv::format(grid[i]) << ',' << csv::format(stats::median(m)) << ','
          << (p.empty() ? std::string() : csv::format(stats::median(p))) << '\n';
    }
    summary["n_pair_curves"] = pair_curves.size();
    summary["n_variograms"] = predicted.size();
  }
  ctx.write_json("summary.json", summary);
}
}  // namespace

Command register_correlate(CLI::App& root) {
  auto o = std::make_shared<CorrOpts>();
  auto* app = root.add_subcommand("correlate", "Return correlation matrices and their dependence on tau");
  app->add_option("--data-dir", o->data_dir, "Directory of per-ticker candle CSVs")->required();
  app->add_option("--years", o->years, "Year(s) to analyse")->required();
  app->add_option("--clock-kind", o->clock_kind, "clock, dollar or volume")->capture_default_str();
  app->add_option("--tau", o->tau, "Resolution in hours for the matrix outputs (default 1 without --tau-grid)");
  app->add_option("--tau-grid", o->tau_grid, "Grid for rho(tau) curves: lo:hi:per_decade or comma list");
  app->add_option("--normalize-at", o->normalize_at, "Normalization point of rho(tau)")->capture_default_str();
  app->add_option("--min-obs", o->min_obs, "Minimum overlapping returns per pair")->capture_default_str();
  return {app, [o](RunContext& ctx) { run_correlate(*o, ctx); }};
}

}  // namespace hurstarb::cli
