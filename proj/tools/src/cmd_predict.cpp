#include <algorithm>

#include "hurstarb/csv.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/loo_predictor.hpp"
#include "options.hpp"

namespace hurstarb::cli {

namespace {
struct PredictOpts {
  std::string input;
  std::string data_dir;
  std::string years;
  std::string clock_kind = "dollar";
  std::string train_years;
  std::string predict_years;
  std::string ridge = "auto";
  std::size_t min_obs = kDefaultMinObs;
  bool refine = false;
  double learning_rate = 0.5;
  int max_iterations = 500;
  int patience = 10;
};

// Hour-to-hour returns inside one year of the panel.
Eigen::MatrixXd year_returns(const HourlyPanel& p, int year) {
  const auto it = std::find(p.years.begin(), p.years.end(), year);
  if (it == p.years.end()) throw std::invalid_argument("year " + std::to_string(year) + " is not in the panel");
  const auto [b, e] = p.year_rows(static_cast<std::size_t>(it - p.years.begin()));
  if (e - b < 3) throw DataError("year " + std::to_string(year) + " has too few hours");
  const Eigen::MatrixXd prices = p.prices.middleRows(b, e - b);
  const Eigen::MatrixXd r = (prices.bottomRows(e - b - 1).array() / prices.topRows(e - b - 1).array()).log();
  return r;
}

void run_predict(const PredictOpts& o, RunContext& ctx) {
  const auto panel = load_hourly_panel(ctx, o.input, o.data_dir, o.years, parse_clock_kind(o.clock_kind));
  const auto train = parse_years(o.train_years);
  const auto targets = o.predict_years.empty() ? panel.years : parse_years(o.predict_years);
  RefineConfig rc;
  rc.learning_rate = o.learning_rate;
  rc.max_iterations = o.max_iterations;
  rc.patience = o.patience;

  std::map<int, Eigen::MatrixXd> returns;
  for (int y : train) returns[y] = year_returns(panel, y);
  for (int y : targets) returns[y] = year_returns(panel, y);

  auto grid_csv = ctx.output("grid.csv");
  grid_csv << "train_year,predict_year,predictor,mean_fve,mean_fve_rho2,mean_fmse\n";
  nlohmann::json grid = nlohmann::json::array();
  nlohmann::json refine_info = nlohmann::json::object();
  nlohmann::json ridges = nlohmann::json::object();

  for (int ty : train) {
    const auto cov = estimate_cov(returns[ty], panel.tickers, 1.0, o.min_obs);
    const double ridge = o.ridge == "auto" ? default_ridge(cov.C) : csv::parse_double(o.ridge);
    ridges[std::to_string(ty)] = ridge;
    const auto coeffs = loo_coefficients(invert_with_ridge(cov, ridge));
    {
      auto out = ctx.output("coeffs_" + std::to_string(ty) + ".csv");
      write_coeffs_csv(out, coeffs);
    }
    std::vector<std::pair<std::string, PredictionCoeffs>> predictors{{"loo", coeffs}};
    if (o.refine) {
      std::vector<Eigen::MatrixXd> val;
      for (int y : targets)
        if (y != ty) val.push_back(returns[y]);
      if (val.empty()) throw std::invalid_argument("--refine needs a predict year other than the training year");
      const auto res = gradient_refine(coeffs, returns[ty], val, rc);
      {
        auto out = ctx.output("coeffs_" + std::to_string(ty) + "_refined.csv");
        write_coeffs_csv(out, res.coeffs);
      }
      refine_info[std::to_string(ty)] = {{"best_step", res.best_step},
                                         {"stop_reason", res.stop_reason},
                                         {"train_fmse", res.train_fmse},
                                         {"validation_fmse", res.validation_fmse}};
      predictors.emplace_back("refined", res.coeffs);
    }
    const Eigen::VectorXd variances = cov.C.diagonal();
    for (int py : targets) {
      const auto& r = returns[py];
      std::vector<std::pair<std::string, Eigen::MatrixXd>> preds;
      for (const auto& [name, c] : predictors) preds.emplace_back(name, predict_panel(c.B, r));
      preds.emplace_back("naive", naive_predict_panel(r, variances));
      for (const auto& [name, rh] : preds) {
        const auto rep = evaluate(rh, r, panel.tickers);
        grid_csv << ty << ',' << py << ',' << name << ',' << csv::format(rep.mean_fve) << ','
                 << csv::format(rep.mean_fve_rho2) << ',' << csv::format(rep.mean_fmse) << '\n';
        grid.push_back({{"train_year", ty},
                        {"predict_year", py},
                        {"predictor", name},
                        {"mean_fve", rep.mean_fve},
                        {"mean_fve_rho2", rep.mean_fve_rho2},
                        {"mean_fmse", rep.mean_fmse},
                        {"fve", rep.fve},
                        {"fve_rho2", rep.fve_rho2},
                        {"fmse", rep.fmse},
                        {"n_periods", rep.n_periods}});
      }
    }
  }
  ctx.write_json("report.json",
                 {{"tickers", panel.tickers}, {"ridge", ridges}, {"grid", grid}, {"refine", refine_info}});
}
}  // namespace

Command register_predict(CLI::App& root) {
  auto o = std::make_shared<PredictOpts>();
  auto* app = root.add_subcommand("predict", "Leave-one-out return prediction from measured correlations");
  app->add_option("--input", o->input, "Wide hourly panel CSV");
  app->add_option("--data-dir", o->data_dir, "Candle directory, instead of --input");
  app->add_option("--years", o->years, "Years to load from --data-dir");
  app->add_option("--clock-kind", o->clock_kind, "clock, dollar or volume")->capture_default_str();
  app->add_option("--train-year,--train-years", o->train_years, "Year(s) whose covariance gives the coefficients")
      ->required();
  app->add_option("--predict-years", o->predict_years, "Years to score (default: all)");
  app->add_option("--ridge", o->ridge, "Ridge added to the diagonal, or auto")->capture_default_str();
  app->add_option("--min-obs", o->min_obs, "Minimum overlapping returns per pair")->capture_default_str();
  app->add_flag("--refine", o->refine, "Refine coefficients by gradient descent, early-stopped on the other years");
  app->add_option("--learning-rate", o->learning_rate, "Refinement step size")->capture_default_str();
  app->add_option("--max-iterations", o->max_iterations, "Refinement iteration cap")->capture_default_str();
  app->add_option("--patience", o->patience, "Refinement early-stopping patience")->capture_default_str();
  return {app, [o](RunContext& ctx) { run_predict(*o, ctx); }};
}

}  // namespace hurstarb::cli
