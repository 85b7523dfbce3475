#include <cmath>

#include "hurstarb/covariance.hpp"
#include "hurstarb/error.hpp"
#include "hurstarb/hurst_process.hpp"
#include "options.hpp"

namespace hurstarb::cli {

namespace {
struct SimOpts {
  std::string model = "fbm";
  double epsilon = 0.0;
  int years = 1;
  int hours_per_year = 8760;
  double vol = 0.15;
  std::uint64_t seed = 1;
  std::string method = "fft";
  double delta = 1.0 / 3600.0;
  double lambda = 50.0;
  double sigma = 1.0;
  int tickers = 2;
  double rho = 0.5;
  double corr_scale = 1.0;
  double uncorr_scale = 1.0;
};

// Independent-model panel: price paths of one ticker, one row per year.
void simulate_single(const SimOpts& o, RunContext& ctx) {
  HurstParams hp;
  hp.epsilon = o.epsilon;
  hp.delta = o.delta;
  hp.lambda = o.lambda;
  hp.sigma = o.sigma;
  SimConfig c;
  c.n_years = o.years;
  c.hours_per_year = o.hours_per_year;
  c.target_vol = o.vol;
  c.seed = o.seed;
  c.method = parse_sim_method(o.method);
  const auto panel = simulate(hp, c);
  auto out = ctx.output("panel.csv");
  write_panel_csv(out, panel);
}

// Correlated random walks plus independent long-memory parts, scaled so the
// hourly return volatility annualizes to --vol.
void simulate_two_component(const SimOpts& o, RunContext& ctx) {
  if (o.tickers < 2) throw std::invalid_argument("--tickers must be at least 2");
  if (o.years < 1 || o.hours_per_year < 4) throw std::invalid_argument("--years and --hours-per-year too small");
  if (!(o.vol > 0.0)) throw std::invalid_argument("--vol must be positive");
  HurstParams check;
  check.epsilon = o.epsilon;
  check.delta = o.delta;
  check.validate();
  TwoComponentPathConfig cfg;
  cfg.n_tickers = static_cast<std::size_t>(o.tickers);
  cfg.n_steps = static_cast<std::size_t>(o.years) * static_cast<std::size_t>(o.hours_per_year);
  cfg.rho = o.rho;
  cfg.corr_scale = o.corr_scale;
  cfg.uncorr_scale = o.uncorr_scale;
  cfg.epsilon = o.epsilon;
  cfg.delta = o.delta;
  cfg.seed = o.seed;
  Eigen::MatrixXd lp = simulate_two_component_paths(cfg);
  const Eigen::Index T = lp.rows();
  const Eigen::MatrixXd r = lp.bottomRows(T - 1) - lp.topRows(T - 1);
  const double sd = std::sqrt(r.array().square().mean());
  if (!(sd > 0.0)) throw NumericalError("two-component panel has zero variance");
  lp *= o.vol / std::sqrt(static_cast<double>(o.hours_per_year)) / sd;
  HourlyPanel p;
  for (int k = 0; k < o.tickers; ++k) p.tickers.push_back("S" + std::to_string(1000 + k).substr(1));
  for (int y = 0; y < o.years; ++y) {
    p.years.push_back(y);
    p.year_start_row.push_back(static_cast<std::int64_t>(y) * o.hours_per_year);
  }
  p.prices = lp.array().exp().matrix();
  auto out = ctx.output("panel.csv");
  write_hourly_panel_csv(out, p);
}
}  // namespace

Command register_simulate(CLI::App& root) {
  auto o = std::make_shared<SimOpts>();
  auto* app = root.add_subcommand("simulate", "Simulate long-memory price panels");
  app->add_option("--model", o->model, "fbm (one ticker, year,hour,price) or two-component (wide panel)")
      ->check(CLI::IsMember({"fbm", "two-component"}))
      ->capture_default_str();
  app->add_option("--epsilon", o->epsilon, "Long-memory exponent; Hurst = 1/2 - epsilon")->capture_default_str();
  app->add_option("--years", o->years, "Number of years")->capture_default_str();
  app->add_option("--hours-per-year", o->hours_per_year, "Transaction hours per year")->capture_default_str();
  app->add_option("--vol", o->vol, "Target standard deviation of log prices (fbm) or annualized return vol")
      ->capture_default_str();
  app->add_option("--seed", o->seed, "Random seed")->capture_default_str();
  app->add_option("--method", o->method, "fft or shot")->capture_default_str();
  app->add_option("--delta", o->delta, "Impulse-response cutoff in hours")->capture_default_str();
  app->add_option("--lambda", o->lambda, "Shot-noise event rate per hour")->capture_default_str();
  app->add_option("--sigma", o->sigma, "Shot-noise amplitude standard deviation")->capture_default_str();
  app->add_option("--tickers", o->tickers, "two-component: number of tickers")->capture_default_str();
  app->add_option("--rho", o->rho, "two-component: latent correlation")->capture_default_str();
  app->add_option("--corr-scale", o->corr_scale, "two-component: weight of the correlated walk")->capture_default_str();
  app->add_option("--uncorr-scale", o->uncorr_scale, "two-component: weight of the long-memory part")
      ->capture_default_str();
  return {app, [o](RunContext& ctx) {
            ctx.set_seed(o->seed);
            if (o->model == "fbm") simulate_single(*o, ctx);
            else simulate_two_component(*o, ctx);
          }};
}

}  // namespace hurstarb::cli
