#include <algorithm>
#include <cmath>

#include "hurstarb/error.hpp"
#include "hurstarb/variogram.hpp"
#include "options.hpp"

namespace hurstarb::cli {

namespace {
struct VarioOpts {
  std::string data_dir;
  int year = 0;
  std::string clock;
  std::string clock_kind = "dollar";
  std::string method = "diff_of_avg";
  std::string tau_grid = "default";
  double normalize_at = 1.0;
  double fit_min = 1.0;
  double fit_max = 200.0;
};

Variogram estimate(const std::string& method, const std::vector<TimedPrice>& pts, const std::vector<double>& grid) {
  if (method == "diff_of_avg") return variogram_diff_of_avg(pts, grid);
  if (method == "two_point") return variogram_two_point(pts, grid, TwoPointMode::GridPoints);
  return variogram_two_point(pts, grid, TwoPointMode::FullResolution);
}

void run_variogram(const VarioOpts& o, RunContext& ctx) {
  const auto grid = parse_tau_grid(o.tau_grid);
  const auto kind = parse_clock_kind(o.clock_kind);
  ctx.input_dir(o.data_dir);
  const auto yc = candles_in_year(load_candle_dir(o.data_dir), o.year);
  if (yc.empty()) throw DataError("no candles in " + std::to_string(o.year));
  const auto clock = year_clock(ctx, yc, o.year, o.clock, kind);

  nlohmann::json tickers = nlohmann::json::object();
  nlohmann::json excluded = nlohmann::json::array();
  std::vector<double> common = grid;
  std::vector<std::pair<std::string, Variogram>> normalized;
  for (const auto& s : yc) {
    const auto v = estimate(o.method, to_timed_prices(s, clock), grid);
    {
      auto out = ctx.output("tickers/" + s.ticker + ".csv");
      write_variogram_csv(out, v);
    }
    nlohmann::json info{{"n_tau", v.size()}, {"omitted_tau", v.omitted_tau}};
    try {
      const auto fit = fit_power_law(v, o.fit_min, o.fit_max);
      info["exponent"] = fit.exponent;
      info["epsilon"] = fit.epsilon();
    } catch (const std::exception&) {
      info["exponent"] = nullptr;
    }
    tickers[s.ticker] = info;
    Variogram scaled;
    try {
      const auto n = normalize_at(v, o.normalize_at);
      scaled.tau = n.tau;
      scaled.n_samples = n.n_samples;
      // V(tau)/tau relative to its value at the normalization point.
      for (std::size_t i = 0; i < n.size(); ++i) scaled.V.push_back(n.V[i] * o.normalize_at / n.tau[i]);
    } catch (const std::exception& e) {
      excluded.push_back({{"ticker", s.ticker}, {"reason", e.what()}});
      continue;
    }
    std::erase_if(common, [&](double t) { return std::find(scaled.tau.begin(), scaled.tau.end(), t) == scaled.tau.end(); });
    normalized.emplace_back(s.ticker, std::move(scaled));
  }
  if (normalized.empty()) throw DataError("no ticker could be normalized at tau = " + std::to_string(o.normalize_at));
  if (common.empty()) throw DataError("tickers share no tau grid point");

  std::vector<std::vector<double>> curves;
  for (const auto& [name, v] : normalized) {
    std::vector<double> c;
    for (double t : common) c.push_back(v.V[static_cast<std::size_t>(std::find(v.tau.begin(), v.tau.end(), t) - v.tau.begin())]);
    curves.push_back(std::move(c));
  }
  const auto pc = ensemble_percentiles(common, curves);
  {
    auto out = ctx.output("ensemble.csv");
    write_percentiles_csv(out, pc);
  }
  Variogram median;
  median.tau = common;
  const auto mid = static_cast<std::size_t>(std::find(pc.percentiles.begin(), pc.percentiles.end(), 50.0) - pc.percentiles.begin());
  for (std::size_t i = 0; i < common.size(); ++i) {
    median.V.push_back(pc.values[mid][i] * common[i]);
    median.n_samples.push_back(curves.size());
  }
  nlohmann::json summary{{"year", o.year},
                         {"method", o.method},
                         {"clock_kind", std::string(to_string(clock.kind()))},
                         {"normalize_at", o.normalize_at},
                         {"tickers", tickers},
                         {"excluded", excluded},
                         {"n_ensemble", normalized.size()}};
  try {
    const auto fit = fit_power_law(median, o.fit_min, o.fit_max);
    summary["median_exponent"] = fit.exponent;
    summary["median_epsilon"] = fit.epsilon();
  } catch (const std::exception&) {
    summary["median_exponent"] = nullptr;
  }
  ctx.write_json("summary.json", summary);
}
}  // namespace

Command register_variogram(CLI::App& root) {
  auto o = std::make_shared<VarioOpts>();
  auto* app = root.add_subcommand("variogram", "Per-ticker and ensemble variograms in transaction time");
  app->add_option("--data-dir", o->data_dir, "Directory of per-ticker candle CSVs")->required();
  app->add_option("--year", o->year, "Calendar year")->required();
  app->add_option("--clock", o->clock, "Clock map CSV (default: build from the data)");
  app->add_option("--clock-kind", o->clock_kind, "clock, dollar or volume")->capture_default_str();
  app->add_option("--method", o->method, "diff_of_avg, two_point or two_point_full")
      ->check(CLI::IsMember({"diff_of_avg", "two_point", "two_point_full"}))
      ->capture_default_str();
  app->add_option("--tau-grid", o->tau_grid, "lo:hi:per_decade, comma list, or default")->capture_default_str();
  app->add_option("--normalize-at", o->normalize_at, "Normalization point in hours")->capture_default_str();
  app->add_option("--fit-min", o->fit_min, "Power-law fit range start (hours)")->capture_default_str();
  app->add_option("--fit-max", o->fit_max, "Power-law fit range end (hours)")->capture_default_str();
  return {app, [o](RunContext& ctx) { run_variogram(*o, ctx); }};
}

}  // namespace hurstarb::cli
