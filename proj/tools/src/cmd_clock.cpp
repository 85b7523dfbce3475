#include "hurstarb/market_data.hpp"
#include "options.hpp"

namespace hurstarb::cli {

namespace {
struct ClockOpts {
  std::string data_dir;
  int year = 0;
  std::string kind = "dollar";
};
}  // namespace

Command register_clock(CLI::App& root) {
  auto o = std::make_shared<ClockOpts>();
  auto* app = root.add_subcommand("clock", "Build a transaction-time clock map from candle data");
  app->add_option("--data-dir", o->data_dir, "Directory of per-ticker candle CSVs")->required();
  app->add_option("--year", o->year, "Calendar year")->required();
  app->add_option("--kind", o->kind, "clock, dollar or volume")->capture_default_str();
  return {app, [o](RunContext& ctx) {
            const auto kind = parse_clock_kind(o->kind);
            ctx.input_dir(o->data_dir);
            const auto yc = candles_in_year(load_candle_dir(o->data_dir), o->year);
            const auto clock = year_clock(ctx, yc, o->year, {}, kind);
            auto out = ctx.output("clock.csv");
            write_clock_csv(out, clock);
          }};
}

}  // namespace hurstarb::cli
