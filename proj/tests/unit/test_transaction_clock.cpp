#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hurstarb/error.hpp"
#include "hurstarb/transaction_clock.hpp"
#include "synthetic.hpp"

using namespace hurstarb;

namespace {
constexpr std::int64_t kJan1 = 1609459200;  // 2021-01-01T00:00:00Z
}

TEST_SUITE("transaction_clock") {
  TEST_CASE("calendar helpers") {
    CHECK(year_bounds(2021).first == kJan1);
    CHECK(year_bounds(2021).second == kJan1 + 365 * 86400);
    CHECK(hours_in_year(2021) == 8760.0);
    CHECK(hours_in_year(2020) == 8784.0);
    CHECK(year_of(kJan1) == 2021);
    CHECK(year_of(kJan1 - 1) == 2020);
  }

  TEST_CASE("parse clock kinds") {
    CHECK(parse_clock_kind("dollar") == ClockKind::DollarWeighted);
    CHECK(parse_clock_kind("vtw") == ClockKind::VolumeWeighted);
    CHECK(parse_clock_kind("clock") == ClockKind::Clock);
    CHECK_THROWS_AS(parse_clock_kind("bogus"), std::invalid_argument);
  }

  TEST_CASE("uniform trading gives the identity up to scaling") {
    const auto s = hurstarb::testing::constant_candles("U", kJan1, 365 * 1440, 1.0, 1.0);
    for (auto kind : {ClockKind::DollarWeighted, ClockKind::VolumeWeighted}) {
      const auto clock = build_clock(std::span(&s, 1), 2021, kind);
      for (double frac : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) {
        const double t = static_cast<double>(kJan1) + frac * 365 * 86400;
        CHECK(clock.to_txn_time(t) == doctest::Approx(frac * 8760.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("toy two-minute year with dollar weights 3 and 1") {
    const MinuteWeight w[] = {{kJan1, 3.0}, {kJan1 + 60, 1.0}};
    const auto clock = build_clock_from_weights(2021, ClockKind::DollarWeighted, kJan1, kJan1 + 120, 2.0, w);
    CHECK(clock.to_txn_time(kJan1 + 60) == doctest::Approx(1.5));
    CHECK(clock.to_txn_time(kJan1 + 120) == 2.0);
    CHECK(clock.to_txn_time(kJan1 + 30) == doctest::Approx(0.75));
  }

  TEST_CASE("dollar weight uses representative price times volume") {
    CandleSeries a{"A", {{kJan1, 2, 2, 2, 2, 1}, {kJan1 + 60, 1, 1, 1, 1, 2}}};
    const auto dollar = build_clock(std::span(&a, 1), 2021, ClockKind::DollarWeighted);
    const auto volume = build_clock(std::span(&a, 1), 2021, ClockKind::VolumeWeighted);
    CHECK(dollar.to_txn_time(kJan1 + 60) == doctest::Approx(8760.0 / 2));
    CHECK(volume.to_txn_time(kJan1 + 60) == doctest::Approx(8760.0 / 3));
  }

  TEST_CASE("clock kind is (t - start) / 3600") {
    const auto s = hurstarb::testing::constant_candles("U", kJan1 + 7200, 5, 1.0);
    const auto clock = build_clock(std::span(&s, 1), 2021, ClockKind::Clock);
    CHECK(clock.to_txn_time(kJan1) == 0.0);
    CHECK(clock.to_txn_time(kJan1 + 5400) == doctest::Approx(1.5));
    CHECK(clock.to_txn_time(static_cast<double>(year_bounds(2021).second)) == 8760.0);
  }

  TEST_CASE("boundaries, linearity and domain errors") {
    const ClockMap m(2021, ClockKind::VolumeWeighted, {{kJan1, 0.0}, {kJan1 + 100, 4.0}, {kJan1 + 300, 5.0}});
    CHECK(m.to_txn_time(kJan1) == 0.0);
    CHECK(m.to_txn_time(kJan1 + 300) == 5.0);
    CHECK(m.to_txn_time(kJan1 + 200) == doctest::Approx(4.5));
    CHECK_THROWS_AS(m.to_txn_time(kJan1 - 1), std::out_of_range);
    CHECK_THROWS_AS(m.to_txn_time(kJan1 + 301), std::out_of_range);
  }

  TEST_CASE("inverse map") {
    const ClockMap m(2021, ClockKind::VolumeWeighted,
                     {{kJan1, 0.0}, {kJan1 + 100, 4.0}, {kJan1 + 200, 4.0}, {kJan1 + 300, 5.0}});
    CHECK(m.to_clock_time(0.0) == kJan1);
    for (double x : {0.5, 3.99, 4.25, 4.9}) CHECK(m.to_txn_time(m.to_clock_time(x)) == doctest::Approx(x));
    CHECK(m.to_clock_time(4.0) == kJan1 + 100);  // earliest point of the flat span
    CHECK_THROWS_AS(m.to_clock_time(-0.1), std::out_of_range);
    CHECK_THROWS_AS(m.to_clock_time(5.1), std::out_of_range);
  }

  TEST_CASE("normalization, monotonicity and weight proportionality on random data") {
    auto corpus = hurstarb::testing::factor_corpus(3, kJan1 + 86400, 3000, 0.3, 1e-4, 9, 0.6);
    const auto clock = build_clock(corpus, 2021, ClockKind::DollarWeighted);
    CHECK(clock.to_txn_time(static_cast<double>(year_bounds(2021).second)) == 8760.0);
    double prev = -1.0;
    for (std::int64_t t = kJan1; t <= kJan1 + 2 * 86400; t += 97) {
      const double v = clock.to_txn_time(static_cast<double>(t));
      CHECK(v >= prev);
      prev = v;
    }
    // Ratio of elapsed transaction time equals the ratio of summed weights.
    auto weight = [&](std::int64_t a, std::int64_t b) {
      double w = 0.0;
      for (const auto& s : corpus)
        for (const auto& c : s.candles)
          if (c.timestamp >= a && c.timestamp < b) w += representative_price(c) * c.volume;
      return w;
    };
    const std::int64_t a0 = kJan1 + 86400 + 600, a1 = a0 + 1800, b0 = a1 + 3000, b1 = b0 + 600;
    const double r_txn = (clock.to_txn_time(a1) - clock.to_txn_time(a0)) / (clock.to_txn_time(b1) - clock.to_txn_time(b0));
    CHECK(r_txn == doctest::Approx(weight(a0, a1) / weight(b0, b1)).epsilon(1e-9));
  }

  TEST_CASE("leap year normalizes to 8784") {
    const auto s = hurstarb::testing::constant_candles("L", year_bounds(2020).first + 3600, 100, 3.0, 5.0);
    const auto clock = build_clock(std::span(&s, 1), 2020, ClockKind::VolumeWeighted);
    CHECK(clock.total_txn_hours() == 8784.0);
  }

  TEST_CASE("errors") {
    std::vector<CandleSeries> none;
    CHECK_THROWS_AS(build_clock(none, 2021, ClockKind::DollarWeighted), DataError);
    const auto zero = hurstarb::testing::constant_candles("Z", kJan1, 10, 1.0, 0.0);
    CHECK_THROWS_AS(build_clock(std::span(&zero, 1), 2021, ClockKind::VolumeWeighted), DataError);
  }

  TEST_CASE("csv round trip") {
    const ClockMap m(2021, ClockKind::VolumeWeighted, {{kJan1, 0.0}, {kJan1 + 100, 4.25}, {kJan1 + 300, 5.0}});
    std::stringstream ss;
    write_clock_csv(ss, m);
    CHECK(ss.str().rfind("clock_unix,txn_hours\n", 0) == 0);
    const auto back = read_clock_csv(ss, 2021, ClockKind::VolumeWeighted);
    REQUIRE(back.knots().size() == 3);
    CHECK(back.knots()[1].txn_hours == 4.25);
  }
}
