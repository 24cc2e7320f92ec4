#include <gtest/gtest.h>

#include <cmath>

#include "firecast/error.hpp"
#include "firecast/resample.hpp"
#include "firecast/synthgen.hpp"
#include "oracles.hpp"

using namespace firecast;

namespace {

int count(const Mask& m) {
  int n = 0;
  for (auto v : m.data()) n += v;
  return n;
}

FireSimParams point_fire(int px, double p, int burn_days, std::uint64_t seed = 1) {
  FireSimParams sp;
  sp.grid_px = px;
  sp.ignitions = {{px / 2, px / 2, 0}};
  sp.p_spread = p;
  sp.burn_days = burn_days;
  sp.seed = seed;
  return sp;
}

const GeoGrid kGrid = make_grid(112, -44, 154, -10, 0.75);

}  // namespace

TEST(Simulate, NoSpreadBurnsOutAfterBurnDays) {
  FireHistory h = simulate_fire(point_fire(64, 0.0, 3), 6);
  ASSERT_EQ(h.days.size(), 6u);
  for (int d = 0; d < 3; ++d) {
    EXPECT_EQ(count(h.days[d]), 1) << d;
    EXPECT_EQ(h.days[d].at(32, 32), 1);
    EXPECT_EQ(h.age(d, 32, 32), d);
  }
  for (int d = 3; d < 6; ++d) EXPECT_EQ(count(h.days[d]), 0) << d;
  EXPECT_DOUBLE_EQ(h.intensity(0, 32, 32), 1.0);
  EXPECT_DOUBLE_EQ(h.intensity(2, 32, 32), 1.0 / 3);
}

TEST(Simulate, FullSpreadIsChebyshevBall) {
  FireSimParams sp = point_fire(48, 1.0, kBurnForever);
  sp.ignitions = {{10, 7, 0}};
  FireHistory h = simulate_fire(sp, 20);
  // Reference: step-by-step 8-neighbour dilation.
  Mask ref(1, 48, 48, 0);
  ref.at(7, 10) = 1;
  for (int d = 0; d < 20; ++d) {
    if (d > 0) {
      Mask next = ref;
      for (int r = 0; r < 48; ++r)
        for (int c = 0; c < 48; ++c)
          for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
              int rr = r + dr, cc = c + dc;
              if (rr >= 0 && cc >= 0 && rr < 48 && cc < 48 && ref.at(rr, cc)) next.at(r, c) = 1;
            }
      ref = next;
    }
    ASSERT_EQ(h.days[d], ref) << "day " << d;
    for (int r = 0; r < 48; ++r)
      for (int c = 0; c < 48; ++c)
        ASSERT_EQ(h.days[d].at(r, c), oracle::chebyshev(7, 10, r, c) <= d ? 1 : 0);
  }
}

TEST(Simulate, DeterministicAndSeedSensitive) {
  FireSimParams sp = point_fire(64, 0.3, 4, 9);
  sp.wind_east = 0.2;
  FireHistory a = simulate_fire(sp, 12);
  FireHistory b = simulate_fire(sp, 12);
  EXPECT_EQ(a.days, b.days);
  sp.seed = 10;
  EXPECT_NE(simulate_fire(sp, 12).days, a.days);
}

TEST(Simulate, CumulativeBurnedAreaMonotone) {
  FireSimParams sp = point_fire(64, 0.25, kBurnForever, 3);
  FireHistory h = simulate_fire(sp, 15);
  for (std::size_t d = 1; d < h.days.size(); ++d)
    for (std::size_t i = 0; i < h.days[d].size(); ++i)
      if (h.days[d - 1].data()[i]) ASSERT_TRUE(h.days[d].data()[i]);
}

TEST(Simulate, WindPushesDownwind) {
  FireSimParams sp = point_fire(96, 0.1, kBurnForever, 5);
  sp.wind_east = 0.4;
  FireHistory h = simulate_fire(sp, 15);
  long east = 0, west = 0;
  for (int r = 0; r < 96; ++r)
    for (int c = 0; c < 96; ++c) {
      if (!h.days.back().at(r, c)) continue;
      if (c > 48) ++east;
      if (c < 48) ++west;
    }
  EXPECT_GT(east, 2 * west);
}

TEST(Simulate, InvalidIgnition) {
  FireSimParams sp = point_fire(64, 0.1, 2);
  sp.ignitions = {{64, 0, 0}};
  try {
    simulate_fire(sp, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_ignition);
  }
  sp.ignitions = {{0, 0, -1}};
  EXPECT_THROW(simulate_fire(sp, 3), Error);
}

namespace {

FireHistory block_truth(int px, std::uint64_t seed) {
  FireSimParams sp = point_fire(px, 0.35, 3, seed);
  sp.origin = {20, 10};
  sp.ignitions = {{px / 3, px / 3, 0}, {2 * px / 3, px / 2, 1}};
  return simulate_fire(sp, 8);
}

}  // namespace

TEST(Observe, PerfectSensorReproducesTruth) {
  FireHistory h = block_truth(192, 4);
  const Date start = Date::from_ymd(2019, 11, 1);
  for (int day : {2, 5, 7}) {
    Swath s = observe(h, coherent_viirs(), kGrid, {20, 10}, day, DayNight::DAY, start, 77);
    validate_swath(s);
    PatchRaster p = nn_resample(s, fire_mask_band(kViirs), kGrid, {20, 10}, 1.0);
    ASSERT_EQ(p.size, 192);
    EXPECT_EQ(p.date, start + day);
    for (int r = 0; r < 192; ++r)
      for (int c = 0; c < 192; ++c)
        ASSERT_EQ(is_fire_value(p.at(0, r, c)), h.days[day].at(r, c) == 1) << r << "," << c;
  }
}

TEST(Observe, ZeroDetectionProbabilityIsEmpty) {
  FireHistory h = block_truth(192, 4);
  Swath s = observe(h, stochastic_modis(0.0), kGrid, {20, 10}, 6, DayNight::NIGHT,
                    Date::from_ymd(2019, 11, 1), 5);
  for (auto c : s.bands[0].classes) ASSERT_FALSE(is_fire(c));
  EXPECT_EQ(s.bands[0].spec.kind, BandKind::FIREMASK);
  EXPECT_EQ(s.n_pixels, 64u * 64u);
}

TEST(Observe, StochasticDetectionRate) {
  FireSimParams sp;
  sp.grid_px = 64;
  sp.p_spread = 0;
  sp.burn_days = kBurnForever;
  for (int i = 0; i < 1000; ++i) sp.ignitions.push_back({i % 64, i / 64, 0});
  FireHistory h = simulate_fire(sp, 1);
  ASSERT_EQ(count(h.days[0]), 1000);
  Swath s = observe(h, stochastic_modis(0.5), kGrid, {0, 0}, 0, DayNight::DAY,
                    Date::from_ymd(2019, 11, 1), 2024);
  int detected = 0;
  for (auto c : s.bands[0].classes) detected += is_fire(c);
  EXPECT_NEAR(detected, 500, 3 * std::sqrt(250.0));
}

TEST(Observe, StochasticIsThinningOfCoherent) {
  FireHistory h = block_truth(64, 8);
  SensorModel coherent = coherent_viirs();
  coherent.resolution = ResolutionClass::RC_1KM;
  SensorModel thin = coherent;
  thin.mode = ObservationMode::STOCHASTIC;
  thin.detect_prob = 0.5;
  const Date start = Date::from_ymd(2019, 11, 1);
  for (int day = 0; day < 8; ++day) {
    Swath a = observe(h, coherent, kGrid, {20, 10}, day, DayNight::DAY, start, 31);
    Swath b = observe(h, thin, kGrid, {20, 10}, day, DayNight::DAY, start, 31);
    for (std::uint32_t i = 0; i < a.n_pixels; ++i)
      if (is_fire(b.bands[0].classes[i])) ASSERT_TRUE(is_fire(a.bands[0].classes[i]));
  }
}

TEST(Observe, DeterministicInSeed) {
  FireHistory h = block_truth(192, 4);
  const Date start = Date::from_ymd(2019, 11, 1);
  SensorModel m = stochastic_modis();
  m.jitter_px = 0.3;
  Swath a = observe(h, m, kGrid, {20, 10}, 4, DayNight::DAY, start, 11);
  Swath b = observe(h, m, kGrid, {20, 10}, 4, DayNight::DAY, start, 11);
  EXPECT_TRUE(bitwise_equal(a, b));
  Swath c = observe(h, m, kGrid, {20, 10}, 4, DayNight::DAY, start, 12);
  EXPECT_FALSE(bitwise_equal(a, c));
}

TEST(Campaign, CoversCellsDaysAndOverpasses) {
  CampaignConfig cfg;
  cfg.n_days = 4;
  cfg.n_cells = 2;
  cfg.grid_px = 64;
  Campaign c = generate_campaign(cfg, kGrid);
  EXPECT_EQ(c.cells.size(), 2u);
  EXPECT_EQ(c.swaths.size(), 2u * 4 * 2 * 2);
  for (const auto& s : c.swaths) validate_swath(s);
  EXPECT_FALSE(c.geodetic.empty());
  Campaign again = generate_campaign(cfg, kGrid);
  ASSERT_EQ(again.swaths.size(), c.swaths.size());
  for (std::size_t i = 0; i < c.swaths.size(); ++i) EXPECT_TRUE(bitwise_equal(c.swaths[i], again.swaths[i]));
}
