#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncs/adversary.hpp"
#include "ncs/simulator.hpp"
#include "support.hpp"

using namespace ncs;

namespace {

std::vector<Vec> random_states(std::mt19937_64& rng, std::size_t n, std::size_t d = 2) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec> x(n, Vec(d));
  for (auto& v : x)
    for (auto& c : v) c = u(rng);
  return x;
}

}  // namespace

TEST(DeriveSwitching, ScheduleOnly) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  const auto sw = derive_switching(ncs, policy, AttackSignal::none(27), 27);
  ASSERT_EQ(sw.ids, (std::vector<int>{1, 2, 3, 4, 5}));
  for (std::size_t t = 0; t < 27; ++t) {
    EXPECT_EQ(sw.modes[2][t] == Mode::stable, t % 9 < 3) << t;  // plant 3 only in the first block
    EXPECT_EQ(sw.modes[0][t] == Mode::stable, t % 9 < 3 || t % 9 >= 6);
  }
}

TEST(DeriveSwitching, JammingForcesUnstable) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  auto s = AttackSignal::none(4);
  s.deactivated[0] = {1};
  const auto sw = derive_switching(ncs, policy, s, 4);
  EXPECT_EQ(sw.modes[0][0], Mode::unstable);
  EXPECT_EQ(sw.modes[2][0], Mode::stable);
  EXPECT_EQ(sw.modes[0][1], Mode::stable);

  s.deactivated[1] = {3};
  EXPECT_THROW(derive_switching(ncs, policy, s, 4), std::invalid_argument);
}

TEST(Simulate, ZeroStaysZero) {
  const auto ncs = test::example1();
  const auto tr = simulate(ncs, test::example1_policy(), sample_attack(test::example1_policy(), ncs.attack, 50, 3),
                           std::vector<Vec>(5, Vec{0, 0}), 50);
  for (const auto& n : tr.norms)
    for (double v : n) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, AlwaysScheduledIsPowerOfClosedLoop) {
  auto ncs = test::example1();
  const auto policy = build_policy({SlotVector{{1, 2, 3, 4, 5}}}, 1);
  const std::vector<Vec> x0{{1, 0}, {0, 1}, {1, 1}, {-1, 2}, {0.5, -0.5}};
  const auto tr = simulate(ncs, policy, AttackSignal::none(12), x0, 12);
  for (std::size_t i = 0; i < 5; ++i) {
    const Vec expect = mat_power(ncs.plants[i].closed_loop(), 12) * std::span<const double>(x0[i]);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(tr.states[i][12][j], expect[j], 1e-13);
  }
}

TEST(Simulate, LinearInInitialState) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = sample_attack(policy, ncs.attack, 60, rng());
    const auto a = random_states(rng, 5), b = random_states(rng, 5);
    const double ca = 0.7, cb = -1.3;
    std::vector<Vec> mix(5, Vec(2));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 2; ++j) mix[i][j] = ca * a[i][j] + cb * b[i][j];
    const auto ta = simulate(ncs, policy, s, a, 60), tb = simulate(ncs, policy, s, b, 60),
               tm = simulate(ncs, policy, s, mix, 60);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t t = 0; t <= 60; ++t)
        for (std::size_t j = 0; j < 2; ++j)
          EXPECT_NEAR(tm.states[i][t][j], ca * ta.states[i][t][j] + cb * tb.states[i][t][j], 1e-12);
  }
}

TEST(Simulate, ModeCountsMatchSchedule) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  const auto s = sample_attack(policy, ncs.attack, 90, 17);
  const auto sw = derive_switching(ncs, policy, s, 90);
  for (std::size_t i = 0; i < 5; ++i) {
    const int id = ncs.plants[i].id();
    std::size_t scheduled = 0, jammed = 0;
    for (std::size_t t = 0; t < 90; ++t) {
      scheduled += is_scheduled(policy, static_cast<std::int64_t>(t), id);
      jammed += s.jammed(t, id);
    }
    EXPECT_EQ(sw.stable_count(i, 0, 90), scheduled - jammed);
  }
}

TEST(Simulate, RejectsBadInput) {
  const auto ncs = test::example1();
  EXPECT_THROW(simulate(ncs, test::example1_policy(), AttackSignal::none(5), std::vector<Vec>(4, Vec{0, 0}), 5),
               std::invalid_argument);
  EXPECT_THROW(simulate(ncs, test::example1_policy(), AttackSignal::none(5), std::vector<Vec>(5, Vec{0}), 5),
               std::invalid_argument);
}

TEST(SegmentNormCheck, PassAndFail) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  const auto calm = AttackSignal::none(90);
  const auto ok = segment_norm_check(ncs, policy, calm, 1, 50.0, 0.05, 90);
  EXPECT_TRUE(ok.pass);
  EXPECT_EQ(ok.first_failure, 0u);

  // Plant 3 contracts to ~0.1 after its first block, then grows open loop.
  const auto bad = segment_norm_check(ncs, policy, calm, 3, 0.05, 0.05, 90);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.first_failure, 1u);
  EXPECT_GT(bad.worst_value, 0.05);
  EXPECT_THROW(segment_norm_check(ncs, policy, calm, 3, 0.0, 0.05, 90), std::invalid_argument);
}

TEST(SegmentNormCheck, BoundsTrajectories) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = sample_attack(policy, ncs.attack, 120, rng());
    const auto x0 = random_states(rng, 5);
    const auto tr = simulate(ncs, policy, s, x0, 120);
    for (int id = 1; id <= 5; ++id) {
      const double lambda = 1e-3;
      const auto chk = segment_norm_check(ncs, policy, s, id, 1.0, lambda, 120);
      const double c = chk.worst_value;  // smallest c that holds
      const auto& nr = tr.norms[static_cast<std::size_t>(id - 1)];
      for (std::size_t t = 1; t <= 120; ++t)
        EXPECT_LE(nr[t], c * std::exp(-lambda * static_cast<double>(t)) * nr[0] * (1 + 1e-12) + 1e-300);
    }
  }
}

TEST(PeriodMapRadius, PowerOfScheduleProduct) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  const auto maps = period_map_radius(ncs, policy, AttackSignal::none(9));
  ASSERT_EQ(maps.size(), 5u);
  const auto& p3 = ncs.plants[2];
  const Mat expect = mat_power(p3.open_loop(), 6) * mat_power(p3.closed_loop(), 3);
  EXPECT_LE(max_abs_diff(maps[2].product, expect), 1e-12);
  EXPECT_NEAR(maps[2].radius, spectral_radius(expect), 1e-12);
  for (const auto& m : maps) EXPECT_TRUE(m.contracts) << m.id;
}

TEST(PeriodMapRadius, RejectsBadWords) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  EXPECT_THROW(period_map_radius(ncs, policy, AttackSignal::none(8)), std::invalid_argument);
  auto w = AttackSignal::none(9);
  w.deactivated[0] = {1};
  w.deactivated[8] = {1};
  EXPECT_THROW(period_map_radius(ncs, policy, w), std::invalid_argument);
}

TEST(PeriodMapRadius, ExhaustiveOverPeriodicWords) {
  // Plant 4 sits in one block only; jamming it at t = 6 and 8 every period
  // leaves one closed-loop step per period and the period map expands.
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  AttackEnumerator en(policy, ncs.attack, 9, AttackEnumerator::default_budget, true);
  std::size_t words = 0;
  std::vector<double> worst(5, 0.0);
  while (auto w = en.next()) {
    for (const auto& m : period_map_radius(ncs, policy, *w)) {
      auto& v = worst[static_cast<std::size_t>(m.id - 1)];
      v = std::max(v, m.radius);
    }
    ++words;
  }
  EXPECT_EQ(static_cast<double>(words), static_cast<double>(en.emitted()));
  for (int id : {1, 2, 3, 5}) EXPECT_LT(worst[static_cast<std::size_t>(id - 1)], 1.0) << id;
  EXPECT_NEAR(worst[3], 1.6054, 1e-3);

  auto w = AttackSignal::none(9);
  w.deactivated[6] = {4};
  w.deactivated[8] = {4};
  const auto& p4 = ncs.plants[3];
  const Mat expect = p4.open_loop() * p4.closed_loop() * p4.open_loop() * mat_power(p4.open_loop(), 6);
  const auto maps = period_map_radius(ncs, policy, w);
  EXPECT_LE(max_abs_diff(maps[3].product, expect), 1e-12);
  EXPECT_FALSE(maps[3].contracts);
}

TEST(PeriodMapRadius, PeriodSampledNormsFollowRadius) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  auto w = AttackSignal::none(9);
  w.deactivated[6] = {4};
  w.deactivated[8] = {4};
  const auto maps = period_map_radius(ncs, policy, w);
  AttackSignal repeated;
  for (int rep = 0; rep < 20; ++rep)
    repeated.deactivated.insert(repeated.deactivated.end(), w.deactivated.begin(), w.deactivated.end());
  const std::vector<Vec> x0(5, Vec{0.3, -0.8});
  const auto tr = simulate(ncs, policy, repeated, x0, 180);
  for (std::size_t i = 0; i < 5; ++i) {
    // Past the transient, one period multiplies the norm by about the radius.
    const double late = tr.norms[i][180] / tr.norms[i][171];
    if (maps[i].contracts) {
      for (std::size_t q = 10; q < 20; ++q) EXPECT_LT(tr.norms[i][9 * (q + 1)], tr.norms[i][9 * q]) << i;
    } else {
      EXPECT_NEAR(late, maps[i].radius, 1e-6);
      EXPECT_GT(tr.norms[i][180], 1e3 * tr.norms[i][0]);
    }
  }
}

TEST(EstimateGes, GeometricDecay) {
  Trajectory tr;
  tr.ids = {1};
  tr.norms.assign(1, {});
  for (int t = 0; t <= 30; ++t) tr.norms[0].push_back(std::pow(0.5, t));
  const auto g = estimate_ges(std::span<const Trajectory>(&tr, 1));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].status, GesStatus::estimated);
  EXPECT_NEAR(g[0].lambda_hat, std::log(2.0), 1e-12);
  EXPECT_NEAR(g[0].c_hat, 1.0, 1e-12);
  EXPECT_TRUE(g[0].pass);
}

TEST(EstimateGes, GrowthAndZero) {
  Trajectory grow;
  grow.ids = {1, 2};
  grow.norms.assign(2, {});
  for (int t = 0; t <= 10; ++t) {
    grow.norms[0].push_back(std::pow(1.1, t));
    grow.norms[1].push_back(0.0);
  }
  const auto g = estimate_ges(std::span<const Trajectory>(&grow, 1));
  EXPECT_EQ(g[0].status, GesStatus::estimated);
  EXPECT_LT(g[0].lambda_hat, 0.0);
  EXPECT_FALSE(g[0].pass);
  EXPECT_EQ(g[1].status, GesStatus::undefined);
  EXPECT_FALSE(g[1].pass);
  EXPECT_THROW(estimate_ges({}), std::invalid_argument);
}

TEST(Protocol, SampleInstanceDecays) {
  const auto ncs = test::example1();
  const auto policy = test::example1_policy();
  std::mt19937_64 rng(2);
  std::vector<Trajectory> runs;
  for (int a = 0; a < 4; ++a) {
    const auto s = sample_attack(policy, ncs.attack, 200, rng());
    for (int l = 0; l < 4; ++l) {
      const auto tr = simulate(ncs, policy, s, random_states(rng, 5), 200);
      for (const auto& nr : tr.norms) EXPECT_LT(nr[200], 1e-6);
      runs.push_back(tr);
    }
  }
  for (const auto& g : estimate_ges(runs)) EXPECT_TRUE(g.pass) << g.id;
}
