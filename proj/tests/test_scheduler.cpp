#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ncs/certificate.hpp"
#include "ncs/scheduler.hpp"
#include "support.hpp"

using namespace ncs;

namespace {

std::set<int> S(std::initializer_list<int> ids) { return ids; }

}  // namespace

TEST(BuildCover, DefaultOrder) {
  const auto cover = build_cover(5, 2);
  ASSERT_EQ(cover.size(), 3u);
  EXPECT_EQ(cover[0].as_set(), S({1, 2}));
  EXPECT_EQ(cover[1].as_set(), S({3, 4}));
  EXPECT_EQ(cover[2].members, (std::vector<int>{5, 1}));
}

TEST(BuildCover, ExactDivision) {
  const auto cover = build_cover(4, 2);
  ASSERT_EQ(cover.size(), 2u);
  EXPECT_EQ(cover[0].as_set(), S({1, 2}));
  EXPECT_EQ(cover[1].as_set(), S({3, 4}));
}

TEST(BuildCover, PriorityReproducesWorkedExample) {
  const std::vector<int> order{1, 3, 2, 5, 4};
  const auto cover = build_cover(5, 2, order);
  ASSERT_EQ(cover.size(), 3u);
  EXPECT_EQ(cover[0].as_set(), S({1, 3}));
  EXPECT_EQ(cover[1].as_set(), S({2, 5}));
  EXPECT_EQ(cover[2].as_set(), S({1, 4}));
}

TEST(BuildCover, PriorityPicksFiller) {
  const std::vector<int> prio{4};
  const auto cover = build_cover(5, 2, prio);
  EXPECT_EQ(cover.back().members, (std::vector<int>{5, 4}));
}

TEST(BuildCover, Rejects) {
  EXPECT_THROW(build_cover(3, 3), std::invalid_argument);
  EXPECT_THROW(build_cover(3, 0), std::invalid_argument);
  const std::vector<int> bad{7};
  EXPECT_THROW(build_cover(5, 2, bad), std::invalid_argument);
  const std::vector<int> dup{1, 1};
  EXPECT_THROW(build_cover(5, 2, dup), std::invalid_argument);
}

TEST(BuildCover, StructuralInvariants) {
  std::mt19937_64 rng(9);
  for (int N = 2; N <= 14; ++N)
    for (int M = 1; M < N; ++M) {
      std::vector<int> prio;
      for (int id = 1; id <= N; ++id)
        if (rng() % 3 == 0) prio.push_back(id);
      std::shuffle(prio.begin(), prio.end(), rng);
      const auto cover = build_cover(N, M, prio);
      ASSERT_EQ(static_cast<int>(cover.size()), cover_count(N, M));
      std::map<int, int> uses;
      for (const auto& b : cover) {
        EXPECT_EQ(static_cast<int>(b.size()), M);
        EXPECT_EQ(b.as_set().size(), b.size());
        for (int id : b.members) ++uses[id];
      }
      EXPECT_EQ(static_cast<int>(uses.size()), N);
      const int rem = N - (N / M) * M;
      int twice = 0;
      for (auto [id, n] : uses) {
        EXPECT_GE(n, 1);
        EXPECT_LE(n, 2);
        twice += n == 2;
      }
      EXPECT_EQ(twice, rem == 0 ? 0 : M - rem) << "N=" << N << " M=" << M;
      EXPECT_EQ(cover, build_cover(N, M, prio));
    }
}

TEST(BuildPolicy, HoldAndPeriod) {
  const auto policy = test::example1_policy();
  EXPECT_EQ(policy.period(), 9);
  for (int t = 0; t < 3; ++t) EXPECT_EQ(policy_at(policy, t).as_set(), S({1, 3}));
  for (int t = 3; t < 6; ++t) EXPECT_EQ(policy_at(policy, t).as_set(), S({2, 5}));
  for (int t = 6; t < 9; ++t) EXPECT_EQ(policy_at(policy, t).as_set(), S({1, 4}));
  EXPECT_EQ(policy_at(policy, 9).as_set(), S({1, 3}));
  EXPECT_EQ(policy_at(policy, 5).as_set(), S({2, 5}));
  EXPECT_EQ(policy_at(policy, 1000), policy.blocks[0]);  // (1000 / 3) mod 3 = 333 mod 3 = 0

  const auto single = build_policy({SlotVector{{2}}}, 1);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(policy_at(single, t).members, std::vector<int>{2});

  const auto two = build_policy(build_cover(4, 2), 4);
  EXPECT_EQ(policy_at(two, 7), two.blocks[1]);
  EXPECT_EQ(policy_at(two, 8), two.blocks[0]);

  EXPECT_THROW(build_policy({}, 3), std::invalid_argument);
  EXPECT_THROW(build_policy(build_cover(4, 2), 0), std::invalid_argument);
}

TEST(BuildPolicy, PeriodicityAndCoverage) {
  for (int N = 3; N <= 9; ++N)
    for (int M = 1; M < N; ++M)
      for (int alpha = 1; alpha <= 4; ++alpha) {
        const auto policy = build_policy(build_cover(N, M), alpha);
        ASSERT_EQ(policy.period(), static_cast<std::int64_t>(cover_count(N, M)) * alpha);
        std::map<int, int> hits;
        for (std::int64_t t = 0; t < policy.period(); ++t) {
          EXPECT_EQ(policy_at(policy, t + policy.period()), policy_at(policy, t));
          for (int id : policy_at(policy, t).members) ++hits[id];
        }
        for (int id = 1; id <= N; ++id) EXPECT_GE(hits[id], alpha);
      }
}

TEST(CoverageGap, Values) {
  const auto policy = test::example1_policy();
  EXPECT_EQ(coverage_gap(policy, 3), 6);
  EXPECT_EQ(coverage_gap(policy, 1), 3);
  EXPECT_EQ(coverage_gap(policy, 2), 6);
  const auto always = build_policy({SlotVector{{1, 2}}}, 5);
  EXPECT_EQ(coverage_gap(always, 1), 0);
  EXPECT_THROW(coverage_gap(policy, 6), std::invalid_argument);
}

TEST(CoverageGap, MatchesDirectScan) {
  const auto policy = build_policy(build_cover(7, 2), 3);
  for (int id = 1; id <= 7; ++id) {
    std::int64_t best = 0, run = 0;
    for (std::int64_t t = 0; t < 2 * policy.period(); ++t) {
      run = is_scheduled(policy, t, id) ? 0 : run + 1;
      best = std::max(best, run);
    }
    EXPECT_EQ(coverage_gap(policy, id), best) << "id=" << id;
  }
}
