#pragma once

// Shared fixtures and brute-force oracles for the test suites. Nothing here
// calls into the code paths it is used to check.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ncs/matrix.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"

#ifndef NCS_SOURCE_DIR
#define NCS_SOURCE_DIR "."
#endif

namespace ncs::test {

inline NcsInstance example1() {
  NcsInstance ncs;
  ncs.M = 2;
  ncs.attack = AttackParams(1, 2);
  ncs.plants.emplace_back(1, Mat{{-0.1340, -0.0076}, {-0.0503, -1.0821}}, Mat{{0}, {1}}, Mat{{0.0441, 0.9277}});
  ncs.plants.emplace_back(2, Mat{{-0.0107, 0.0052}, {0.4219, 1.0993}}, Mat{{0}, {1}}, Mat{{-0.3613, -0.9434}});
  ncs.plants.emplace_back(3, Mat{{0.6505, 0.4401}, {0.6510, 0.4197}}, Mat{{1}, {1}}, Mat{{-0.5968, -0.3945}});
  ncs.plants.emplace_back(4, Mat{{-1.3188, -0.1959}, {0.0008, -0.0244}}, Mat{{1}, {0}}, Mat{{1.1431, 0.1705}});
  ncs.plants.emplace_back(5, Mat{{-1.0079, -0.0455}, {0.0266, 0.6821}}, Mat{{1}, {0}}, Mat{{0.8605, 0.0201}});
  return ncs;
}

// Cover {1,3}, {2,5}, {4,1} for the sample instance, held 3 instants.
inline SchedulingPolicy example1_policy() {
  return SchedulingPolicy{{SlotVector{{1, 3}}, SlotVector{{2, 5}}, SlotVector{{4, 1}}}, 3};
}

inline std::string example1_path() { return std::string(NCS_SOURCE_DIR) + "/data/example1.json"; }

inline Mat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat A(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) A(i, j) = u(rng);
  return A;
}

// Naive O(k) recount of every trailing window.
inline bool naive_window_ok(const std::vector<bool>& attacked, int m, int k) {
  for (std::size_t t = 0; t < attacked.size(); ++t) {
    int c = 0;
    for (std::size_t u = (t + 1 >= static_cast<std::size_t>(k) ? t + 1 - k : 0); u <= t; ++u) c += attacked[u] ? 1 : 0;
    if (c > m) return false;
  }
  return true;
}

// Visits every binary attack-instant word of length n (true = attacked) in
// which every k-window holds at most m attacks. Plain backtracking.
inline void for_each_firm_word(int n, int m, int k, const std::function<void(const std::vector<bool>&)>& visit) {
  std::vector<bool> w;
  std::function<void()> rec = [&] {
    if (static_cast<int>(w.size()) == n) {
      visit(w);
      return;
    }
    for (bool b : {false, true}) {
      w.push_back(b);
      int c = 0;
      const int len = static_cast<int>(w.size());
      for (int u = std::max(0, len - k); u < len; ++u) c += w[u] ? 1 : 0;
      if (c <= m) rec();
      w.pop_back();
    }
  };
  rec();
}

}  // namespace ncs::test
