#pragma once

// Periodic round-robin schedule: cover {1..N} with r blocks of M plants, then
// hold each block for alpha instants, cycling forever.

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncs {

struct SlotVector {
  std::vector<int> members;  // insertion order, distinct

  bool contains(int id) const { return std::find(members.begin(), members.end(), id) != members.end(); }
  std::set<int> as_set() const { return {members.begin(), members.end()}; }
  std::size_t size() const { return members.size(); }

  friend bool operator==(const SlotVector&, const SlotVector&) = default;
};

struct SchedulingPolicy {
  std::vector<SlotVector> blocks;
  int hold = 1;

  int r() const { return static_cast<int>(blocks.size()); }
  std::int64_t period() const { return static_cast<std::int64_t>(hold) * r(); }

  friend bool operator==(const SchedulingPolicy&, const SchedulingPolicy&) = default;
};

// Ids are taken in pick order (priority entries first, then the remaining ids
// ascending). Full blocks consume fresh ids; the last block, if short, is
// topped up with already-covered ids, again in pick order.
inline std::vector<SlotVector> build_cover(int N, int M, std::span<const int> priority = {}) {
  if (M <= 0 || M >= N) {
    throw std::invalid_argument("build_cover: 0 < M < N required (M=" + std::to_string(M) + ", N=" + std::to_string(N) + ")");
  }
  std::vector<int> order;
  std::vector<bool> seen(N + 1, false);
  for (int id : priority) {
    if (id < 1 || id > N) throw std::invalid_argument("build_cover: priority id " + std::to_string(id) + " outside 1..N");
    if (seen[id]) throw std::invalid_argument("build_cover: priority id " + std::to_string(id) + " repeated");
    seen[id] = true;
    order.push_back(id);
  }
  for (int id = 1; id <= N; ++id)
    if (!seen[id]) order.push_back(id);

  std::vector<SlotVector> cover;
  std::vector<bool> covered(N + 1, false);
  std::size_t next = 0;
  while (next < order.size()) {
    SlotVector v;
    const std::size_t remaining = order.size() - next;
    if (remaining >= static_cast<std::size_t>(M)) {
      for (int j = 0; j < M; ++j) v.members.push_back(order[next++]);
    } else {
      std::vector<int> fresh(order.begin() + static_cast<std::ptrdiff_t>(next), order.end());
      next = order.size();
      v.members = fresh;
      for (int id : order) {
        if (v.members.size() == static_cast<std::size_t>(M)) break;
        if (covered[id]) v.members.push_back(id);
      }
    }
    for (int id : v.members) covered[id] = true;
    cover.push_back(std::move(v));
  }
  return cover;
}

inline SchedulingPolicy build_policy(std::vector<SlotVector> cover, int alpha) {
  if (cover.empty()) throw std::invalid_argument("build_policy: empty cover");
  if (alpha < 1) throw std::invalid_argument("build_policy: hold must be >= 1");
  return SchedulingPolicy{std::move(cover), alpha};
}

inline const SlotVector& policy_at(const SchedulingPolicy& policy, std::int64_t t) {
  return policy.blocks[static_cast<std::size_t>((t / policy.hold) % policy.r())];
}

inline bool is_scheduled(const SchedulingPolicy& policy, std::int64_t t, int id) {
  return policy_at(policy, t).contains(id);
}

// Longest cyclic run of unscheduled instants for a plant.
inline std::int64_t coverage_gap(const SchedulingPolicy& policy, int id) {
  bool known = false;
  for (const auto& b : policy.blocks) known = known || b.contains(id);
  if (!known) throw std::invalid_argument("coverage_gap: plant " + std::to_string(id) + " is never scheduled");
  const int r = policy.r();
  int best = 0;
  int run = 0;
  // Two passes over the blocks catch runs that wrap around the period.
  for (int q = 0; q < 2 * r; ++q) {
    if (policy.blocks[q % r].contains(id)) {
      run = 0;
    } else {
      best = std::max(best, ++run);
    }
  }
  return static_cast<std::int64_t>(std::min(best, r)) * policy.hold;
}

}  // namespace ncs
