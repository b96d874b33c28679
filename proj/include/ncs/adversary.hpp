#pragma once

// (m,k)-firm jamming signals: at most m attacked instants in every k
// consecutive instants, where an instant is attacked when at least one
// scheduled plant has its control input zeroed.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncs/matrix.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"

namespace ncs {

struct AttackSignal {
  // deactivated[t]: sorted ids jammed at t; empty means no attack at t.
  std::vector<std::vector<int>> deactivated;

  static AttackSignal none(std::size_t horizon) { return AttackSignal{std::vector<std::vector<int>>(horizon)}; }

  std::size_t horizon() const { return deactivated.size(); }
  bool attacked(std::size_t t) const { return t < deactivated.size() && !deactivated[t].empty(); }
  bool jammed(std::size_t t, int id) const {
    if (t >= deactivated.size()) return false;
    const auto& d = deactivated[t];
    return std::find(d.begin(), d.end(), id) != d.end();
  }
  std::size_t attack_count() const {
    std::size_t c = 0;
    for (std::size_t t = 0; t < horizon(); ++t) c += attacked(t) ? 1 : 0;
    return c;
  }

  friend bool operator==(const AttackSignal&, const AttackSignal&) = default;
};

struct Admissibility {
  bool admissible = true;
  std::int64_t instant = -1;       // earliest offending instant
  std::int64_t window_start = -1;  // for window violations: start of the k-window ending at `instant`
  std::string reason;

  explicit operator bool() const { return admissible; }
};

// Sliding-window check with a running counter. Windows near t = 0 are the
// truncated ones [0, t], which are sub-windows of some full k-window.
inline Admissibility is_admissible(const AttackSignal& signal, const SchedulingPolicy& policy,
                                   const AttackParams& attack) {
  std::int64_t in_window = 0;
  const auto k = static_cast<std::int64_t>(attack.k);
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(signal.horizon()); ++t) {
    const auto& d = signal.deactivated[static_cast<std::size_t>(t)];
    const auto& scheduled = policy_at(policy, t);
    if (d.size() > scheduled.size()) {
      return {false, t, -1, "more than M plants jammed at t=" + std::to_string(t)};
    }
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (!scheduled.contains(d[j])) {
        return {false, t, -1, "plant " + std::to_string(d[j]) + " jammed at t=" + std::to_string(t) + " but not scheduled"};
      }
      if (j > 0 && d[j] <= d[j - 1]) return {false, t, -1, "jammed ids at t=" + std::to_string(t) + " not sorted/distinct"};
    }
    if (t >= k && signal.attacked(static_cast<std::size_t>(t - k))) --in_window;
    if (!d.empty()) ++in_window;
    if (in_window > attack.m) {
      const auto start = std::max<std::int64_t>(0, t - k + 1);
      return {false, t, start,
              "window [" + std::to_string(start) + "," + std::to_string(t) + "] has " + std::to_string(in_window) +
                  " attacked instants > m=" + std::to_string(attack.m)};
    }
  }
  return {};
}

// The word repeated forever: every window, including those wrapping past the
// end of the word, must be admissible. The word must span whole periods.
inline Admissibility is_admissible_periodic(const AttackSignal& word, const SchedulingPolicy& policy,
                                            const AttackParams& attack) {
  const auto n = word.horizon();
  if (n == 0) return {};
  if (static_cast<std::int64_t>(n) % policy.period() != 0) {
    return {false, 0, -1, "periodic word length " + std::to_string(n) + " is not a multiple of the policy period"};
  }
  AttackSignal unrolled;
  const std::size_t total = n + static_cast<std::size_t>(attack.k) - 1;
  unrolled.deactivated.reserve(total);
  for (std::size_t t = 0; t < total; ++t) unrolled.deactivated.push_back(word.deactivated[t % n]);
  auto res = is_admissible(unrolled, policy, attack);
  if (!res && res.instant >= static_cast<std::int64_t>(n)) res.reason += " (wrap-around)";
  return res;
}

// Number of admissible signals over [0, horizon). Dynamic programme over the
// attack flags of the last k-1 instants; returned as a double because the
// count grows exponentially.
inline double count_attacks(const SchedulingPolicy& policy, const AttackParams& attack, std::size_t horizon) {
  if (attack.k > 25) return std::numeric_limits<double>::infinity();
  const std::uint32_t states = 1u << (attack.k - 1);
  const std::uint32_t mask = states - 1;
  std::vector<double> cur(states, 0.0), nxt(states, 0.0);
  cur[0] = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const double choices = std::ldexp(1.0, static_cast<int>(policy_at(policy, static_cast<std::int64_t>(t)).size())) - 1.0;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::uint32_t s = 0; s < states; ++s) {
      if (cur[s] == 0.0) continue;
      nxt[(s << 1) & mask] += cur[s];
      if (std::popcount(s) < attack.m) nxt[((s << 1) | 1u) & mask] += cur[s] * choices;
    }
    cur.swap(nxt);
  }
  double total = 0.0;
  for (double c : cur) total += c;
  return total;
}

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(double count)
      : std::runtime_error("enumeration budget exceeded: " + std::to_string(count) + " admissible signals"),
        count_(count) {}
  double count() const { return count_; }

 private:
  double count_;
};

// Pull-based enumeration of every admissible signal in lexicographic order.
// Per instant the choices are ordered: no attack, then the nonempty subsets of
// the scheduled block by bitmask (bit j = j-th member). With `periodic` set
// only words whose periodic extension is admissible are produced.
class AttackEnumerator {
 public:
  static constexpr double default_budget = 1e7;

  AttackEnumerator(SchedulingPolicy policy, AttackParams attack, std::size_t horizon,
                   double budget = default_budget, bool periodic = false)
      : policy_(std::move(policy)), attack_(attack), horizon_(horizon), periodic_(periodic) {
    if (horizon_ == 0) throw std::invalid_argument("AttackEnumerator: horizon must be >= 1");
    if (periodic_ && static_cast<std::int64_t>(horizon_) % policy_.period() != 0) {
      throw std::invalid_argument("AttackEnumerator: periodic horizon must be a multiple of the policy period");
    }
    estimate_ = count_attacks(policy_, attack_, horizon_);
    if (estimate_ > budget) throw BudgetExceeded(estimate_);
    choice_.assign(horizon_, 0);
    max_choice_.resize(horizon_);
    for (std::size_t t = 0; t < horizon_; ++t) {
      max_choice_[t] = (1u << policy_at(policy_, static_cast<std::int64_t>(t)).size()) - 1u;
    }
  }

  // Admissible-signal count of the linear (non-wrapped) problem; an upper
  // bound when periodic.
  double estimated_count() const { return estimate_; }

  std::optional<AttackSignal> next() {
    while (true) {
      if (done_) return std::nullopt;
      if (!started_) {
        started_ = true;
      } else if (!advance()) {
        done_ = true;
        return std::nullopt;
      }
      AttackSignal s = current();
      if (!periodic_ || is_admissible_periodic(s, policy_, attack_)) {
        ++emitted_;
        return s;
      }
    }
  }

  std::uint64_t emitted() const { return emitted_; }

 private:
  bool attack_allowed(std::size_t t) const {
    int c = 0;
    const std::size_t lo = t + 1 >= static_cast<std::size_t>(attack_.k) ? t + 1 - attack_.k : 0;
    for (std::size_t u = lo; u < t; ++u) c += choice_[u] != 0 ? 1 : 0;
    return c < attack_.m;
  }

  bool advance() {
    std::size_t t = horizon_ - 1;
    while (true) {
      if (choice_[t] == 0 && !attack_allowed(t)) {
        // no attack possible here; carry
      } else if (choice_[t] < max_choice_[t]) {
        ++choice_[t];
        std::fill(choice_.begin() + static_cast<std::ptrdiff_t>(t) + 1, choice_.end(), 0u);
        return true;
      }
      choice_[t] = 0;
      if (t == 0) return false;
      --t;
    }
  }

  AttackSignal current() const {
    AttackSignal s = AttackSignal::none(horizon_);
    for (std::size_t t = 0; t < horizon_; ++t) {
      if (choice_[t] == 0) continue;
      const auto& block = policy_at(policy_, static_cast<std::int64_t>(t)).members;
      for (std::size_t j = 0; j < block.size(); ++j)
        if (choice_[t] & (1u << j)) s.deactivated[t].push_back(block[j]);
      std::sort(s.deactivated[t].begin(), s.deactivated[t].end());
    }
    return s;
  }

  SchedulingPolicy policy_;
  AttackParams attack_;
  std::size_t horizon_;
  bool periodic_;
  double estimate_ = 0.0;
  std::vector<std::uint32_t> choice_;
  std::vector<std::uint32_t> max_choice_;
  bool started_ = false;
  bool done_ = false;
  std::uint64_t emitted_ = 0;
};

// Seeded random admissible signal: whenever the trailing window leaves room,
// a fair coin decides whether to attack, and an attack jams a uniformly chosen
// nonempty subset of the scheduled block.
inline AttackSignal sample_attack(const SchedulingPolicy& policy, const AttackParams& attack, std::size_t horizon,
                                  std::uint64_t seed) {
  if (horizon == 0) throw std::invalid_argument("sample_attack: horizon must be >= 1");
  std::mt19937_64 rng(seed);
  AttackSignal s = AttackSignal::none(horizon);
  std::deque<bool> recent;  // last k-1 instants
  int recent_attacks = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    bool attack_now = false;
    if (recent_attacks < attack.m) attack_now = (rng() >> 63) != 0;
    if (attack_now) {
      const auto& block = policy_at(policy, static_cast<std::int64_t>(t)).members;
      const std::uint64_t subsets = (std::uint64_t{1} << block.size()) - 1;
      const std::uint64_t mask = 1 + rng() % subsets;
      for (std::size_t j = 0; j < block.size(); ++j)
        if (mask & (std::uint64_t{1} << j)) s.deactivated[t].push_back(block[j]);
      std::sort(s.deactivated[t].begin(), s.deactivated[t].end());
    }
    recent.push_back(attack_now);
    recent_attacks += attack_now ? 1 : 0;
    if (recent.size() > static_cast<std::size_t>(attack.k - 1)) {
      recent_attacks -= recent.front() ? 1 : 0;
      recent.pop_front();
    }
  }
  return s;
}

// One-step lookahead jammer: at every instant it picks the admissible
// deactivation set maximising sum_i ||x_i(t+1)||^2 for the current states.
// Ties go to the lexicographically smallest set (the empty set first).
// A heuristic stress signal, not the exact worst case.
inline AttackSignal greedy_adversary(const NcsInstance& ncs, const SchedulingPolicy& policy,
                                     std::span<const Vec> initial_states, std::size_t horizon) {
  if (initial_states.size() != ncs.plants.size()) {
    throw std::invalid_argument("greedy_adversary: one initial state per plant required");
  }
  std::vector<Mat> As, Au;
  std::vector<Vec> x(initial_states.begin(), initial_states.end());
  for (std::size_t i = 0; i < ncs.plants.size(); ++i) {
    As.push_back(ncs.plants[i].closed_loop());
    Au.push_back(ncs.plants[i].open_loop());
    if (x[i].size() != ncs.plants[i].state_dim()) throw std::invalid_argument("greedy_adversary: state dimension mismatch");
  }

  AttackSignal s = AttackSignal::none(horizon);
  std::deque<bool> recent;
  int recent_attacks = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& block = policy_at(policy, static_cast<std::int64_t>(t));
    std::vector<std::vector<int>> candidates{{}};
    if (recent_attacks < ncs.attack.m) {
      std::vector<int> sorted = block.members;
      std::sort(sorted.begin(), sorted.end());
      for (std::uint32_t mask = 1; mask < (1u << sorted.size()); ++mask) {
        std::vector<int> c;
        for (std::size_t j = 0; j < sorted.size(); ++j)
          if (mask & (1u << j)) c.push_back(sorted[j]);
        candidates.push_back(std::move(c));
      }
      std::sort(candidates.begin(), candidates.end());
    }

    // Per plant, the two possible next states; the objective is then a sum of
    // precomputed squared norms.
    std::vector<Vec> next_s(x.size()), next_u(x.size());
    std::vector<double> ns(x.size()), nu(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      next_s[i] = As[i] * x[i];
      next_u[i] = Au[i] * x[i];
      ns[i] = norm2(next_s[i]);
      nu[i] = norm2(next_u[i]);
    }
    auto objective = [&](const std::vector<int>& jam) {
      double total = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const int id = ncs.plants[i].id();
        const bool stable = block.contains(id) && std::find(jam.begin(), jam.end(), id) == jam.end();
        total += stable ? ns[i] * ns[i] : nu[i] * nu[i];
      }
      return total;
    };
    std::size_t best = 0;
    double best_val = objective(candidates[0]);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const double v = objective(candidates[c]);
      if (v > best_val) {
        best_val = v;
        best = c;
      }
    }
    s.deactivated[t] = candidates[best];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int id = ncs.plants[i].id();
      const bool stable = block.contains(id) && !s.jammed(t, id);
      x[i] = stable ? next_s[i] : next_u[i];
    }
    const bool attacked = !s.deactivated[t].empty();
    recent.push_back(attacked);
    recent_attacks += attacked ? 1 : 0;
    if (recent.size() > static_cast<std::size_t>(ncs.attack.k - 1)) {
      recent_attacks -= recent.front() ? 1 : 0;
      recent.pop_front();
    }
  }
  return s;
}

}  // namespace ncs
