#pragma once

// Switched-system replay of (policy, attack) and the empirical GES checks.
// Each plant evolves as x(t+1) = A_s x(t) when scheduled and not jammed, and
// x(t+1) = A_u x(t) otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncs/adversary.hpp"
#include "ncs/matrix.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"

namespace ncs {

enum class Mode : unsigned char { stable, unstable };

struct SwitchingSignal {
  std::vector<int> ids;                 // plant ids, one row per plant
  std::vector<std::vector<Mode>> modes;  // modes[i][t]

  std::size_t stable_count(std::size_t plant_index, std::size_t from, std::size_t to) const {
    std::size_t c = 0;
    for (std::size_t t = from; t < to; ++t) c += modes[plant_index][t] == Mode::stable ? 1 : 0;
    return c;
  }
};

// Instants beyond the attack signal's horizon count as unattacked.
inline SwitchingSignal derive_switching(const SchedulingPolicy& policy, const AttackSignal& signal,
                                        const AttackParams& attack, std::span<const int> ids, std::size_t horizon) {
  if (auto adm = is_admissible(signal, policy, attack); !adm) {
    throw std::invalid_argument("derive_switching: inadmissible attack: " + adm.reason);
  }
  SwitchingSignal sw;
  sw.ids.assign(ids.begin(), ids.end());
  sw.modes.assign(ids.size(), std::vector<Mode>(horizon, Mode::unstable));
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& block = policy_at(policy, static_cast<std::int64_t>(t));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (block.contains(ids[i]) && !signal.jammed(t, ids[i])) sw.modes[i][t] = Mode::stable;
    }
  }
  return sw;
}

inline SwitchingSignal derive_switching(const NcsInstance& ncs, const SchedulingPolicy& policy,
                                        const AttackSignal& signal, std::size_t horizon) {
  std::vector<int> ids;
  for (const auto& p : ncs.plants) ids.push_back(p.id());
  return derive_switching(policy, signal, ncs.attack, ids, horizon);
}

struct Trajectory {
  std::vector<int> ids;
  std::vector<std::vector<Vec>> states;  // states[i][t], t = 0..horizon
  std::vector<std::vector<double>> norms;

  std::size_t horizon() const { return states.empty() ? 0 : states.front().size() - 1; }
};

inline Trajectory simulate(const NcsInstance& ncs, const SchedulingPolicy& policy, const AttackSignal& signal,
                           std::span<const Vec> initial_states, std::size_t horizon) {
  const auto N = ncs.plants.size();
  if (initial_states.size() != N) {
    throw std::invalid_argument("simulate: expected " + std::to_string(N) + " initial states, got " +
                                std::to_string(initial_states.size()));
  }
  const auto sw = derive_switching(ncs, policy, signal, horizon);
  Trajectory tr;
  tr.ids = sw.ids;
  tr.states.resize(N);
  tr.norms.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& p = ncs.plants[i];
    if (initial_states[i].size() != p.state_dim()) {
      throw std::invalid_argument("simulate: plant " + std::to_string(p.id()) + " state has dimension " +
                                  std::to_string(initial_states[i].size()) + ", expected " +
                                  std::to_string(p.state_dim()));
    }
    const Mat As = p.closed_loop();
    const Mat& Au = p.open_loop();
    auto& xs = tr.states[i];
    xs.reserve(horizon + 1);
    xs.push_back(initial_states[i]);
    for (std::size_t t = 0; t < horizon; ++t) {
      xs.push_back((sw.modes[i][t] == Mode::stable ? As : Au) * xs.back());
    }
    tr.norms[i].reserve(xs.size());
    for (const auto& x : xs) tr.norms[i].push_back(norm2(x));
  }
  return tr;
}

struct SegmentCheck {
  bool pass = true;
  std::size_t worst_t = 0;      // argmax of ||W(t)|| e^{lambda t}
  double worst_value = 0.0;     // max of ||W(t)|| e^{lambda t}
  std::size_t first_failure = 0;  // 0 when pass
};

// Initial-segment products W(t) = A_{sigma(t-1)} ... A_{sigma(0)} for
// t = 1..horizon, checked against ||W(t)|| <= c e^{-lambda t}. Products are not
// renormalised.
inline SegmentCheck segment_norm_check(const NcsInstance& ncs, const SchedulingPolicy& policy,
                                       const AttackSignal& signal, int plant_id, double c, double lambda,
                                       std::size_t horizon) {
  if (!(c > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("segment_norm_check: c and lambda must be positive");
  const auto& p = ncs.plant(plant_id);
  const std::vector<int> ids{plant_id};
  const auto sw = derive_switching(policy, signal, ncs.attack, ids, horizon);
  const Mat As = p.closed_loop();
  const Mat& Au = p.open_loop();
  Mat W = Mat::identity(p.state_dim());
  SegmentCheck out;
  out.worst_value = -1.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    W = (sw.modes[0][t - 1] == Mode::stable ? As : Au) * W;
    const double n = spectral_norm(W);
    const double scaled = n * std::exp(lambda * static_cast<double>(t));
    if (scaled > out.worst_value) {
      out.worst_value = scaled;
      out.worst_t = t;
    }
    if (out.pass && n > c * std::exp(-lambda * static_cast<double>(t))) {
      out.pass = false;
      out.first_failure = t;
    }
  }
  if (out.worst_value < 0.0) out.worst_value = 0.0;
  return out;
}

struct PeriodMap {
  int id = 0;
  Mat product;
  double radius = 0.0;
  bool contracts = false;
};

// Spectral radius of the one-period product for a periodic attack word.
inline std::vector<PeriodMap> period_map_radius(const NcsInstance& ncs, const SchedulingPolicy& policy,
                                                const AttackSignal& word) {
  if (static_cast<std::int64_t>(word.horizon()) != policy.period()) {
    throw std::invalid_argument("period_map_radius: attack word length " + std::to_string(word.horizon()) +
                                " != policy period " + std::to_string(policy.period()));
  }
  if (auto adm = is_admissible_periodic(word, policy, ncs.attack); !adm) {
    throw std::invalid_argument("period_map_radius: periodic attack inadmissible: " + adm.reason);
  }
  const auto sw = derive_switching(ncs, policy, word, word.horizon());
  std::vector<PeriodMap> out;
  for (std::size_t i = 0; i < ncs.plants.size(); ++i) {
    const auto& p = ncs.plants[i];
    const Mat As = p.closed_loop();
    Mat W = Mat::identity(p.state_dim());
    for (std::size_t t = 0; t < word.horizon(); ++t) W = (sw.modes[i][t] == Mode::stable ? As : p.open_loop()) * W;
    PeriodMap pm;
    pm.id = p.id();
    pm.radius = spectral_radius(W);
    pm.contracts = pm.radius < 1.0;
    pm.product = std::move(W);
    out.push_back(std::move(pm));
  }
  return out;
}

enum class GesStatus { estimated, undefined };

struct GesEstimate {
  int id = 0;
  GesStatus status = GesStatus::undefined;
  double c_hat = 0.0;
  double lambda_hat = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

// Empirical decay fit per plant, pooled over runs: lambda_hat is the
// least-squares slope of -log(||x(t)|| / ||x(0)||) against t on instants above
// the 1e-12 relative floor; c_hat is the smallest constant that makes
// c_hat e^{-lambda_hat t} dominate every sample.
inline std::vector<GesEstimate> estimate_ges(std::span<const Trajectory> runs) {
  if (runs.empty()) throw std::invalid_argument("estimate_ges: no trajectories");
  const auto& ids = runs.front().ids;
  std::vector<GesEstimate> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    GesEstimate g;
    g.id = ids[i];
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t n = 0;
    for (const auto& run : runs) {
      if (run.ids != ids) throw std::invalid_argument("estimate_ges: runs cover different plants");
      const auto& nr = run.norms[i];
      if (nr.empty() || nr[0] == 0.0) continue;
      for (std::size_t t = 0; t < nr.size(); ++t) {
        if (!(nr[t] > 1e-12 * nr[0])) continue;
        const double x = static_cast<double>(t);
        const double y = -std::log(nr[t] / nr[0]);
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
        ++n;
      }
    }
    g.samples = n;
    const double denom = static_cast<double>(n) * stt - st * st;
    if (n >= 2 && denom > 0.0) {
      g.status = GesStatus::estimated;
      g.lambda_hat = (static_cast<double>(n) * sty - st * sy) / denom;
      for (const auto& run : runs) {
        const auto& nr = run.norms[i];
        if (nr.empty() || nr[0] == 0.0) continue;
        for (std::size_t t = 0; t < nr.size(); ++t) {
          g.c_hat = std::max(g.c_hat, nr[t] * std::exp(g.lambda_hat * static_cast<double>(t)) / nr[0]);
        }
      }
      g.pass = g.lambda_hat > 0.0;
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace ncs
