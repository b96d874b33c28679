#pragma once

// Stability certificate for periodic schedules under (m,k)-firm jamming.
//
// A contraction pair (delta, rho) says delta consecutive stable steps shrink
// every plant by rho. From it follow the schedule block length alpha, the cover
// count r and the exponents zeta, eta that bound how much the non-commuting
// part of (A_s, A_u) can undo that contraction. check_theorem evaluates the
// three sufficient conditions per plant; max_epsilon inverts the last one.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncs/matrix.hpp"
#include "ncs/plant.hpp"

namespace ncs {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContractionPair {
  int delta = 1;
  double rho = 0.5;
};

struct DerivedQuantities {
  int r = 1;
  int alpha = 1;
  int zeta = 0;
  std::int64_t eta = 0;

  friend bool operator==(const DerivedQuantities&, const DerivedQuantities&) = default;
};

// Number of M-subsets needed to cover N plants: ceil(N / M).
inline int cover_count(int N, int M) {
  if (M <= 0 || N <= 0) throw std::invalid_argument("cover_count: N, M must be positive");
  return N % M == 0 ? N / M : N / M + 1;
}

// Upper bound on the scheduled instants needed for delta un-jammed ones:
// (floor(delta/m) + 1)(k - m) + delta.
inline int lemma1_bound(int delta, const AttackParams& attack) {
  if (delta < 1) throw std::invalid_argument("lemma1_bound: delta must be >= 1");
  if (attack.m < 1 || attack.m >= attack.k) throw std::invalid_argument("lemma1_bound: 1 <= m < k required");
  return (delta / attack.m + 1) * (attack.k - attack.m) + delta;
}

// Exact worst case: the smallest T such that every (m,k)-admissible word of
// length T has at least delta clean instants. The adversary front-loads m
// attacks per k-window, so at most m*floor(T/k) + min(m, T mod k) attacks fit.
inline int min_unjammed_horizon(int delta, const AttackParams& attack) {
  if (delta < 0) throw std::invalid_argument("min_unjammed_horizon: delta must be >= 0");
  if (attack.m < 1 || attack.m >= attack.k) throw std::invalid_argument("min_unjammed_horizon: 1 <= m < k required");
  int T = 0;
  while (true) {
    const int attacks = attack.m * (T / attack.k) + std::min(attack.m, T % attack.k);
    if (T - attacks >= delta) return T;
    ++T;
  }
}

// alpha, zeta and eta for a given cover count r.
inline DerivedQuantities derived_from_cover(int r, const AttackParams& attack, int delta) {
  const int m = attack.m, k = attack.k;
  if (r < 1) throw std::invalid_argument("derived quantities: r must be >= 1");
  if (m < 1 || m >= k) throw std::invalid_argument("derived quantities: 1 <= m < k required");
  if (delta < m) {
    throw std::invalid_argument("derived quantities: delta >= m required (delta=" + std::to_string(delta) +
                                ", m=" + std::to_string(m) + ")");
  }
  DerivedQuantities q;
  q.r = r;
  q.alpha = lemma1_bound(delta, attack);
  q.zeta = r * q.alpha - delta - 1;
  const std::int64_t fl = delta / m;
  const std::int64_t tail = (r - 1) * static_cast<std::int64_t>(q.alpha);
  q.eta = m * (fl * (fl + 1) / 2 * (k - m) + tail) + (delta - fl * m) * ((fl + 1) * (k - m) + tail);
  return q;
}

inline DerivedQuantities derived_quantities(int N, int M, const AttackParams& attack, int delta) {
  if (M <= 0 || M >= N) throw std::invalid_argument("derived quantities: 0 < M < N required");
  return derived_from_cover(cover_count(N, M), attack, delta);
}

// Smallest delta >= m with max_i ||A_{i,s}^delta|| <= rho_target. Without a
// target, the smallest delta with that max below 1 is used and rho is the max.
inline ContractionPair find_contraction(const NcsInstance& ncs, std::optional<double> rho_target, int delta_cap) {
  if (ncs.plants.empty()) throw std::invalid_argument("find_contraction: no plants");
  if (rho_target && !(*rho_target > 0.0 && *rho_target < 1.0)) {
    throw std::invalid_argument("find_contraction: rho must lie in (0, 1)");
  }
  std::vector<Mat> As;
  std::vector<Mat> powers;
  for (const auto& p : ncs.plants) {
    As.push_back(p.closed_loop());
    powers.push_back(mat_power(As.back(), static_cast<unsigned>(std::max(ncs.attack.m, 1) - 1)));
  }
  for (int delta = std::max(ncs.attack.m, 1); delta <= delta_cap; ++delta) {
    double worst = 0.0;
    for (std::size_t i = 0; i < As.size(); ++i) {
      powers[i] = powers[i] * As[i];
      worst = std::max(worst, spectral_norm(powers[i]));
    }
    if (rho_target ? worst <= *rho_target : worst < 1.0) {
      return {delta, rho_target ? *rho_target : worst};
    }
  }
  std::ostringstream msg;
  msg << "no delta <= " << delta_cap << " achieves rho_target";
  if (rho_target) msg << " = " << *rho_target;
  throw CertificateError(msg.str());
}

// Largest lambda keeping rho e^{lambda delta} < 1 is -ln(rho)/delta; the
// default is a small fraction of it.
inline double default_lambda(const ContractionPair& c) { return 1e-4 * (-std::log(c.rho) / c.delta); }

struct PlantVerdict {
  int id = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double norm_As = 0.0;
  double norm_Au = 0.0;
  double norm_E = 0.0;
  double cond1_value = 0.0;
  double cond3_lhs = 0.0;
  bool cond1 = false;
  bool cond2 = false;
  bool cond3 = false;
  bool pass = false;

  double margin() const { return 1.0 - cond3_lhs; }
};

struct CertificateReport {
  ContractionPair contraction;
  DerivedQuantities derived;
  int worst_case_horizon = 0;     // min_unjammed_horizon(delta)
  bool alpha_covers_worst_case = true;
  std::vector<PlantVerdict> per_plant;

  bool all_pass() const {
    for (const auto& v : per_plant)
      if (!v.pass) return false;
    return true;
  }
};

// Combined left-hand side rho e^{lambda delta} + eta ||A_s||^{delta-1} ||A_u||^zeta eps e^{lambda r alpha}.
inline double combined_condition(double norm_As, double norm_Au, double rho, double lambda, double epsilon, int delta,
                                 const DerivedQuantities& q) {
  const double c1 = rho * std::exp(lambda * delta);
  return c1 + static_cast<double>(q.eta) * std::pow(norm_As, delta - 1) * std::pow(norm_Au, q.zeta) * epsilon *
                  std::exp(lambda * q.r * q.alpha);
}

inline CertificateReport check_theorem(const NcsInstance& ncs, const ContractionPair& contraction,
                                       std::span<const double> lambdas, std::span<const double> epsilons) {
  const auto N = ncs.plants.size();
  if (lambdas.size() != N || epsilons.size() != N) {
    throw std::invalid_argument("check_theorem: expected " + std::to_string(N) + " lambdas and epsilons, got " +
                                std::to_string(lambdas.size()) + " and " + std::to_string(epsilons.size()));
  }
  CertificateReport rep;
  rep.contraction = contraction;
  rep.derived = derived_quantities(ncs.N(), ncs.M, ncs.attack, contraction.delta);
  rep.worst_case_horizon = min_unjammed_horizon(contraction.delta, ncs.attack);
  rep.alpha_covers_worst_case = rep.derived.alpha >= rep.worst_case_horizon;

  for (std::size_t i = 0; i < N; ++i) {
    const auto& p = ncs.plants[i];
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("check_theorem: lambda must be positive");
    if (!(epsilons[i] >= 0.0)) throw std::invalid_argument("check_theorem: epsilon must be nonnegative");
    PlantVerdict v;
    v.id = p.id();
    v.lambda = lambdas[i];
    v.epsilon = epsilons[i];
    v.norm_As = spectral_norm(p.closed_loop());
    v.norm_Au = spectral_norm(p.open_loop());
    v.norm_E = spectral_norm(p.commutator());
    v.cond1_value = contraction.rho * std::exp(v.lambda * contraction.delta);
    v.cond3_lhs =
        combined_condition(v.norm_As, v.norm_Au, contraction.rho, v.lambda, v.epsilon, contraction.delta, rep.derived);
    v.cond1 = v.cond1_value < 1.0;
    v.cond2 = v.norm_E <= v.epsilon;
    v.cond3 = v.cond3_lhs <= 1.0;
    v.pass = v.cond1 && v.cond2 && v.cond3;
    rep.per_plant.push_back(v);
  }
  return rep;
}

// Largest epsilon meeting the combined condition with equality.
inline double max_epsilon(double norm_As, double norm_Au, double rho, double lambda, int delta,
                          const DerivedQuantities& q) {
  const double c1 = rho * std::exp(lambda * delta);
  if (!(c1 < 1.0)) throw CertificateError("condition 1 violated: rho e^{lambda delta} >= 1");
  const double denom = static_cast<double>(q.eta) * std::pow(norm_As, delta - 1) * std::pow(norm_Au, q.zeta) *
                       std::exp(lambda * q.r * q.alpha);
  return (1.0 - c1) / denom;
}

struct SweepGrid {
  std::vector<int> deltas;
  std::vector<int> rs;
  std::vector<int> ms;
  std::vector<int> ks;
  double norm_As = 0.9;
  double norm_Au = 1.1;
  double rho = 0.9;
  double lambda = 1e-5;

  std::size_t size() const { return deltas.size() * rs.size() * ms.size() * ks.size(); }
};

struct SweepRow {
  int delta = 0;
  int r = 0;
  int m = 0;
  int k = 0;
  double eps_max = 0.0;
  bool feasible = false;
};

// Rows in grid order: delta outermost, then r, m, k.
inline std::vector<SweepRow> epsilon_sweep(const SweepGrid& g) {
  if (g.size() == 0) throw std::invalid_argument("epsilon_sweep: empty grid");
  std::vector<SweepRow> rows;
  rows.reserve(g.size());
  for (int delta : g.deltas)
    for (int r : g.rs)
      for (int m : g.ms)
        for (int k : g.ks) {
          SweepRow row{delta, r, m, k, 0.0, false};
          const bool ok = m >= 1 && m < k && delta >= m && r >= 1 && g.rho * std::exp(g.lambda * delta) < 1.0;
          if (ok) {
            const auto q = derived_from_cover(r, AttackParams{m, k}, delta);
            row.eps_max = max_epsilon(g.norm_As, g.norm_Au, g.rho, g.lambda, delta, q);
            row.feasible = true;
          }
          rows.push_back(row);
        }
  return rows;
}

}  // namespace ncs
