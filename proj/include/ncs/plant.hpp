#pragma once

// Plant, network and attack description of a networked control system with
// N plants sharing M slots under (m,k)-firm jamming.

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncs/matrix.hpp"

namespace ncs {

// x(t+1) = A x(t) + B u(t), u(t) = K x(t). The input dimension is called p
// (B is d x p, K is p x d).
class PlantModel {
 public:
  PlantModel(int id, Mat A, Mat B, Mat K) : id_(id), A_(std::move(A)), B_(std::move(B)), K_(std::move(K)) {
    const std::string who = "plant " + std::to_string(id_);
    if (A_.empty() || !A_.is_square()) throw std::invalid_argument(who + ": A must be square and non-empty, got " + A_.shape_str());
    if (B_.rows() != A_.rows() || B_.cols() == 0) {
      throw std::invalid_argument(who + ": B must be " + std::to_string(A_.rows()) + "xp, got " + B_.shape_str());
    }
    if (K_.rows() != B_.cols() || K_.cols() != A_.rows()) {
      throw std::invalid_argument(who + ": K must be " + std::to_string(B_.cols()) + "x" + std::to_string(A_.rows()) +
                                  ", got " + K_.shape_str());
    }
  }

  int id() const { return id_; }
  std::size_t state_dim() const { return A_.rows(); }
  std::size_t input_dim() const { return B_.cols(); }
  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }
  const Mat& K() const { return K_; }

  // Stable mode A + BK (scheduled and not jammed).
  Mat closed_loop() const { return A_ + B_ * K_; }
  // Unstable mode A (unscheduled or jammed).
  const Mat& open_loop() const { return A_; }

  // E = A_s A_u - A_u A_s.
  Mat commutator() const {
    const Mat As = closed_loop();
    return As * A_ - A_ * As;
  }

 private:
  int id_;
  Mat A_, B_, K_;
};

inline Mat closed_loop(const PlantModel& p) { return p.closed_loop(); }
inline Mat commutator(const PlantModel& p) { return p.commutator(); }

struct AttackParams {
  int m = 1;
  int k = 2;

  AttackParams() = default;
  AttackParams(int m_, int k_) : m(m_), k(k_) {
    if (m < 1) throw std::invalid_argument("attack: m must be >= 1, got " + std::to_string(m));
    if (k <= m) throw std::invalid_argument("attack: m < k required, got m=" + std::to_string(m) + " k=" + std::to_string(k));
  }
};

struct NcsInstance {
  std::vector<PlantModel> plants;
  int M = 1;
  AttackParams attack;

  int N() const { return static_cast<int>(plants.size()); }

  const PlantModel& plant(int id) const {
    for (const auto& p : plants)
      if (p.id() == id) return p;
    throw std::out_of_range("no plant with id " + std::to_string(id));
  }
};

struct Violation {
  std::string subject;  // "plant 3", "M", "attack", "ids"
  std::string clause;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Every broken invariant of the instance, in a stable order: network, attack,
// ids, then plants in list order.
inline std::vector<Violation> validate_instance(const NcsInstance& ncs) {
  std::vector<Violation> out;
  const int N = ncs.N();
  if (ncs.M <= 0) out.push_back({"M", "M > 0 required"});
  if (ncs.M >= N) out.push_back({"M", "M < N required (M=" + std::to_string(ncs.M) + ", N=" + std::to_string(N) + ")"});
  if (ncs.attack.m < 1) out.push_back({"attack", "m >= 1 required"});
  if (ncs.attack.m >= ncs.attack.k) out.push_back({"attack", "m < k required"});

  std::set<int> ids;
  for (const auto& p : ncs.plants) {
    if (!ids.insert(p.id()).second) out.push_back({"ids", "duplicate plant id " + std::to_string(p.id())});
  }
  for (int id : ids) {
    if (id < 1 || id > N) out.push_back({"ids", "plant id " + std::to_string(id) + " outside 1.." + std::to_string(N)});
  }

  for (const auto& p : ncs.plants) {
    const std::string who = "plant " + std::to_string(p.id());
    if (!is_schur(p.closed_loop())) out.push_back({who, "closed loop not Schur (A + BK must be Schur stable)"});
    if (is_schur(p.open_loop())) out.push_back({who, "open loop is Schur (A must be unstable)"});
  }
  return out;
}

inline std::string describe(const std::vector<Violation>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += "; ";
    s += v.subject + ": " + v.clause;
  }
  return s;
}

class InvalidInstance : public std::invalid_argument {
 public:
  explicit InvalidInstance(std::vector<Violation> vs)
      : std::invalid_argument("invalid instance: " + describe(vs)), violations_(std::move(vs)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline void require_valid(const NcsInstance& ncs) {
  auto vs = validate_instance(ncs);
  if (!vs.empty()) throw InvalidInstance(std::move(vs));
}

}  // namespace ncs
