#pragma once

// File formats.
//
//   instance  JSON  {"plants": [{"id", "A", "B", "K"}], "M", "attack": {"m", "k"}}
//                   matrices are row lists of decimals
//   policy    JSON  {"blocks": [[ids]...], "hold", "period"}
//   report    JSON  certificate / GES reports
//   attack    CSV   t,deactivated_ids      ids space-separated, empty = no attack
//   schedule  CSV   t,scheduled_ids
//   trajectory CSV  t,plant_id,norm,x1..xd
//   sweep     CSV   delta,r,m,k,eps_max,feasible

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncs/adversary.hpp"
#include "ncs/certificate.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"
#include "ncs/simulator.hpp"

namespace ncs::io {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip representation.
inline std::string fmt(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(ids[i]);
  }
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot write");
  out << content;
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

inline int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where + ": expected an integer");
  return j.get<int>();
}

inline Mat as_mat(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw FormatError(where + ": expected a nonempty list of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<double> data;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) throw FormatError(rw + ": expected a nonempty row");
    if (r == 0) cols = row.size();
    if (row.size() != cols) throw FormatError(rw + ": row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw FormatError(rw + "[" + std::to_string(c) + "]: expected a number");
      data.push_back(row[c].get<double>());
    }
  }
  try {
    return Mat(rows, cols, std::move(data));
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline json mat_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json parse(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() carries "at line L, column C".
    throw FormatError(where + ": " + e.what());
  }
}

}  // namespace detail

// Structural parse only; stability checks are left to validate_instance.
inline NcsInstance parse_instance(const std::string& text, const std::string& where = "instance") {
  const json j = detail::parse(text, where);
  NcsInstance ncs;
  const auto& plants = detail::field(j, "plants", where);
  if (!plants.is_array()) throw FormatError(where + ": 'plants' must be a list");
  for (std::size_t i = 0; i < plants.size(); ++i) {
    const std::string pw = where + ": plants[" + std::to_string(i) + "]";
    const auto& pj = plants[i];
    const int id = detail::as_int(detail::field(pj, "id", pw), pw + ".id");
    Mat A = detail::as_mat(detail::field(pj, "A", pw), pw + ".A");
    Mat B = detail::as_mat(detail::field(pj, "B", pw), pw + ".B");
    Mat K = detail::as_mat(detail::field(pj, "K", pw), pw + ".K");
    try {
      ncs.plants.emplace_back(id, std::move(A), std::move(B), std::move(K));
    } catch (const std::invalid_argument& e) {
      throw FormatError(pw + ": " + e.what());
    }
  }
  ncs.M = detail::as_int(detail::field(j, "M", where), where + ".M");
  const auto& aj = detail::field(j, "attack", where);
  const int m = detail::as_int(detail::field(aj, "m", where + ".attack"), where + ".attack.m");
  const int k = detail::as_int(detail::field(aj, "k", where + ".attack"), where + ".attack.k");
  try {
    ncs.attack = AttackParams(m, k);
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
  return ncs;
}

inline NcsInstance load_instance(const std::string& path) { return parse_instance(read_file(path), path); }

inline json instance_json(const NcsInstance& ncs) {
  json plants = json::array();
  for (const auto& p : ncs.plants) {
    plants.push_back({{"id", p.id()}, {"A", detail::mat_json(p.A())}, {"B", detail::mat_json(p.B())},
                      {"K", detail::mat_json(p.K())}});
  }
  return {{"plants", plants}, {"M", ncs.M}, {"attack", {{"m", ncs.attack.m}, {"k", ncs.attack.k}}}};
}

inline json policy_json(const SchedulingPolicy& policy) {
  json blocks = json::array();
  for (const auto& b : policy.blocks) blocks.push_back(b.members);
  return {{"blocks", blocks}, {"hold", policy.hold}, {"period", policy.period()}};
}

inline SchedulingPolicy parse_policy(const std::string& text, const std::string& where = "policy") {
  const json j = detail::parse(text, where);
  const auto& blocks = detail::field(j, "blocks", where);
  if (!blocks.is_array() || blocks.empty()) throw FormatError(where + ": 'blocks' must be a nonempty list");
  std::vector<SlotVector> cover;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string bw = where + ".blocks[" + std::to_string(b) + "]";
    if (!blocks[b].is_array() || blocks[b].empty()) throw FormatError(bw + ": expected a nonempty id list");
    SlotVector v;
    for (const auto& id : blocks[b]) {
      const int x = detail::as_int(id, bw);
      if (v.contains(x)) throw FormatError(bw + ": repeated id " + std::to_string(x));
      v.members.push_back(x);
    }
    if (!cover.empty() && v.size() != cover.front().size()) throw FormatError(bw + ": blocks must all have M ids");
    cover.push_back(std::move(v));
  }
  const int hold = detail::as_int(detail::field(j, "hold", where), where + ".hold");
  if (hold < 1) throw FormatError(where + ": hold must be >= 1");
  auto policy = build_policy(std::move(cover), hold);
  if (auto it = j.find("period"); it != j.end() && detail::as_int(*it, where + ".period") != policy.period()) {
    throw FormatError(where + ": period " + it->dump() + " != r * hold = " + std::to_string(policy.period()));
  }
  return policy;
}

inline SchedulingPolicy load_policy(const std::string& path) { return parse_policy(read_file(path), path); }

inline std::string attack_csv(const AttackSignal& s) {
  std::string out = "t,deactivated_ids\n";
  for (std::size_t t = 0; t < s.horizon(); ++t) out += std::to_string(t) + "," + join_ids(s.deactivated[t]) + "\n";
  return out;
}

// Rows must be t = 0, 1, 2, ... in order.
inline AttackSignal parse_attack_csv(const std::string& text, const std::string& where = "attack") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,deactivated_ids", 0) != 0) {
    throw FormatError(where + ":1: expected header 't,deactivated_ids'");
  }
  AttackSignal s;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string loc = where + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw FormatError(loc + ": expected 't,ids'");
    std::size_t t = 0;
    try {
      t = std::stoul(line.substr(0, comma));
    } catch (const std::exception&) {
      throw FormatError(loc + ": bad instant '" + line.substr(0, comma) + "'");
    }
    if (t != s.horizon()) throw FormatError(loc + ": expected t=" + std::to_string(s.horizon()));
    std::vector<int> ids;
    std::istringstream is(line.substr(comma + 1));
    std::string tok;
    while (is >> tok) {
      try {
        std::size_t used = 0;
        ids.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError(loc + ": bad plant id '" + tok + "'");
      }
    }
    std::sort(ids.begin(), ids.end());
    s.deactivated.push_back(std::move(ids));
  }
  return s;
}

inline AttackSignal load_attack(const std::string& path) { return parse_attack_csv(read_file(path), path); }

inline std::string schedule_csv(const SchedulingPolicy& policy, std::int64_t horizon) {
  std::string out = "t,scheduled_ids\n";
  for (std::int64_t t = 0; t < horizon; ++t) out += std::to_string(t) + "," + join_ids(policy_at(policy, t).members) + "\n";
  return out;
}

inline std::string trajectory_csv(const Trajectory& tr) {
  std::size_t d = 0;
  for (const auto& xs : tr.states)
    if (!xs.empty()) d = std::max(d, xs.front().size());
  std::string out = "t,plant_id,norm";
  for (std::size_t j = 1; j <= d; ++j) out += ",x" + std::to_string(j);
  out += "\n";
  const std::size_t H = tr.horizon();
  for (std::size_t t = 0; t <= H; ++t) {
    for (std::size_t i = 0; i < tr.ids.size(); ++i) {
      out += std::to_string(t) + "," + std::to_string(tr.ids[i]) + "," + fmt(tr.norms[i][t]);
      for (double v : tr.states[i][t]) out += "," + fmt(v);
      out += "\n";
    }
  }
  return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "delta,r,m,k,eps_max,feasible\n";
  for (const auto& r : rows) {
    out += std::to_string(r.delta) + "," + std::to_string(r.r) + "," + std::to_string(r.m) + "," + std::to_string(r.k) +
           "," + fmt(r.eps_max) + "," + (r.feasible ? "1" : "0") + "\n";
  }
  return out;
}

inline json certificate_json(const CertificateReport& rep) {
  json plants = json::array();
  for (const auto& v : rep.per_plant) {
    plants.push_back({{"id", v.id},
                      {"lambda", v.lambda},
                      {"epsilon", v.epsilon},
                      {"norm_As", v.norm_As},
                      {"norm_Au", v.norm_Au},
                      {"norm_E", v.norm_E},
                      {"cond1_value", v.cond1_value},
                      {"cond1", v.cond1},
                      {"cond2", v.cond2},
                      {"cond3_lhs", v.cond3_lhs},
                      {"cond3", v.cond3},
                      {"margin", v.margin()},
                      {"pass", v.pass}});
  }
  return {{"contraction", {{"delta", rep.contraction.delta}, {"rho", rep.contraction.rho}}},
          {"derived", {{"r", rep.derived.r}, {"alpha", rep.derived.alpha}, {"zeta", rep.derived.zeta}, {"eta", rep.derived.eta}}},
          {"worst_case_horizon", rep.worst_case_horizon},
          {"alpha_covers_worst_case", rep.alpha_covers_worst_case},
          {"all_pass", rep.all_pass()},
          {"verdict", rep.all_pass() ? "certified" : "inconclusive"},
          {"per_plant", plants}};
}

inline json ges_json(const std::vector<GesEstimate>& est) {
  json plants = json::array();
  bool all = true;
  for (const auto& g : est) {
    const bool defined = g.status == GesStatus::estimated;
    plants.push_back({{"id", g.id},
                      {"status", defined ? "estimated" : "undefined"},
                      {"c_hat", g.c_hat},
                      {"lambda_hat", g.lambda_hat},
                      {"samples", g.samples},
                      {"pass", g.pass}});
    all = all && g.pass;
  }
  return {{"kind", "empirical, not a proof"}, {"all_pass", all}, {"per_plant", plants}};
}

}  // namespace ncs::io
