#pragma once

// Command-line front end: certify, schedule, simulate, sweep.
// Exit status: 0 pass, 1 input error, 2 certificate or empirical failure.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncs/adversary.hpp"
#include "ncs/certificate.hpp"
#include "ncs/io.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"
#include "ncs/simulator.hpp"

namespace ncs::cli {

enum Status : int { ok = 0, input_error = 1, failed = 2 };

struct Options {
  std::string instance;
  std::optional<double> rho;
  int delta_cap = 1000;
  std::vector<double> lambdas;
  std::vector<double> epsilons;
  std::vector<int> priority;
  std::string out = ".";
  bool force = false;
  std::int64_t horizon = -1;
  int attacks = 10;
  int initials = 10;
  double box = 1.0;
  std::uint64_t seed = 1;
  double budget = AttackEnumerator::default_budget;
  std::string policy_file;
  std::string attack_file;
  bool greedy = false;
  bool exhaustive = false;

  // sweep
  std::string sweep_case;
  std::string deltas, rs, ms, ks;
  double norm_As = 0.9, norm_Au = 1.1, sweep_rho = 0.9, sweep_lambda = 1e-5;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "2:8" (inclusive range) or "2,3,5".
inline std::vector<int> parse_int_list(const std::string& spec, const std::string& name) {
  std::vector<int> out;
  if (spec.empty()) return out;
  try {
    if (auto colon = spec.find(':'); colon != std::string::npos) {
      const int lo = std::stoi(spec.substr(0, colon));
      const int hi = std::stoi(spec.substr(colon + 1));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
      return out;
    }
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stoi(tok));
    }
  } catch (const std::exception&) {
    throw InputError("--" + name + ": cannot parse '" + spec + "'");
  }
  return out;
}

inline NcsInstance load_valid_instance(const Options& o) {
  if (o.instance.empty()) throw InputError("--instance is required");
  NcsInstance ncs;
  try {
    ncs = io::load_instance(o.instance);
  } catch (const io::FormatError& e) {
    throw InputError(e.what());
  }
  if (auto vs = validate_instance(ncs); !vs.empty()) {
    std::string msg = o.instance + ": instance violates its assumptions:";
    for (const auto& v : vs) msg += "\n  " + v.subject + ": " + v.clause;
    throw InputError(msg);
  }
  return ncs;
}

inline std::vector<double> per_plant(const std::vector<double>& given, std::size_t N, const char* name) {
  if (given.size() == 1) return std::vector<double>(N, given.front());
  if (given.size() != N) {
    throw InputError(std::string("--") + name + ": expected 1 or " + std::to_string(N) + " values, got " +
                     std::to_string(given.size()));
  }
  return given;
}

// Certificate with defaults filled in: lambda from default_lambda, epsilon
// from the actual commutator norms.
inline CertificateReport certify(const NcsInstance& ncs, const Options& o) {
  ContractionPair c;
  try {
    c = find_contraction(ncs, o.rho, o.delta_cap);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  } catch (const CertificateError& e) {
    throw InputError(e.what());
  }
  const auto N = ncs.plants.size();
  std::vector<double> lambdas =
      o.lambdas.empty() ? std::vector<double>(N, default_lambda(c)) : per_plant(o.lambdas, N, "lambda");
  std::vector<double> eps;
  if (o.epsilons.empty()) {
    for (const auto& p : ncs.plants) eps.push_back(spectral_norm(p.commutator()));
  } else {
    eps = per_plant(o.epsilons, N, "epsilon");
  }
  try {
    return check_theorem(ncs, c, lambdas, eps);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline std::filesystem::path out_dir(const Options& o) {
  std::filesystem::path p(o.out);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw InputError("--out: cannot create " + o.out + ": " + ec.message());
  return p;
}

inline void print_certificate(const CertificateReport& rep, std::ostream& out) {
  out << "delta=" << rep.contraction.delta << " rho=" << io::fmt(rep.contraction.rho) << " r=" << rep.derived.r
      << " alpha=" << rep.derived.alpha << " zeta=" << rep.derived.zeta << " eta=" << rep.derived.eta << "\n";
  if (!rep.alpha_covers_worst_case) {
    out << "warning: alpha=" << rep.derived.alpha << " is shorter than the worst-case " << rep.worst_case_horizon
        << " instants needed for delta clean steps under this (m,k)\n";
  }
  out << std::fixed << std::setprecision(4);
  for (const auto& v : rep.per_plant) {
    out << "plant " << v.id << ": cond1=" << v.cond1_value << " ||E||=" << v.norm_E << " eps=" << v.epsilon
        << " cond3=" << v.cond3_lhs << " margin=" << v.margin() << (v.pass ? " pass" : " FAIL") << "\n";
  }
  out << std::defaultfloat;
  out << (rep.all_pass() ? "certified\n" : "inconclusive\n");
}

inline int cmd_certify(const Options& o, std::ostream& out) {
  const auto ncs = load_valid_instance(o);
  const auto rep = certify(ncs, o);
  const auto dir = out_dir(o);
  io::write_file((dir / "certificate.json").string(), io::certificate_json(rep).dump(2) + "\n");
  print_certificate(rep, out);
  return rep.all_pass() ? ok : failed;
}

inline SchedulingPolicy make_policy(const NcsInstance& ncs, const CertificateReport& rep, const Options& o) {
  try {
    return build_policy(build_cover(ncs.N(), ncs.M, o.priority), rep.derived.alpha);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline int cmd_schedule(const Options& o, std::ostream& out, std::ostream& err) {
  const auto ncs = load_valid_instance(o);
  const auto rep = certify(ncs, o);
  if (!rep.all_pass() && !o.force) {
    err << "instance is not certified (use --force to schedule anyway)\n";
    return failed;
  }
  const auto policy = make_policy(ncs, rep, o);
  const auto dir = out_dir(o);
  const std::int64_t H = o.horizon >= 0 ? o.horizon : 2 * policy.period();
  io::write_file((dir / "policy.json").string(), io::policy_json(policy).dump(2) + "\n");
  io::write_file((dir / "schedule.csv").string(), io::schedule_csv(policy, H));
  out << "r=" << policy.r() << " hold=" << policy.hold << " period=" << policy.period() << "\n";
  for (int q = 0; q < policy.r(); ++q) out << "v" << q + 1 << " = {" << io::join_ids(policy.blocks[q].members) << "}\n";
  return ok;
}

// Uniform on [-box, box] from the top 53 bits; independent of the standard
// library's distribution implementations.
inline double uniform_box(std::mt19937_64& rng, double box) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return box * (2.0 * u - 1.0);
}

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto ncs = load_valid_instance(o);
  if (o.horizon == 0 || o.horizon < -1) throw InputError("horizon must be >= 1");
  const std::size_t H = o.horizon < 0 ? 300 : static_cast<std::size_t>(o.horizon);
  if (o.attacks < 0 || o.initials < 1) throw InputError("--attacks must be >= 0 and --initials >= 1");

  SchedulingPolicy policy;
  if (!o.policy_file.empty()) {
    try {
      policy = io::load_policy(o.policy_file);
    } catch (const io::FormatError& e) {
      throw InputError(e.what());
    }
  } else {
    policy = make_policy(ncs, certify(ncs, o), o);
  }

  std::mt19937_64 rng(o.seed);
  std::vector<AttackSignal> signals;
  if (!o.attack_file.empty()) {
    AttackSignal s;
    try {
      s = io::load_attack(o.attack_file);
    } catch (const io::FormatError& e) {
      throw InputError(e.what());
    }
    if (auto adm = is_admissible(s, policy, ncs.attack); !adm) {
      err << o.attack_file << ": inadmissible attack: " << adm.reason << "\n";
      return input_error;
    }
    signals.push_back(std::move(s));
  } else {
    for (int j = 0; j < o.attacks; ++j) signals.push_back(sample_attack(policy, ncs.attack, H, rng()));
  }

  std::vector<std::vector<Vec>> initial(static_cast<std::size_t>(o.initials));
  for (auto& x0 : initial) {
    for (const auto& p : ncs.plants) {
      Vec x(p.state_dim());
      for (double& v : x) v = uniform_box(rng, o.box);
      x0.push_back(std::move(x));
    }
  }
  if (o.greedy) {
    for (const auto& x0 : initial) signals.push_back(greedy_adversary(ncs, policy, x0, H));
  }
  if (signals.empty()) signals.push_back(AttackSignal::none(H));

  const auto dir = out_dir(o);
  std::vector<Trajectory> runs;
  for (std::size_t j = 0; j < signals.size(); ++j) {
    io::write_file((dir / ("attack_" + std::to_string(j) + ".csv")).string(), io::attack_csv(signals[j]));
    for (std::size_t l = 0; l < initial.size(); ++l) {
      runs.push_back(simulate(ncs, policy, signals[j], initial[l], H));
      io::write_file((dir / ("traj_" + std::to_string(j) + "_" + std::to_string(l) + ".csv")).string(),
                     io::trajectory_csv(runs.back()));
    }
  }
  const auto est = estimate_ges(runs);
  auto report = io::ges_json(est);

  bool periodic_ok = true;
  if (o.exhaustive) {
    std::unique_ptr<AttackEnumerator> en;
    try {
      en = std::make_unique<AttackEnumerator>(policy, ncs.attack, static_cast<std::size_t>(policy.period()), o.budget,
                                              true);
    } catch (const BudgetExceeded& e) {
      throw InputError(e.what());
    }
    std::vector<double> worst(ncs.plants.size(), 0.0);
    std::uint64_t words = 0;
    while (auto w = en->next()) {
      ++words;
      const auto maps = period_map_radius(ncs, policy, *w);
      for (std::size_t i = 0; i < maps.size(); ++i) worst[i] = std::max(worst[i], maps[i].radius);
    }
    io::json ex = io::json::array();
    for (std::size_t i = 0; i < worst.size(); ++i) {
      ex.push_back({{"id", ncs.plants[i].id()}, {"max_period_radius", worst[i]}, {"contracts", worst[i] < 1.0}});
      periodic_ok = periodic_ok && worst[i] < 1.0;
      out << "plant " << ncs.plants[i].id() << ": max period-map radius over " << words
          << " periodic attacks = " << io::fmt(worst[i]) << "\n";
    }
    report["periodic_attacks"] = {{"words", words}, {"per_plant", ex}};
  }
  report["seed"] = o.seed;
  report["horizon"] = H;
  report["attacks"] = signals.size();
  report["initials"] = initial.size();
  report["policy"] = io::policy_json(policy);
  io::write_file((dir / "ges.json").string(), report.dump(2) + "\n");

  bool all = true;
  for (const auto& g : est) {
    out << "plant " << g.id << ": lambda_hat=" << io::fmt(g.lambda_hat) << " c_hat=" << io::fmt(g.c_hat)
        << (g.pass ? " decays" : " NO DECAY") << "\n";
    all = all && g.pass;
  }
  out << "(empirical, not a proof)\n";
  return all && periodic_ok ? ok : failed;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  SweepGrid g;
  g.norm_As = o.norm_As;
  g.norm_Au = o.norm_Au;
  g.rho = o.sweep_rho;
  g.lambda = o.sweep_lambda;
  if (o.sweep_case == "I") {
    g.deltas = parse_int_list("2:8", "delta");
    g.rs = parse_int_list("2:5", "r");
    g.ms = {2};
    g.ks = {3};
  } else if (o.sweep_case == "II") {
    g.deltas = parse_int_list("2:8", "delta");
    g.rs = {2};
    g.ms = parse_int_list("1:4", "m");
    g.ks = {5};
  } else if (!o.sweep_case.empty()) {
    throw InputError("--case must be I or II");
  }
  if (!o.deltas.empty()) g.deltas = parse_int_list(o.deltas, "delta");
  if (!o.rs.empty()) g.rs = parse_int_list(o.rs, "r");
  if (!o.ms.empty()) g.ms = parse_int_list(o.ms, "m");
  if (!o.ks.empty()) g.ks = parse_int_list(o.ks, "k");
  if (g.size() == 0) throw InputError("sweep grid is empty (give --case or all of --delta, --r, --m, --k)");

  const auto rows = epsilon_sweep(g);
  const auto dir = out_dir(o);
  const auto csv = io::sweep_csv(rows);
  io::write_file((dir / "sweep.csv").string(), csv);
  out << csv;
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Scheduling certificates and adversarial simulation for networked control under (m,k)-firm jamming"};
  app.require_subcommand(1);
  Options o;

  auto add_cert_flags = [&](CLI::App* c) {
    c->add_option("--instance", o.instance, "instance JSON file")->required();
    c->add_option("--rho", o.rho, "contraction target rho in (0,1)");
    c->add_option("--delta-cap", o.delta_cap, "largest delta tried");
    c->add_option("--lambda", o.lambdas, "decay rate(s): one value or one per plant")->delimiter(',');
    c->add_option("--epsilon", o.epsilons, "commutator bound(s): one value or one per plant")->delimiter(',');
    c->add_option("--out", o.out, "output directory");
  };

  auto* certify_cmd = app.add_subcommand("certify", "evaluate the stability conditions");
  add_cert_flags(certify_cmd);

  auto* schedule_cmd = app.add_subcommand("schedule", "build the periodic schedule");
  add_cert_flags(schedule_cmd);
  schedule_cmd->add_option("--priority", o.priority, "plant ids picked first (and used as fillers)")->delimiter(',');
  schedule_cmd->add_option("--horizon", o.horizon, "instants dumped to schedule.csv (default two periods)");
  schedule_cmd->add_flag("--force", o.force, "schedule even when not certified");

  auto* simulate_cmd = app.add_subcommand("simulate", "replay random admissible attacks");
  add_cert_flags(simulate_cmd);
  simulate_cmd->add_option("--priority", o.priority, "plant ids picked first")->delimiter(',');
  simulate_cmd->add_option("--policy", o.policy_file, "policy JSON (default: build one)");
  simulate_cmd->add_option("--attack", o.attack_file, "replay this attack CSV instead of sampling");
  simulate_cmd->add_option("--horizon", o.horizon, "instants per run (default 300)");
  simulate_cmd->add_option("--attacks", o.attacks, "random attack signals");
  simulate_cmd->add_option("--initials", o.initials, "initial conditions per attack");
  simulate_cmd->add_option("--box", o.box, "initial states uniform in [-box, box]^d");
  simulate_cmd->add_option("--seed", o.seed, "seed of the single random generator");
  simulate_cmd->add_option("--budget", o.budget, "enumeration budget for --exhaustive");
  simulate_cmd->add_flag("--exhaustive", o.exhaustive, "also check every periodic attack word via its period map");
  simulate_cmd->add_flag("--greedy", o.greedy, "also run the greedy adversary per initial condition");

  auto* sweep_cmd = app.add_subcommand("sweep", "tabulate the largest admissible epsilon over a grid");
  sweep_cmd->add_option("--case", o.sweep_case, "preset grid: I (vary delta, r) or II (vary delta, m)");
  sweep_cmd->add_option("--delta", o.deltas, "values, e.g. 2:8 or 2,4,6");
  sweep_cmd->add_option("--r", o.rs, "cover counts");
  sweep_cmd->add_option("--m", o.ms, "attack m values");
  sweep_cmd->add_option("--k", o.ks, "attack k values");
  sweep_cmd->add_option("--norm-as", o.norm_As, "||A_s||");
  sweep_cmd->add_option("--norm-au", o.norm_Au, "||A_u||");
  sweep_cmd->add_option("--rho", o.sweep_rho, "rho");
  sweep_cmd->add_option("--lambda", o.sweep_lambda, "lambda");
  sweep_cmd->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return input_error;
  }

  try {
    if (certify_cmd->parsed()) return cmd_certify(o, out);
    if (schedule_cmd->parsed()) return cmd_schedule(o, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(o, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  }
  return input_error;
}

}  // namespace ncs::cli
