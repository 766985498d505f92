// Command-line front end: grid sweeps, depletion maps, verification checks,
// ground-state solves, and entanglement-depth classification.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdmft/bec.hpp"
#include "rdmft/fock.hpp"
#include "rdmft/groundstate.hpp"
#include "rdmft/qfim.hpp"
#include "rdmft/rdm.hpp"
#include "rdmft/search.hpp"
#include "rdmft/sweep.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct CommonOpts {
  int n = 2;
  double sign_or_u = 1.0;
  int grid = 50;
  std::string strategy = "automatic";
  uint64_t seed = 0x5eed;
  std::string out = "-";
  std::string format = "csv";
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n", o.n, "particle number");
  cmd->add_option("--sign", o.sign_or_u, "interaction strength u (sign for the closed form)");
  cmd->add_option("--grid", o.grid, "grid resolution")->check(CLI::Range(2, 100000));
  cmd->add_option("--strategy", o.strategy, "closed_form|dual_legendre|direct_penalty|automatic");
  cmd->add_option("--seed", o.seed, "rng seed");
  cmd->add_option("--out", o.out, "output path, - for stdout");
  cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--strict", o.strict, "exit 2 if any grid point fails");
}

int write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return kExitOk;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "cannot open output path: " << path << "\n";
    return kExitConfig;
  }
  f << content;
  return kExitOk;
}

json config_json(const std::string& command, const CommonOpts& o) {
  return json{{"command", command},   {"n_particles", o.n},
              {"sign_or_u", o.sign_or_u}, {"grid", o.grid},
              {"strategy", o.strategy},   {"seed", o.seed},
              {"format", o.format}};
}

rdmft::Strategy parse_strategy(const std::string& name) {
  auto s = rdmft::strategy_from_name(name);
  if (!s) throw CLI::ValidationError("--strategy", "unknown strategy " + name);
  return *s;
}

int cmd_sweep(const CommonOpts& o) {
  rdmft::SearchOptions opts;
  opts.seed = o.seed;
  const auto rows =
      rdmft::run_sweep(o.n, o.sign_or_u, o.grid, parse_strategy(o.strategy), opts);
  bool all_ok = true;
  for (const auto& r : rows) all_ok = all_ok && r.converged;

  std::string content;
  if (o.format == "csv") {
    content = rdmft::sweep_csv(rows);
  } else {
    json doc;
    doc["config"] = config_json("sweep", o);
    doc["rows"] = json::array();
    for (const auto& r : rows)
      doc["rows"].push_back(json{{"gamma_x", r.gamma_x},
                                 {"gamma_z", r.gamma_z},
                                 {"F", r.f},
                                 {"M_xx", r.m_xx},
                                 {"M_yy", r.m_yy},
                                 {"M_zz", r.m_zz},
                                 {"M_xz", r.m_xz},
                                 {"converged", r.converged}});
    content = doc.dump(2) + "\n";
  }
  const int code = write_output(o.out, content);
  if (code != kExitOk) return code;
  return (o.strict && !all_ok) ? kExitNumerical : kExitOk;
}

int cmd_bec_map(const CommonOpts& o, double delta, bool with_numeric) {
  rdmft::SearchOptions opts;
  opts.seed = o.seed;
  const auto rows =
      rdmft::run_bec_map(o.n, delta, o.grid, with_numeric, opts);
  bool all_ok = true;
  if (with_numeric)
    for (const auto& r : rows) all_ok = all_ok && r.mzz_numeric.has_value();

  std::string content;
  if (o.format == "csv") {
    content = rdmft::bec_map_csv(rows);
  } else {
    json doc;
    doc["config"] = config_json("bec-map", o);
    doc["config"]["delta"] = delta;
    doc["config"]["numeric"] = with_numeric;
    doc["rows"] = json::array();
    for (const auto& r : rows) {
      json row{{"theta", r.theta},
               {"phi", r.phi},
               {"delta", r.delta},
               {"mzz_expansion", r.mzz_expansion},
               {"exceeds_sql", r.exceeds_sql}};
      if (r.mzz_numeric)
        row["mzz_numeric"] = *r.mzz_numeric;
      else
        row["mzz_numeric"] = nullptr;
      doc["rows"].push_back(row);
    }
    content = doc.dump(2) + "\n";
  }
  const int code = write_output(o.out, content);
  if (code != kExitOk) return code;
  return (o.strict && !all_ok) ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------------------
// verify: self-contained consistency suite, one JSON entry per check.
// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  double tolerance;
  double residual;  // pass iff residual <= tolerance
  bool pass;
};

void add_check(std::vector<Check>& out, const std::string& only,
               const std::string& name, double tolerance, double residual) {
  if (!only.empty() && only != name) return;
  out.push_back({name, tolerance, residual, residual <= tolerance});
}

bool wanted(const std::string& only, const std::string& name) {
  return only.empty() || only == name;
}

std::vector<Check> run_checks(uint64_t seed, const std::string& only) {
  using namespace rdmft;
  std::vector<Check> checks;
  SearchOptions opts;
  opts.seed = seed;

  if (wanted(only, "operator_identity")) {
    double worst = 0;
    for (int n = 0; n <= 50; ++n)
      worst = std::max(worst, verify_number_operator_identity(build_basis(n)));
    add_check(checks, only, "operator_identity", 1e-12, worst);
  }

  if (wanted(only, "closed_form_f") || wanted(only, "closed_form_qfim")) {
    double worst_f = 0, worst_m = 0;
    for (int sign : {1, -1}) {
      const auto rows =
          functional_surface(2, sign, 10, Strategy::automatic, opts);
      for (const auto& row : rows) {
        const SearchResult cf = closed_form_n2(row.gamma_x, row.gamma_z, sign);
        worst_f = std::max(worst_f, std::abs(row.f_value - cf.f_value));
        const QfimMatrix mn = qfim_from_state(row.result.minimizer);
        const QfimMatrix mc =
            closed_form_qfim_n2(row.gamma_x, row.gamma_z, sign);
        worst_m = std::max(
            worst_m, (mn.entries - mc.entries).cwiseAbs().maxCoeff());
      }
    }
    add_check(checks, only, "closed_form_f", 1e-6, worst_f);
    add_check(checks, only, "closed_form_qfim", 1e-6, worst_m);
  }

  if (wanted(only, "generating_relation") || wanted(only, "reconstruction")) {
    double worst_gen = 0, worst_rec = 0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int n : {2, 3, 5}) {
      const FockBasis basis = build_basis(n);
      const HermitianOperator w = op_onsite_interaction(basis, 1.0);
      for (int k = 0; k < 5; ++k) {
        const double rho = (0.15 + 0.7 * uni(rng)) * 0.5 * n;
        const double th = 0.2 + (3.14159265358979 - 0.4) * uni(rng);
        const OneBodyRDM tgt = OneBodyRDM::from_spherical(n, rho, th, 0.0);
        const SearchResult r =
            run_search(Strategy::automatic, n, tgt, w, opts);
        if (!r.converged) {
          worst_gen = std::max(worst_gen, 1.0);
          continue;
        }
        const QfimMatrix m = qfim_from_state(r.minimizer);
        worst_gen = std::max(
            worst_gen, std::abs(mzz_single_coupling(tgt, r.f_value, 1.0) -
                                m(Axis::Z, Axis::Z)));
        // on-site W maps onto the zz coupling: u n(n-1) sum = 2u Jz^2 + const
        CouplingSet cs;
        cs.set(Axis::Z, Axis::Z, 2.0);
        const double f_rec = reconstruct_f(tgt, m, cs);
        const double f_zz = r.f_value - (0.5 * n * n - n);
        worst_rec = std::max(worst_rec, std::abs(f_rec - f_zz));
      }
    }
    add_check(checks, only, "generating_relation", 1e-6, worst_gen);
    add_check(checks, only, "reconstruction", 1e-5, worst_rec);
  }

  if (wanted(only, "hellmann_feynman")) {
    double worst = 0;
    const int n = 4;
    const FockBasis basis = build_basis(n);
    const HermitianOperator dw = op_onsite_interaction(basis, 1.0);
    for (double u : {0.7, 1.3}) {
      const GroundStateResult gs = ground_state(n, 1.0, u);
      const OneBodyRDM tgt = gs.rdm;  // v-representable by construction
      auto f_at = [&](double uu) {
        const HermitianOperator w = op_onsite_interaction(basis, uu);
        const SearchResult r = run_search(Strategy::automatic, n, tgt, w, opts);
        if (!r.converged) throw std::runtime_error("search failed");
        return r.f_value;
      };
      const double h = 1e-4;
      const double fd = (f_at(u + h) - f_at(u - h)) / (2 * h);
      const SearchResult r = run_search(Strategy::automatic, n, tgt,
                                        op_onsite_interaction(basis, u), opts);
      const double hf = expectation(r.minimizer, dw);
      worst = std::max(worst, std::abs(fd - hf));
    }
    add_check(checks, only, "hellmann_feynman", 1e-5, worst);
  }

  if (wanted(only, "bec_f_scaling")) {
    // slope of |f_expansion - exact oracle| vs delta; want >= 2.4
    const int n = 1000;
    const double th = 0.5 * 3.14159265358979;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (double d : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
      const double exact = std::min(exact_ansatz_expectation(n, d, th, 0.0, 1),
                                    exact_ansatz_expectation(n, d, th, 0.0, -1)) -
                           n;
      const double resid =
          std::abs(f_expansion(n, d, th, 0.0, BranchRule::minimized) - exact);
      if (resid <= 1e-10) continue;
      const double x = std::log(d), y = std::log(resid);
      sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
    }
    const double slope =
        m >= 3 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    add_check(checks, only, "bec_f_scaling", 0.0, std::max(0.0, 2.4 - slope));
  }

  if (wanted(only, "bec_mzz_scaling")) {
    const std::vector<double> grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
    const ScalingReport rep =
        asymptotic_validation(200, 0.5 * 3.14159265358979, 0.0, grid, opts);
    const double resid =
        rep.degenerate ? 1.0 : std::max(0.0, 1.4 - rep.slope);
    add_check(checks, only, "bec_mzz_scaling", 0.0, resid);
  }

  if (wanted(only, "variational_principle")) {
    double worst = 0;
    for (int n : {2, 5}) {
      const VariationalReport rep =
          verify_variational_principle(n, 1.0, 1.0, 15, opts);
      worst = std::max(worst, std::abs(rep.e_functional - rep.e_exact));
    }
    add_check(checks, only, "variational_principle", 1e-6, worst);
  }

  if (wanted(only, "stationarity")) {
    const double resid = verify_stationarity(2, 1.0, 1.0, 1e-5, opts);
    add_check(checks, only, "stationarity", 1e-4, resid);
  }

  if (wanted(only, "witness")) {
    const FockBasis basis = build_basis(2);
    StateVector noon{basis, Vector(3)};
    noon.amplitudes << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const WitnessVerdict vn = witness_depth(
        qfim_from_state(noon), Eigen::Vector3d::UnitZ(), 2);
    const StateVector coh = rotated_fock_state(basis, 0, 0.5 * 3.14159265358979, 0.0);
    const WitnessVerdict vc = witness_depth(
        qfim_from_state(coh), Eigen::Vector3d::UnitZ(), 2);
    const double resid =
        (vn.depth_lower_bound >= 2 && vc.depth_lower_bound == 1) ? 0.0 : 1.0;
    add_check(checks, only, "witness", 0.0, resid);
  }

  return checks;
}

int cmd_verify(const CommonOpts& o, const std::string& only) {
  std::vector<Check> checks;
  try {
    checks = run_checks(o.seed, only);
  } catch (const std::exception& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return kExitNumerical;
  }
  if (checks.empty()) {
    std::cerr << "verify: no check named '" << only << "'\n";
    return kExitConfig;
  }
  json doc;
  doc["config"] = config_json("verify", o);
  if (!only.empty()) doc["config"]["only"] = only;
  doc["checks"] = json::array();
  bool all = true;
  for (const auto& c : checks) {
    doc["checks"].push_back(json{{"name", c.name},
                                 {"tolerance", c.tolerance},
                                 {"residual", c.residual},
                                 {"pass", c.pass}});
    all = all && c.pass;
  }
  const int code = write_output(o.out, doc.dump(2) + "\n");
  if (code != kExitOk) return code;
  return all ? kExitOk : kExitNumerical;
}

int cmd_groundstate(const CommonOpts& o, double t, double u) {
  const rdmft::GroundStateResult gs = rdmft::ground_state(o.n, t, u);
  json doc;
  doc["config"] = config_json("groundstate", o);
  doc["config"]["t"] = t;
  doc["config"]["u"] = u;
  doc["rows"] = json::array({json{{"energy", gs.energy},
                                  {"gamma_x", gs.rdm.x},
                                  {"gamma_y", gs.rdm.y},
                                  {"gamma_z", gs.rdm.z},
                                  {"gap", gs.gap},
                                  {"degenerate", gs.degenerate}}});
  return write_output(o.out, doc.dump(2) + "\n");
}

int cmd_witness(const CommonOpts& o, const std::string& qfim_file,
                const std::string& state_name, double t, double u,
                std::vector<double> dir_flat) {
  using namespace rdmft;
  QfimMatrix m;
  if (!qfim_file.empty()) {
    std::ifstream f(qfim_file);
    if (!f) {
      std::cerr << "cannot read qfim file: " << qfim_file << "\n";
      return kExitConfig;
    }
    json doc = json::parse(f, nullptr, false);
    if (doc.is_discarded() || !doc.contains("entries")) {
      std::cerr << "qfim file must contain {n_particles, entries[3][3]}\n";
      return kExitConfig;
    }
    m.n_particles = doc.value("n_particles", o.n);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m.entries(a, b) = doc["entries"][a][b];
  } else {
    const FockBasis basis = build_basis(o.n);
    StateVector s;
    if (state_name == "noon") {
      s = StateVector{basis, Vector::Zero(o.n + 1)};
      s.amplitudes[0] = 1.0 / std::sqrt(2.0);
      s.amplitudes[o.n] = 1.0 / std::sqrt(2.0);
    } else if (state_name == "coherent") {
      s = rotated_fock_state(basis, 0, 0.5 * 3.14159265358979, 0.0);
    } else if (state_name == "ground") {
      s = ground_state(o.n, t, u).state;
    } else {
      std::cerr << "unknown --state (noon|coherent|ground)\n";
      return kExitConfig;
    }
    m = qfim_from_state(s);
  }

  std::vector<Eigen::Vector3d> dirs;
  if (dir_flat.empty()) {
    dirs = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
            Eigen::Vector3d::UnitZ()};
  } else {
    if (dir_flat.size() % 3 != 0) {
      std::cerr << "--direction needs triples nx ny nz\n";
      return kExitConfig;
    }
    for (size_t i = 0; i < dir_flat.size(); i += 3) {
      Eigen::Vector3d d(dir_flat[i], dir_flat[i + 1], dir_flat[i + 2]);
      if (d.norm() == 0) {
        std::cerr << "--direction must be nonzero\n";
        return kExitConfig;
      }
      dirs.push_back(d.normalized());
    }
  }

  json doc;
  doc["config"] = config_json("witness", o);
  doc["rows"] = json::array();
  for (const auto& d : dirs) {
    const WitnessVerdict v = witness_depth(m, d, m.n_particles ? m.n_particles : o.n);
    doc["rows"].push_back(json{{"direction", {d[0], d[1], d[2]}},
                               {"qfi_value", v.qfi_value},
                               {"depth_lower_bound", v.depth_lower_bound},
                               {"bound_used", v.bound_used}});
  }
  return write_output(o.out, doc.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-RDM and QFIM functionals of the two-site Bose-Hubbard model"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key-value config file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  CommonOpts o;
  double delta = 0.1;
  bool with_numeric = false;
  double t = 1.0, u = 1.0;
  std::string only, qfim_file, state_name = "noon";
  std::vector<double> dir_flat;

  auto* sweep = app.add_subcommand("sweep", "F and QFIM over the gamma disk");
  add_common(sweep, o);
  auto* becmap = app.add_subcommand("bec-map", "Mzz depletion map near the condensation point");
  add_common(becmap, o);
  becmap->add_option("--delta", delta, "depletion");
  becmap->add_flag("--numeric", with_numeric, "also run the numeric search per point");
  auto* verify = app.add_subcommand("verify", "consistency check suite");
  add_common(verify, o);
  verify->add_option("--only", only, "run a single named check");
  auto* gstate = app.add_subcommand("groundstate", "exact diagonalization of the dimer");
  add_common(gstate, o);
  gstate->add_option("--t", t, "hopping");
  gstate->add_option("--u", u, "on-site interaction");
  auto* witness = app.add_subcommand("witness", "entanglement-depth classification");
  add_common(witness, o);
  witness->add_option("--qfim-file", qfim_file, "JSON file with a 3x3 QFIM");
  witness->add_option("--state", state_name, "noon|coherent|ground");
  witness->add_option("--t", t, "hopping (for --state ground)");
  witness->add_option("--u", u, "interaction (for --state ground)");
  witness->add_option("--direction", dir_flat, "generator direction triples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(o);
    if (*becmap) return cmd_bec_map(o, delta, with_numeric);
    if (*verify) return cmd_verify(o, only);
    if (*gstate) return cmd_groundstate(o, t, u);
    if (*witness) return cmd_witness(o, qfim_file, state_name, t, u, dir_flat);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
