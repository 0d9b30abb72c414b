// config.hpp
// Line-oriented configuration files: `key = value` entries under `[section]`
// headers, '#' comments, nothing fancier. Unknown sections or keys and
// malformed lines are rejected with the offending line number, and duplicate
// keys are an error rather than a silent override.

#ifndef NLCH_CONFIG_HPP
#define NLCH_CONFIG_HPP

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlch/harness.hpp"

namespace nlch {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"domain", {"dim", "n"}},
      {"kernel", {"family", "epsilon"}},
      {"potential", {"type", "theta", "theta0", "c"}},
      {"solver", {"mode", "tau", "lambda_reg", "lambda_yosida", "dt", "t_final", "newton_tol",
                  "newton_max"}},
      {"forcing", {"kind", "amp", "kx", "ky"}},
      {"init", {"kind", "mean", "amp", "kx", "ky", "amp2", "kx2", "ky2", "seed"}},
      {"output", {"dir", "snapshot_every", "write_mu"}},
      {"sweep", {"parameter", "values", "tau_rule", "norm", "self_test"}},
      {"gamma", {"epsilons", "oversample", "kx", "ky"}},
      {"poincare", {"epsilons", "samples", "seed", "oversample"}},
      {"stability", {"sizes", "pert_kx", "pert_ky"}},
      {"validate", {"epsilons", "delta"}},
  };
  return schema;
}

struct ConfigFile {
  std::string path;
  std::map<std::string, std::string> kv;  // "section.key" -> raw value

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string str(const std::string& key, const std::string& def) const {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
  }

  double num(const std::string& key, double def) const {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
      throw std::invalid_argument(path + ": key '" + key + "' is not a number: " + it->second);
    return v;
  }

  int integer(const std::string& key, int def) const {
    const double v = num(key, def);
    const int i = static_cast<int>(v);
    if (i != v) throw std::invalid_argument(path + ": key '" + key + "' is not an integer");
    return i;
  }

  bool flag(const std::string& key, bool def) const {
    const std::string v = str(key, def ? "1" : "0");
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw std::invalid_argument(path + ": key '" + key + "' is not a boolean: " + v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    auto it = kv.find(key);
    if (it == kv.end()) return out;
    std::istringstream iss(it->second);
    std::string tok;
    while (iss >> tok) {
      char* end = nullptr;
      out.push_back(std::strtod(tok.c_str(), &end));
      if (end == tok.c_str() || *end != '\0')
        throw std::invalid_argument(path + ": key '" + key + "' has a bad entry: " + tok);
    }
    return out;
  }
};

inline std::string trim_(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  ConfigFile cf;
  cf.path = path;
  std::string line, section;
  int lineno = 0;
  const auto& schema = config_schema();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim_(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw std::invalid_argument(where + ": malformed section header");
      section = trim_(t.substr(1, t.size() - 2));
      if (!schema.count(section))
        throw std::invalid_argument(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected 'key = value'");
    if (section.empty())
      throw std::invalid_argument(where + ": entry outside any [section]");
    const std::string key = trim_(t.substr(0, eq));
    const std::string val = trim_(t.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument(where + ": empty key or value");
    if (!schema.at(section).count(key))
      throw std::invalid_argument(where + ": unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (cf.kv.count(full)) throw std::invalid_argument(where + ": duplicate key '" + full + "'");
    cf.kv[full] = val;
  }
  return cf;
}

// ------------------------------------------------------------ struct builders

inline MollifierSpec::Family parse_family(const std::string& s, const std::string& ctx) {
  if (s == "indicator") return MollifierSpec::indicator;
  if (s == "bump") return MollifierSpec::bump;
  throw std::invalid_argument(ctx + ": unknown mollifier family '" + s + "'");
}

inline RunSetup build_run_setup(const ConfigFile& cf) {
  const int dim = cf.integer("domain.dim", 1);
  const int n = cf.integer("domain.n", 128);
  RunSetup rs{Grid(dim, n)};

  rs.family = parse_family(cf.str("kernel.family", "indicator"), cf.path);
  rs.epsilon = cf.num("kernel.epsilon", 0.1);
  if (!(rs.epsilon > 0.0)) throw std::invalid_argument(cf.path + ": kernel.epsilon must be > 0");

  const std::string pt = cf.str("potential.type", "polynomial");
  if (pt == "polynomial") rs.pot.kind = PotentialSpec::polynomial;
  else if (pt == "logarithmic") rs.pot.kind = PotentialSpec::logarithmic;
  else if (pt == "double_obstacle") rs.pot.kind = PotentialSpec::double_obstacle;
  else throw std::invalid_argument(cf.path + ": unknown potential.type '" + pt + "'");
  rs.pot.theta = cf.num("potential.theta", rs.pot.theta);
  rs.pot.theta0 = cf.num("potential.theta0", rs.pot.theta0);
  rs.pot.c = cf.num("potential.c", rs.pot.c);
  validate_potential(rs.pot);

  const std::string mode = cf.str("solver.mode", "nonlocal");
  if (mode == "nonlocal") rs.solver.mode = SolverParams::nonlocal;
  else if (mode == "local") rs.solver.mode = SolverParams::local;
  else throw std::invalid_argument(cf.path + ": unknown solver.mode '" + mode + "'");
  if (rs.solver.mode == SolverParams::local) rs.solver.lambda_reg = 0.0;
  rs.solver.tau = cf.num("solver.tau", rs.solver.tau);
  rs.solver.lambda_reg = cf.num("solver.lambda_reg", rs.solver.lambda_reg);
  rs.solver.lambda_yosida = cf.num("solver.lambda_yosida", rs.solver.lambda_yosida);
  rs.solver.dt = cf.num("solver.dt", rs.solver.dt);
  rs.solver.t_final = cf.num("solver.t_final", rs.solver.t_final);
  rs.solver.newton_tol = cf.num("solver.newton_tol", rs.solver.newton_tol);
  rs.solver.newton_max = cf.integer("solver.newton_max", rs.solver.newton_max);
  validate_solver_params(rs.solver);

  const std::string fk = cf.str("forcing.kind", "zero");
  if (fk == "zero") rs.forcing.kind = ForcingSpec::zero;
  else if (fk == "constant") rs.forcing.kind = ForcingSpec::constant;
  else if (fk == "time_ramp") rs.forcing.kind = ForcingSpec::time_ramp;
  else throw std::invalid_argument(cf.path + ": unknown forcing.kind '" + fk + "'");
  rs.forcing.amp = cf.num("forcing.amp", 0.0);
  rs.forcing.kx = cf.integer("forcing.kx", 0);
  rs.forcing.ky = cf.integer("forcing.ky", 0);

  const std::string ik = cf.str("init.kind", "cosine");
  if (ik == "constant") rs.init.kind = InitSpec::constant;
  else if (ik == "cosine") rs.init.kind = InitSpec::cosine;
  else if (ik == "random") rs.init.kind = InitSpec::random;
  else throw std::invalid_argument(cf.path + ": unknown init.kind '" + ik + "'");
  rs.init.mean = cf.num("init.mean", 0.1);
  rs.init.amp = cf.num("init.amp", 0.2);
  rs.init.kx = cf.integer("init.kx", 1);
  rs.init.ky = cf.integer("init.ky", 0);
  rs.init.amp2 = cf.num("init.amp2", 0.0);
  rs.init.kx2 = cf.integer("init.kx2", 0);
  rs.init.ky2 = cf.integer("init.ky2", 0);
  rs.init.seed = static_cast<unsigned long>(cf.num("init.seed", 1));

  rs.snapshot_every = cf.integer("output.snapshot_every", 0);
  return rs;
}

struct OutputSpec {
  std::string dir = "out";
  int snapshot_every = 0;
  bool write_mu = false;
};

inline OutputSpec build_output_spec(const ConfigFile& cf) {
  OutputSpec os;
  os.dir = cf.str("output.dir", os.dir);
  os.snapshot_every = cf.integer("output.snapshot_every", 0);
  os.write_mu = cf.flag("output.write_mu", false);
  return os;
}

inline GammaSpec build_gamma_spec(const ConfigFile& cf) {
  GammaSpec gs;
  gs.epsilons = cf.list("gamma.epsilons");
  if (gs.epsilons.empty()) gs.epsilons = {0.4, 0.2, 0.1, 0.05};
  gs.oversample = cf.integer("gamma.oversample", gs.oversample);
  gs.kx = cf.integer("gamma.kx", 1);
  gs.ky = cf.integer("gamma.ky", 1);
  return gs;
}

inline PoincareSpec build_poincare_spec(const ConfigFile& cf) {
  PoincareSpec ps;
  ps.epsilons = cf.list("poincare.epsilons");
  if (ps.epsilons.empty()) ps.epsilons = {0.4, 0.2, 0.1, 0.05};
  ps.samples = cf.integer("poincare.samples", ps.samples);
  ps.seed = static_cast<unsigned long>(cf.num("poincare.seed", 42));
  ps.oversample = cf.integer("poincare.oversample", ps.oversample);
  return ps;
}

inline SweepSpec build_sweep_spec(const ConfigFile& cf, const std::string& expected_parameter) {
  const std::string par = cf.str("sweep.parameter", expected_parameter);
  if (par != expected_parameter)
    throw std::invalid_argument(cf.path + ": sweep.parameter is '" + par + "' but the command sweeps " +
                                expected_parameter);
  SweepSpec ss;
  ss.values = cf.list("sweep.values");
  const std::string tr = cf.str("sweep.tau_rule", "fixed");
  if (tr == "fixed") ss.tau_rule = SweepSpec::fixed;
  else if (tr == "eps" || tr == "proportional_to_eps") ss.tau_rule = SweepSpec::proportional_to_eps;
  else throw std::invalid_argument(cf.path + ": unknown sweep.tau_rule '" + tr + "'");
  const std::string nm = cf.str("sweep.norm", "C0_H");
  if (nm == "C0_H") ss.norm = SweepSpec::C0_H;
  else if (nm == "C0_Vstar") ss.norm = SweepSpec::C0_Vstar;
  else if (nm == "L2_H") ss.norm = SweepSpec::L2_H;
  else throw std::invalid_argument(cf.path + ": unknown sweep.norm '" + nm + "'");
  ss.self_test = cf.flag("sweep.self_test", false);
  return ss;
}

inline StabilitySpec build_stability_spec(const ConfigFile& cf) {
  StabilitySpec ss;
  ss.sizes = cf.list("stability.sizes");
  if (ss.sizes.empty()) ss.sizes = {1e-2, 1e-3, 1e-4};
  ss.pert_kx = cf.integer("stability.pert_kx", 2);
  ss.pert_ky = cf.integer("stability.pert_ky", 0);
  return ss;
}

inline ValidateSpec build_validate_spec(const ConfigFile& cf) {
  ValidateSpec vs;
  vs.epsilons = cf.list("validate.epsilons");
  if (vs.epsilons.empty()) vs.epsilons = {0.4, 0.2, 0.1, 0.05};
  vs.delta = cf.num("validate.delta", 0.0);
  return vs;
}

}  // namespace nlch

#endif
