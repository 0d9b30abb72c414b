// nlch: command line front end for the nonlocal Cahn-Hilliard solver and its
// verification harness. Every subcommand takes a config file, writes its
// outputs into a run directory and exits 0 on success / 1 on a failed check /
// 2 on usage or runtime errors.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "nlch/config.hpp"
#include "nlch/io.hpp"

namespace {

void usage(std::FILE* to) {
  std::fprintf(to,
               "usage: nlch <command> <config.cfg> [--out DIR] [--tau-rule fixed|eps]\n"
               "\n"
               "commands:\n"
               "  run              integrate one trajectory, write snapshots + diagnostics\n"
               "  gamma-check      nonlocal energy vs Dirichlet energy as epsilon -> 0\n"
               "  poincare-check   nonlocal Poincare ratio over random fields\n"
               "  sweep-lambda     trajectory convergence as both lambdas -> 0\n"
               "  sweep-eps        nonlocal-to-local trajectory convergence\n"
               "  stability        continuous dependence on the initial datum\n"
               "  kernel-validate  mollifier normalization for both families\n"
               "\n"
               "--out DIR overrides [output] dir from the config.\n"
               "--tau-rule overrides [sweep] tau_rule (sweep-eps only).\n");
}

struct Cli {
  std::string command;
  std::string config_path;
  std::string out_override;
  std::string tau_rule_override;
};

Cli parse_args(int argc, char** argv) {
  Cli cli;
  std::vector<std::string> positional;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-h" || a == "--help") {
      usage(stdout);
      std::exit(0);
    } else if (a == "--out") {
      if (i + 1 >= argc) throw std::invalid_argument("--out needs a directory argument");
      cli.out_override = argv[++i];
    } else if (a == "--tau-rule") {
      if (i + 1 >= argc) throw std::invalid_argument("--tau-rule needs 'fixed' or 'eps'");
      cli.tau_rule_override = argv[++i];
      if (cli.tau_rule_override != "fixed" && cli.tau_rule_override != "eps")
        throw std::invalid_argument("--tau-rule must be 'fixed' or 'eps'");
    } else if (!a.empty() && a[0] == '-') {
      throw std::invalid_argument("unknown option " + a);
    } else {
      positional.push_back(a);
    }
  }
  if (positional.size() != 2)
    throw std::invalid_argument("expected: nlch <command> <config.cfg>");
  cli.command = positional[0];
  cli.config_path = positional[1];
  return cli;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// Writes report.csv + manifest.txt for a harness check and prints the rows.
int finish_check(const nlch::ConvergenceReport& rep, const std::string& dir,
                 const std::string& cmdline, const nlch::ConfigFile& cf) {
  nlch::ensure_dir(dir);
  nlch::write_report(dir + "/report.csv", rep);
  nlch::write_manifest(dir + "/manifest.txt", cmdline, rep.pass ? "PASS" : "FAIL", rep.notes, cf);
  std::printf("%s\n", rep.header.c_str());
  for (const auto& row : rep.rows) std::printf("%s\n", row.c_str());
  for (const auto& [k, v] : rep.notes) std::printf("# %s = %s\n", k.c_str(), v.c_str());
  std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 1;
}

int main_checked(int argc, char** argv) {
  const Cli cli = parse_args(argc, argv);
  const std::string cmdline = command_line(argc, argv);

  nlch::ConfigFile cf = nlch::parse_config_file(cli.config_path);
  nlch::OutputSpec out = nlch::build_output_spec(cf);
  if (!cli.out_override.empty()) out.dir = cli.out_override;
  if (!cli.tau_rule_override.empty()) cf.kv["sweep.tau_rule"] = cli.tau_rule_override;

  if (cli.command == "run") {
    const nlch::RunSetup rs = nlch::build_run_setup(cf);
    const nlch::Trajectory traj = nlch::run_and_persist(rs, out, cmdline, cf);
    if (!traj.completed) {
      std::fprintf(stderr, "run aborted at t=%g: %s\n", traj.diagnostics.back().t,
                   traj.abort_reason.c_str());
      return 1;
    }
    std::printf("completed %zu steps, outputs in %s\n", traj.diagnostics.size() - 1,
                out.dir.c_str());
    return 0;
  }

  if (cli.command == "gamma-check") {
    const int dim = cf.integer("domain.dim", 1);
    const auto fam = nlch::parse_family(cf.str("kernel.family", "indicator"), cf.path);
    return finish_check(nlch::gamma_check(dim, fam, nlch::build_gamma_spec(cf)), out.dir, cmdline,
                        cf);
  }
  if (cli.command == "poincare-check") {
    const int dim = cf.integer("domain.dim", 1);
    const auto fam = nlch::parse_family(cf.str("kernel.family", "indicator"), cf.path);
    return finish_check(nlch::poincare_check(dim, fam, nlch::build_poincare_spec(cf)), out.dir,
                        cmdline, cf);
  }
  if (cli.command == "sweep-lambda") {
    const nlch::RunSetup rs = nlch::build_run_setup(cf);
    return finish_check(nlch::lambda_sweep(rs, nlch::build_sweep_spec(cf, "lambda")), out.dir,
                        cmdline, cf);
  }
  if (cli.command == "sweep-eps") {
    const nlch::RunSetup rs = nlch::build_run_setup(cf);
    return finish_check(nlch::eps_sweep(rs, nlch::build_sweep_spec(cf, "eps")), out.dir, cmdline,
                        cf);
  }
  if (cli.command == "stability") {
    const nlch::RunSetup rs = nlch::build_run_setup(cf);
    return finish_check(nlch::stability_check(rs, nlch::build_stability_spec(cf)), out.dir,
                        cmdline, cf);
  }
  if (cli.command == "kernel-validate") {
    const int dim = cf.integer("domain.dim", 1);
    return finish_check(nlch::kernel_validate(dim, nlch::build_validate_spec(cf)), out.dir,
                        cmdline, cf);
  }

  usage(stderr);
  throw std::invalid_argument("unknown command '" + cli.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return main_checked(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nlch: error: %s\n", e.what());
    return 2;
  }
}
