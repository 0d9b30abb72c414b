// io.hpp
// Output-side plumbing: run directories, diagnostics/report CSV writers and
// the manifest file that records what a given invocation actually did.

#ifndef NLCH_IO_HPP
#define NLCH_IO_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlch/config.hpp"
#include "nlch/harness.hpp"
#include "nlch/stepper.hpp"

namespace nlch {

inline const char* kToolVersion = "1.0.0";

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

inline void write_diagnostics_csv(const std::string& path,
                                  const std::vector<DiagnosticsRecord>& recs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "step,t,mass,E_nl,E_pot,E_reg,E_total,grad_mu_sq,newton_iters,step_residual\n";
  for (const auto& r : recs) {
    out << r.step << ',' << fmt17(r.t) << ',' << fmt17(r.mass) << ',' << fmt17(r.E_nl) << ','
        << fmt17(r.E_pot) << ',' << fmt17(r.E_reg) << ',' << fmt17(r.E_total) << ','
        << fmt17(r.grad_mu_sq) << ',' << r.newton_iters << ',' << fmt17(r.step_residual) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_report(const std::string& path, const ConvergenceReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << rep.header << '\n';
  for (const auto& row : rep.rows) out << row << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

// The manifest is a '#'-commented preamble (tool version, command line,
// verdict, free-form notes) followed by an echo of the fully resolved
// configuration, which parse_config_file() accepts as-is.
inline void write_manifest(const std::string& path, const std::string& command,
                           const std::string& verdict,
                           const std::vector<std::pair<std::string, std::string>>& notes,
                           const ConfigFile& cf) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# nlch " << kToolVersion << '\n';
  out << "# command: " << command << '\n';
  out << "# verdict: " << verdict << '\n';
  for (const auto& [k, v] : notes) out << "# " << k << " = " << v << '\n';
  // kv is sorted by "section.key", so entries of a section are contiguous
  std::string section;
  for (const auto& [full, val] : cf.kv) {
    const auto dot = full.find('.');
    const std::string sec = full.substr(0, dot);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << full.substr(dot + 1) << " = " << val << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Runs a single trajectory and persists everything under `out.dir`:
// diagnostics.csv, u_######.csv snapshots (mu_######.csv when requested)
// and manifest.txt. Throws nothing on solver aborts; the manifest records
// the verdict either way.
inline Trajectory run_and_persist(const RunSetup& rs, const OutputSpec& out,
                                  const std::string& command, const ConfigFile& cf) {
  ensure_dir(out.dir);
  std::optional<KernelMatrix> km;
  if (rs.solver.mode == SolverParams::nonlocal)
    km = assemble_kernel(rs.grid, make_mollifier(rs.family, rs.epsilon, rs.grid.dim));
  Stepper stepper(rs.grid, rs.solver, rs.pot, rs.forcing, km ? &*km : nullptr);
  const Field u0 = make_field(rs.grid, rs.init);
  Trajectory traj = stepper.run(u0, out.snapshot_every, out.write_mu);

  write_diagnostics_csv(out.dir + "/diagnostics.csv", traj.diagnostics);
  char name[32];
  for (std::size_t k = 0; k < traj.u_snapshots.size(); ++k) {
    std::snprintf(name, sizeof(name), "/u_%06d.csv", traj.snap_steps[k]);
    write_field_csv(rs.grid, traj.u_snapshots[k], out.dir + name);
    // mu is only defined once stepping starts, so no file at step 0
    if (out.write_mu && k > 0 && k < traj.mu_snapshots.size()) {
      std::snprintf(name, sizeof(name), "/mu_%06d.csv", traj.snap_steps[k]);
      write_field_csv(rs.grid, traj.mu_snapshots[k], out.dir + name);
    }
  }

  std::vector<std::pair<std::string, std::string>> notes;
  notes.emplace_back("steps_completed", std::to_string(traj.diagnostics.size() - 1));
  notes.emplace_back("final_mass", fmt17(traj.diagnostics.back().mass));
  notes.emplace_back("final_energy", fmt17(traj.diagnostics.back().E_total));
  if (!traj.completed) notes.emplace_back("abort_reason", traj.abort_reason);
  write_manifest(out.dir + "/manifest.txt", command, traj.completed ? "COMPLETED" : "ABORTED",
                 notes, cf);
  return traj;
}

}  // namespace nlch

#endif
