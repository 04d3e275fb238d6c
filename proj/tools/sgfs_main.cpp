//
//  sgfs: free-surface semi-geostrophic flow in geostrophic coordinates,
//  via semi-discrete optimal transport and Hamiltonian particle dynamics.
//
//  Copyright 2026 the sgfs authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.
//
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgfs/config.hpp"
#include "sgfs/dynamics.hpp"
#include "sgfs/io.hpp"
#include "sgfs/oracle_suite.hpp"
#include "sgfs/stability.hpp"
#include "sgfs/verify.hpp"
#include "sgfs/version.hpp"

namespace fs = std::filesystem;
using namespace sgfs;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_checkpoint(const std::string& dir, const SimulationState& state) {
  const std::string tag = std::to_string(state.step_index);
  io::write_state_csv(join(dir, "state_" + tag + ".csv"), state.measure,
                      state.solution.dual, state.solution.tess);
  io::write_surface_csv(join(dir, "surface_" + tag + ".csv"),
                        state.solution.profile);
}

io::DiagnosticsRow diagnostics_of(const SimulationState& state) {
  io::DiagnosticsRow row;
  row.step = state.step_index;
  row.t = state.t;
  row.hamiltonian = state.solution.hamiltonian;
  row.energy_bb = energy_bb(state.solution.tess, state.measure);
  row.mass_residual = state.solution.mass_residual;
  row.surface_residual = state.solution.surface_residual;
  row.min_cell_mass = state.solution.tess.min_mass();
  double vmax = 0.0;
  for (std::size_t i = 0; i < state.measure.size(); ++i) {
    const Vec3 u = apply_j(state.measure.points[i] -
                           state.solution.tess.barycenter(i));
    vmax = std::fmax(vmax, norm(u));
  }
  row.max_speed = vmax;
  return row;
}

void write_meta(const std::string& dir, const RunConfig& cfg,
                const std::vector<io::DiagnosticsRow>& rows,
                const std::string& status) {
  nlohmann::ordered_json j;
  j["tool_version"] = kVersion;
  j["status"] = status;
  j["config"] = config_to_json(cfg);
  if (!rows.empty()) {
    const double h0 = rows.front().hamiltonian;
    double drift = 0.0;
    for (const auto& r : rows)
      drift = std::fmax(drift, std::abs(r.hamiltonian - h0));
    j["summary"] = {
        {"steps_completed", rows.back().step},
        {"H0", h0},
        {"H_final", rows.back().hamiltonian},
        {"max_abs_H_drift", drift},
        {"max_rel_H_drift", std::abs(h0) > 0 ? drift / std::abs(h0) : 0.0},
        {"final_mass_residual", rows.back().mass_residual},
        {"final_surface_residual", rows.back().surface_residual}};
  }
  io::write_json(join(dir, "meta.json"), j);
}

int do_run(const RunConfig& cfg, const std::string& dir, bool init_only) {
  fs::create_directories(dir);

  std::vector<io::DiagnosticsRow> rows;
  SimulationState state;
  try {
    const GeostrophicMeasure nu0 = discretize(cfg.density, cfg.n_per_axis);
    state = make_state(0.0, 0, nu0, cfg.base, cfg.surface);
  } catch (const SolverError& e) {
    std::cerr << "solver error during initialisation: " << e.what() << "\n";
    return kExitSolver;
  }

  io::write_freesurface_log(join(dir, "freesurface_log.csv"),
                            state.solution.history);
  write_checkpoint(dir, state);
  rows.push_back(diagnostics_of(state));
  std::cout << "H = " << io::fmt_g17(state.solution.hamiltonian) << "\n";

  if (init_only) {
    io::write_diagnostics_csv(join(dir, "diagnostics.csv"), rows);
    write_meta(dir, cfg, rows, "ok");
    return 0;
  }

  for (int k = 1; k <= cfg.n_steps; ++k) {
    try {
      state = step(state, cfg.dt, cfg.scheme, cfg.base, cfg.surface);
    } catch (const SolverError& e) {
      std::cerr << "solver error at step " << k << ": " << e.what() << "\n";
      write_checkpoint(dir, state);  // last valid state
      io::write_diagnostics_csv(join(dir, "diagnostics.csv"), rows);
      write_meta(dir, cfg, rows, "aborted");
      return kExitSolver;
    }
    rows.push_back(diagnostics_of(state));
    if (k % cfg.checkpoint_every == 0 || k == cfg.n_steps)
      write_checkpoint(dir, state);
  }

  io::write_diagnostics_csv(join(dir, "diagnostics.csv"), rows);
  write_meta(dir, cfg, rows, "ok");
  const double h0 = rows.front().hamiltonian;
  double drift = 0.0;
  for (const auto& r : rows)
    drift = std::fmax(drift, std::abs(r.hamiltonian - h0));
  std::cout << "completed " << cfg.n_steps << " steps, |dH|/|H0| = "
            << io::fmt_g17(std::abs(h0) > 0 ? drift / std::abs(h0) : 0.0)
            << "\n";
  return 0;
}

int do_verify(const RunConfig& cfg, const std::string& dir,
              const std::string& state_path) {
  fs::create_directories(dir);

  io::LoadedState loaded = io::read_state_csv(state_path);
  const fs::path sp(state_path);
  std::string name = sp.filename().string();
  if (name.rfind("state_", 0) != 0) {
    std::cerr << "state file must be named state_<step>.csv\n";
    return kExitVerify;
  }
  name.replace(0, 6, "surface_");
  const std::string surface_path = (sp.parent_path() / name).string();

  loaded.measure.validate();
  const SurfaceProfile profile =
      io::read_surface_csv(surface_path, cfg.base);
  const ColumnQuadrature quad = column_quadrature(cfg.base);
  const LaguerreTessellation tess =
      build_tessellation(profile, quad, loaded.measure, loaded.dual);

  // The stored solver columns must reproduce from the stored (h, psi).
  double consistency = 0.0;
  for (std::size_t i = 0; i < loaded.measure.size(); ++i) {
    consistency = std::fmax(consistency, std::abs(tess.cells[i].mass -
                                                  loaded.stored_cell_mass[i]));
    if (tess.cells[i].mass > 0.0) {
      const Vec3 c = tess.barycenter(i);
      consistency =
          std::fmax(consistency, norm(c - loaded.stored_barycenter[i]));
    }
  }
  if (consistency > 1e-9) {
    nlohmann::ordered_json j;
    j["probe"] = "state_consistency";
    j["max_gap"] = consistency;
    j["tolerance"] = 1e-9;
    j["pass"] = false;
    io::write_json(join(dir, "verify_state_consistency.json"), j);
    std::cerr << "failed probes: state_consistency\n";
    return kExitVerify;
  }

  const auto results =
      run_probes(cfg, profile, loaded.measure, loaded.dual, tess);
  std::vector<std::string> failed;
  for (const auto& r : results) {
    io::write_json(join(dir, "verify_" + r.name + ".json"), r.report);
    std::cout << (r.pass ? "pass " : "FAIL ") << r.name << "\n";
    if (!r.pass) failed.push_back(r.name);
  }
  if (!failed.empty()) {
    std::cerr << "failed probes:";
    for (const auto& f : failed) std::cerr << ' ' << f;
    std::cerr << "\n";
    return kExitVerify;
  }
  return 0;
}

int do_oracle(const RunConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  const OracleOutcome outcome = run_oracle_suite(cfg);
  io::write_json(join(dir, "oracle_report.json"), outcome.report);
  for (auto it = outcome.report.begin(); it != outcome.report.end(); ++it) {
    if (!it.value().is_object()) continue;
    std::cout << (it.value().value("pass", false) ? "pass " : "FAIL ")
              << it.key() << "\n";
  }
  return outcome.pass ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-surface semi-geostrophic simulator in geostrophic "
               "coordinates"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, state_path, out_override;

  auto add_common = [&](CLI::App* sub, bool needs_state) {
    sub->add_option("--config", config_path, "run configuration (JSON)")
        ->required();
    if (needs_state)
      sub->add_option("--state", state_path, "state_<step>.csv checkpoint")
          ->required();
    sub->add_option("--out", out_override, "override the output directory");
  };

  CLI::App* c_init = app.add_subcommand("init", "compute the initial state");
  CLI::App* c_run = app.add_subcommand("run", "run the full trajectory");
  CLI::App* c_verify =
      app.add_subcommand("verify", "run verification probes on a checkpoint");
  CLI::App* c_oracle =
      app.add_subcommand("oracle", "compare the solver against brute force");
  add_common(c_init, false);
  add_common(c_run, false);
  add_common(c_verify, true);
  add_common(c_oracle, false);

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  std::string out_dir;
  try {
    cfg = load_config(config_path);
    // the override redirects output; meta.json records the config as given
    out_dir = out_override.empty() ? cfg.out_dir : out_override;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (c_init->parsed()) return do_run(cfg, out_dir, true);
    if (c_run->parsed()) return do_run(cfg, out_dir, false);
    if (c_verify->parsed()) return do_verify(cfg, out_dir, state_path);
    if (c_oracle->parsed()) return do_oracle(cfg, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
