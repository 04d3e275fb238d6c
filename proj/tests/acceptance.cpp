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
// End-to-end acceptance suite. Each criterion prints one pass/fail line;
// the process exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sgfs/config.hpp"
#include "sgfs/dynamics.hpp"
#include "sgfs/oracles.hpp"
#include "sgfs/rng.hpp"
#include "sgfs/stability.hpp"

namespace fs = std::filesystem;
using namespace sgfs;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& title,
            const std::string& detail) {
  std::printf("criterion %d %s  %s: %s\n", criterion, pass ? "PASS" : "FAIL",
              title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

BaseGrid make_grid(int n, int q) {
  BaseGrid g;
  g.lx = 1.0;
  g.ly = 1.0;
  g.nx = n;
  g.ny = n;
  g.qx = q;
  g.qy = q;
  return g;
}

// deterministic smooth admissible profile for the transport instances
SurfaceProfile wavy_profile(const BaseGrid& g, Rng& rng) {
  SurfaceProfile p = constant_profile(g);
  const double a = rng.uniform(0.05, 0.25);
  const double b = rng.uniform(0.05, 0.25);
  const double ph = rng.uniform(0.0, 6.28);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double u = static_cast<double>(i) / (g.nx - 1);
      const double v = static_cast<double>(j) / (g.ny - 1);
      p.at(i, j) *= 1.0 + a * std::sin(6.28 * u + ph) +
                    b * std::cos(6.28 * v - ph);
    }
  return normalize_volume(p, 1.0);
}

GeostrophicMeasure random_instance(Rng& rng, int n) {
  GeostrophicMeasure m;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    m.points.push_back({rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75),
                        rng.uniform(0.6, 1.6) + 2e-3 * i});
    m.weights.push_back(rng.uniform(0.5, 1.5));
    total += m.weights.back();
  }
  for (double& w : m.weights) w /= total;
  m.support = {{0.0, 0.0, 0.3}, {1.0, 1.0, 2.2}};
  return m;
}

GeostrophicMeasure four_particles() {
  GeostrophicMeasure m;
  m.points = {{0.38, 0.42, 0.9},
              {0.62, 0.45, 1.15},
              {0.5, 0.62, 1.3},
              {0.45, 0.5, 1.05}};
  m.weights = {0.25, 0.3, 0.25, 0.2};
  m.support = {{0.0, 0.0, 0.4}, {1.0, 1.0, 2.0}};
  return m;
}

std::string sample_config_path() {
  return std::string(SGFS_CONFIG_DIR) + "/sample16.json";
}

// ---------------------------------------------------------------------bin
// 1. semi-discrete OT against the voxelised brute-force assignment
void criterion_1_and_2() {
  const BaseGrid g = make_grid(8, 8);
  const ColumnQuadrature quad = column_quadrature(g);
  Rng rng(20250808);

  double worst_cost_gap = 0.0;
  double worst_mass = 0.0;
  bool assignments_equal = true;
  bool matchings_equal = true;
  const int instances = 20;

  for (int k = 0; k < instances; ++k) {
    const int n = 2 + (k % 3);
    const SurfaceProfile profile = wavy_profile(g, rng);
    const GeostrophicMeasure nu = random_instance(rng, n);

    DualSolveOptions dopts;
    dopts.tol_mass = 1e-9;
    const DualState psi =
        solve_dual(profile, quad, nu, DualState::zeros(n), dopts);
    const auto tess = build_tessellation(profile, quad, nu, psi);
    worst_mass = std::fmax(worst_mass, mass_residual_of(tess, nu));

    const auto voxel =
        oracles::voxel_assignment(profile, nu, psi.psi, 192, 256);
    const double gap = std::abs(voxel.cost - transport_cost(tess)) /
                       std::fmax(std::abs(voxel.cost), 1e-12);
    worst_cost_gap = std::fmax(worst_cost_gap, gap);

    // 2. identical optimal assignments under both ground costs
    const auto atoms = oracles::voxelize_source(profile, 6, 6);
    const auto pe =
        oracles::lp_plan(atoms, nu, oracles::GroundCost::transport_e);
    const auto ps =
        oracles::lp_plan(atoms, nu, oracles::GroundCost::squared_euclidean);
    assignments_equal = assignments_equal && (pe.support == ps.support);

    // equal-weight matchings drawn from the fluid domain
    const int kpts = 6;
    std::vector<Vec3> xs;
    for (int s = 0; s < kpts; ++s) {
      const double x1 = rng.uniform(0.05, 0.95);
      const double x2 = rng.uniform(0.05, 0.95);
      xs.push_back({x1, x2,
                    rng.next_double() * eval_height(profile, x1, x2)});
    }
    std::vector<Vec3> ys;
    for (int s = 0; s < kpts; ++s)
      ys.push_back({rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8),
                    rng.uniform(0.6, 1.6)});
    std::vector<double> ce(kpts * kpts), cs(kpts * kpts);
    for (int i = 0; i < kpts; ++i)
      for (int j = 0; j < kpts; ++j) {
        ce[i * kpts + j] = cost_e(xs[i], ys[j]);
        cs[i * kpts + j] = 0.5 * norm2(xs[i] - ys[j]);
      }
    std::vector<int> perm_e, perm_s;
    detail::min_cost_matching(ce, kpts, &perm_e);
    detail::min_cost_matching(cs, kpts, &perm_s);
    matchings_equal = matchings_equal && (perm_e == perm_s);
  }

  report(1, worst_cost_gap <= 1e-4 && worst_mass <= 1e-9,
         "semi-discrete OT oracle equivalence",
         "20 instances, n in {2,3,4}: max relative cost gap " +
             fmt(worst_cost_gap) + " (tol 1e-4), max mass residual " +
             fmt(worst_mass) + " (tol 1e-9)");
  report(2, assignments_equal && matchings_equal, "cost equivalence",
         std::string("optimal assignments identical under e and half squared "
                     "euclidean: lp plans ") +
             (assignments_equal ? "equal" : "DIFFER") + ", matchings " +
             (matchings_equal ? "equal" : "DIFFER"));
}

// ---------------------------------------------------------------------
// 3. free-surface fixed point against exhaustive lattice searches
void criterion_3() {
  SurfaceSolveOptions opts;
  bool pass = true;
  std::string detail;

  GeostrophicMeasure one;
  one.points = {{0.42, 0.57, 1.1}};
  one.weights = {1.0};
  one.support = {{0, 0, 0.5}, {1, 1, 2}};
  GeostrophicMeasure two;
  two.points = {{0.35, 0.5, 0.9}, {0.65, 0.5, 1.3}};
  two.weights = {0.5, 0.5};
  two.support = {{0, 0, 0.5}, {1, 1, 2}};

  struct Case {
    const char* tag;
    const GeostrophicMeasure* nu;
    BaseGrid grid;
    bool full;
  };
  const std::vector<Case> cases = {
      {"n1-2x2", &one, make_grid(2, 8), true},
      {"n2-2x2", &two, make_grid(2, 8), true},
      {"n1-6x6", &one, make_grid(6, 3), false},
      {"n2-6x6", &two, make_grid(6, 3), false},
  };

  for (const Case& c : cases) {
    const auto sol = initial_surface(*c.nu, c.grid, opts);
    const auto lat = c.full
                         ? oracles::lattice_search_full(*c.nu, c.grid, 16, 2.5)
                         : oracles::lattice_sweep(*c.nu, c.grid, 16, 2.5);
    const double gap = sol.hamiltonian - lat.cost;
    double hgap = 0.0;
    for (std::size_t k = 0; k < sol.profile.heights.size(); ++k)
      hgap = std::fmax(hgap, std::abs(sol.profile.heights[k] -
                                      lat.profile.heights[k]));
    const double slack = 1e-7 * (1.0 + std::abs(sol.hamiltonian));
    const bool ok = gap >= -slack && gap <= lat.cost_resolution + slack &&
                    hgap <= lat.height_quantum + 1e-6;
    pass = pass && ok;
    detail += std::string(c.tag) + " gap " + fmt(gap) + "/" +
              fmt(lat.cost_resolution) + " h " + fmt(hgap) + "/" +
              fmt(lat.height_quantum) + "; ";

    // A-stability: re-solving the inner problem on the converged surface
    // moves the cost by less than 1e-9
    const ColumnQuadrature quad = column_quadrature(c.grid);
    DualSolveOptions dopts;
    dopts.tol_mass = opts.tol_mass;
    const DualState fresh = solve_dual(sol.profile, quad, *c.nu,
                                       DualState::zeros(c.nu->size()), dopts);
    const auto tess = build_tessellation(sol.profile, quad, *c.nu, fresh);
    const double astab = std::abs(transport_cost(tess) - sol.hamiltonian);
    pass = pass && astab <= 1e-9;
    detail += "astab " + fmt(astab) + "; ";
  }

  // uniqueness probe: two starts agree within ten surface tolerances
  for (const GeostrophicMeasure* nu : {&one, &two}) {
    const BaseGrid g = make_grid(8, 3);
    const auto a = solve_free_surface(*nu, g, constant_profile(g), opts);
    SurfaceProfile bowl = constant_profile(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double dx = g.node_x(i) - 0.5;
        const double dy = g.node_y(j) - 0.5;
        bowl.at(i, j) = 0.5 + dx * dx + dy * dy;
      }
    bowl = normalize_volume(bowl, 1.0);
    const auto b = solve_free_surface(*nu, g, bowl, opts);
    double gap = 0.0;
    for (std::size_t k = 0; k < a.profile.heights.size(); ++k)
      gap = std::fmax(gap,
                      std::abs(a.profile.heights[k] - b.profile.heights[k]));
    pass = pass && gap <= 10.0 * opts.tol_surface;
    detail += "two-start " + fmt(gap) + "; ";
  }

  report(3, pass, "free-surface fixed point vs exhaustive lattice search",
         detail);
}

// ---------------------------------------------------------------------
// 4. Hamiltonian conservation on the sample 16-particle configuration
void criterion_4() {
  RunConfig cfg = load_config(sample_config_path());
  const GeostrophicMeasure nu0 = discretize(cfg.density, cfg.n_per_axis);

  auto drift_of = [&](double dt, int steps) {
    SimulationState s = make_state(0.0, 0, nu0, cfg.base, cfg.surface);
    const double h0 = s.solution.hamiltonian;
    double drift = 0.0;
    for (int k = 0; k < steps; ++k) {
      s = step(s, dt, TimeScheme::heun, cfg.base, cfg.surface);
      drift = std::fmax(drift, std::abs(s.solution.hamiltonian - h0));
    }
    return drift / std::abs(h0);
  };

  const double d1 = drift_of(0.01, 100);
  const double d2 = drift_of(0.005, 200);
  const double ratio = d1 / std::fmax(d2, 1e-300);
  const bool pass = nu0.size() == 16 && d1 <= 1e-3 && ratio >= 1.8;
  report(4, pass, "hamiltonian conservation",
         "16 particles, 100 heun steps: rel drift " + fmt(d1) +
             " (tol 1e-3); halving dt gives ratio " + fmt(ratio) +
             " (need >= 1.8)");
}

// ---------------------------------------------------------------------
// 5. velocity characterisation via directional derivatives
void criterion_5() {
  const BaseGrid g = make_grid(8, 2);
  SurfaceSolveOptions opts;
  opts.tol_surface = 1e-9;
  opts.tol_mass = 1e-11;
  const GeostrophicMeasure nu = four_particles();

  int tested = 0;
  double worst = 0.0;
  std::uint64_t seed = 900;
  while (tested < 10) {
    const TestField f = random_field(seed++, nu.support, 2, true);
    const auto d = hamiltonian_directional_derivative(nu, g, opts, f, 1e-4);
    if (std::abs(d.predicted) < 5e-3) continue;  // avoid a vanishing scale
    worst = std::fmax(worst,
                      std::abs(d.fd - d.predicted) / std::abs(d.predicted));
    ++tested;
  }
  report(5, worst <= 0.05, "velocity characterisation",
         "10 fields at s = 1e-4: worst relative defect " + fmt(worst) +
             " (tol 5%)");
}

// ---------------------------------------------------------------------
// 6. structural invariants
void criterion_6() {
  const BaseGrid g = make_grid(8, 2);
  SurfaceSolveOptions opts;
  const GeostrophicMeasure nu0 = four_particles();

  bool weights_bitwise = true;
  bool y3_bitwise = true;
  double energy_resid = 0.0;
  SimulationState s = make_state(0.0, 0, nu0, g, opts);
  for (int k = 0; k < 10; ++k) {
    s = step(s, 0.01, TimeScheme::heun, g, opts);
    for (std::size_t i = 0; i < nu0.size(); ++i) {
      weights_bitwise =
          weights_bitwise && (s.measure.weights[i] == nu0.weights[i]);
      y3_bitwise = y3_bitwise && (s.measure.points[i].z == nu0.points[i].z);
    }
    const double e = energy_bb(s.solution.tess, s.measure);
    energy_resid =
        std::fmax(energy_resid,
                  std::abs(energy_identity_residual(s.solution.tess,
                                                    s.measure)) /
                      (1.0 + std::abs(e)));
  }

  // gauge invariance of the masses under a constant dual shift
  const ColumnQuadrature quad = column_quadrature(g);
  DualState shifted = s.solution.dual;
  for (double& v : shifted.psi) v += 0.7321;
  const auto tess2 = build_tessellation(s.solution.profile, quad, s.measure,
                                        shifted);
  double gauge_gap = 0.0;
  for (std::size_t i = 0; i < nu0.size(); ++i)
    gauge_gap = std::fmax(gauge_gap, std::abs(tess2.cells[i].mass -
                                              s.solution.tess.cells[i].mass));

  const bool pass = weights_bitwise && y3_bitwise && energy_resid <= 1e-12 &&
                    gauge_gap <= 1e-12;
  report(6, pass, "structural invariants",
         std::string("weights ") + (weights_bitwise ? "bitwise" : "CHANGED") +
             ", y3 " + (y3_bitwise ? "bitwise" : "CHANGED") +
             ", gauge mass gap " + fmt(gauge_gap) +
             " (tol 1e-12), energy identity " + fmt(energy_resid) +
             " (tol 1e-12)");
}

// ---------------------------------------------------------------------
// 7. stability audits
void criterion_7() {
  const BaseGrid g = make_grid(8, 2);
  SurfaceSolveOptions opts;
  const GeostrophicMeasure nu = four_particles();
  const ColumnQuadrature quad = column_quadrature(g);

  // gradient monotonicity along a short trajectory
  bool monotone = true;
  SimulationState s = make_state(0.0, 0, nu, g, opts);
  for (int k = 0; k <= 5; ++k) {
    const auto rep = check_gradient_monotonicity(
        s.solution.profile, s.measure, s.solution.dual, 10000, 77 + k);
    monotone = monotone && rep.violations == 0;
    if (k < 5) s = step(s, 0.01, TimeScheme::heun, g, opts);
  }

  // second inner variation on ten random fields at two smoothing scales
  const auto sol = initial_surface(nu, g, opts);
  const double s0 = 2.0 * g.dx() / g.qx;
  bool psd = true;
  const Box3 box{{0.0, 0.0, 0.0}, {1.0, 1.0, 0.4}};
  for (std::uint64_t seed = 500; seed < 510; ++seed) {
    const TestField f = random_field(seed, box, 2, false);
    const double nrm = field_norm2(sol.profile, quad, f);
    for (double scale : {s0, 0.5 * s0}) {
      const double v = second_inner_variation(sol.profile, quad, nu,
                                              sol.dual, f, f, scale);
      psd = psd && v >= -1e-6 * nrm;
    }
  }

  // subdifferential inequality on twenty random 4-particle pairs
  Rng rng(4242);
  double worst_slack = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    GeostrophicMeasure mu = random_instance(rng, 4);
    const TestField f = random_field(7000 + pair, mu.support, 2, false);
    const GeostrophicMeasure moved = perturb(mu, f, rng.uniform(0.02, 0.15));
    const auto rep = check_subdifferential_inequality(mu, moved, g, opts);
    worst_slack = std::fmin(worst_slack, rep.slack);
  }

  const bool pass = monotone && psd && worst_slack >= -1e-8;
  report(7, pass, "stability audits",
         std::string("monotonicity ") + (monotone ? "clean" : "VIOLATED") +
             ", second variation " + (psd ? "psd" : "NEGATIVE") +
             ", subdifferential min slack " + fmt(worst_slack) +
             " (tol -1e-8)");
}

// ---------------------------------------------------------------------
// 8. byte-identical reruns of the sample configuration
void criterion_8() {
  const fs::path base = fs::temp_directory_path() / "sgfs_acceptance";
  const fs::path out_a = base / "det_a";
  const fs::path out_b = base / "det_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  auto run_into = [&](const fs::path& dir) {
    const std::string cmd = std::string(SGFS_BIN_PATH) + " run --config " +
                            sample_config_path() + " --out " + dir.string() +
                            " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const int ra = run_into(out_a);
  const int rb = run_into(out_b);

  bool pass = ra == 0 && rb == 0;
  std::string mismatch = "all files byte-identical";
  if (pass) {
    std::map<std::string, fs::path> files_a;
    for (const auto& e : fs::directory_iterator(out_a))
      files_a[e.path().filename().string()] = e.path();
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(out_b)) {
      const auto it = files_a.find(e.path().filename().string());
      if (it == files_a.end()) {
        pass = false;
        mismatch = "file set differs: " + e.path().filename().string();
        break;
      }
      std::ifstream fa(it->second, std::ios::binary);
      std::ifstream fb(e.path(), std::ios::binary);
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (sa.str() != sb.str()) {
        pass = false;
        mismatch = "bytes differ: " + e.path().filename().string();
        break;
      }
      ++compared;
    }
    if (pass && compared != files_a.size()) {
      pass = false;
      mismatch = "file counts differ";
    }
    if (pass) mismatch += " (" + std::to_string(compared) + " files)";
  } else {
    mismatch = "run exited nonzero";
  }
  report(8, pass, "determinism", mismatch);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  const auto t1 = std::chrono::steady_clock::now();
  std::printf("acceptance finished in %.1f s: %s\n",
              std::chrono::duration<double>(t1 - t0).count(),
              g_failures == 0 ? "all criteria passed"
                              : (std::to_string(g_failures) +
                                 " criteria failed").c_str());
  return g_failures == 0 ? 0 : 1;
}
