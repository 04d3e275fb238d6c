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
#include "sgfs/oracle_suite.hpp"

#include <cmath>

#include "sgfs/oracles.hpp"

namespace sgfs {

namespace {

using nlohmann::ordered_json;

SurfaceProfile bump_profile(const BaseGrid& grid) {
  SurfaceProfile p;
  p.grid = grid;
  p.heights.resize(static_cast<std::size_t>(grid.n_nodes()));
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double u = static_cast<double>(i) / (grid.nx - 1);
      const double v = static_cast<double>(j) / (grid.ny - 1);
      p.at(i, j) = 1.0 + 0.25 * std::cos(2.0 * M_PI * u) *
                             std::cos(2.0 * M_PI * v);
    }
  return normalize_volume(p, 1.0);
}

GeostrophicMeasure three_particles(const BaseGrid& grid) {
  GeostrophicMeasure nu;
  const double cx = grid.ox + 0.5 * grid.lx;
  const double cy = grid.oy + 0.5 * grid.ly;
  nu.points = {{cx - 0.15 * grid.lx, cy - 0.1 * grid.ly, 0.9},
               {cx + 0.18 * grid.lx, cy + 0.05 * grid.ly, 1.2},
               {cx - 0.02 * grid.lx, cy + 0.14 * grid.ly, 1.5}};
  nu.weights = {0.3, 0.4, 0.3};
  nu.support = {{grid.ox, grid.oy, 0.5}, {grid.ox + grid.lx,
                                          grid.oy + grid.ly, 2.0}};
  return nu;
}

}  // namespace

OracleOutcome run_oracle_suite(const RunConfig& cfg) {
  OracleOutcome out;
  out.pass = true;
  out.report = ordered_json::object();

  // Transport: solver against the dense voxel assignment and the
  // pairwise-sweep column assignment.
  {
    const BaseGrid& grid = cfg.base;
    const SurfaceProfile profile = bump_profile(grid);
    const ColumnQuadrature quad = column_quadrature(grid);
    const GeostrophicMeasure nu = three_particles(grid);

    DualSolveOptions dopts;
    dopts.tol_mass = cfg.surface.tol_mass;
    dopts.max_iter = cfg.surface.max_iter;
    dopts.eps_floor = cfg.surface.eps_floor;
    const DualState psi = solve_dual(profile, quad, nu,
                                     DualState::zeros(nu.size()), dopts);
    const LaguerreTessellation tess =
        build_tessellation(profile, quad, nu, psi);
    const double solver_cost = transport_cost(tess);

    const auto voxel = oracles::voxel_assignment(profile, nu, psi.psi, 192, 384);
    const double cost_gap =
        std::abs(voxel.cost - solver_cost) / std::fmax(std::abs(voxel.cost),
                                                       1e-12);

    const auto column = oracles::column_assignment(profile, quad, nu, psi.psi);
    double column_gap = 0.0;
    double nu_gap = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      column_gap = std::fmax(column_gap, std::abs(column.masses[i] -
                                                  tess.cells[i].mass));
      nu_gap = std::fmax(nu_gap, std::abs(tess.cells[i].mass - nu.weights[i]));
    }

    const auto atoms = oracles::voxelize_source(profile, 6, 6);
    const auto plan_e = oracles::lp_plan(atoms, nu,
                                         oracles::GroundCost::transport_e);
    const auto plan_sq =
        oracles::lp_plan(atoms, nu, oracles::GroundCost::squared_euclidean);
    const bool same_support = plan_e.support == plan_sq.support;

    const bool pass = cost_gap <= 1e-4 && column_gap <= 1e-9 &&
                      nu_gap <= cfg.surface.tol_mass && same_support;
    out.report["transport"] = {
        {"solver_cost", solver_cost},
        {"voxel_cost", voxel.cost},
        {"relative_cost_gap", cost_gap},
        {"cost_gap_tolerance", 1e-4},
        {"column_mass_gap", column_gap},
        {"column_mass_tolerance", 1e-9},
        {"mass_residual", nu_gap},
        {"mass_tolerance", cfg.surface.tol_mass},
        {"cost_equivalent_assignments", same_support},
        {"pass", pass}};
    out.pass = out.pass && pass;
  }

  // Free surface: one particle against the exhaustive lattice search on a
  // 2x2 node grid.
  {
    BaseGrid grid2 = cfg.base;
    grid2.nx = 2;
    grid2.ny = 2;
    grid2.qx = std::max(cfg.base.qx, 8);
    grid2.qy = std::max(cfg.base.qy, 8);

    GeostrophicMeasure nu;
    nu.points = {{grid2.ox + 0.4 * grid2.lx, grid2.oy + 0.55 * grid2.ly, 1.0}};
    nu.weights = {1.0};
    nu.support = {{nu.points[0].x - 0.1, nu.points[0].y - 0.1, 0.5},
                  {nu.points[0].x + 0.1, nu.points[0].y + 0.1, 1.5}};

    const FreeSurfaceSolution sol = initial_surface(nu, grid2, cfg.surface);
    const auto lattice =
        oracles::lattice_search_full(nu, grid2, 16, 2.5 / grid2.area());

    const double cost_gap = sol.hamiltonian - lattice.cost;
    double h_gap = 0.0;
    for (std::size_t k = 0; k < sol.profile.heights.size(); ++k)
      h_gap = std::fmax(h_gap, std::abs(sol.profile.heights[k] -
                                        lattice.profile.heights[k]));

    const double slack = 1e-7 * (1.0 + std::abs(sol.hamiltonian));
    const bool pass = cost_gap >= -slack &&
                      cost_gap <= lattice.cost_resolution + slack &&
                      h_gap <= lattice.height_quantum + 1e-6;
    out.report["surface"] = {{"solver_hamiltonian", sol.hamiltonian},
                             {"lattice_cost", lattice.cost},
                             {"cost_gap", cost_gap},
                             {"cost_resolution", lattice.cost_resolution},
                             {"profile_gap", h_gap},
                             {"height_quantum", lattice.height_quantum},
                             {"candidates", lattice.candidates},
                             {"pass", pass}};
    out.pass = out.pass && pass;
  }

  // Degenerate Wasserstein distances.
  {
    GeostrophicMeasure a;
    a.points = {{0.2, 0.3, 1.0}, {0.7, 0.4, 1.2}, {0.5, 0.8, 0.8},
                {0.4, 0.5, 1.4}};
    a.weights = {0.25, 0.25, 0.25, 0.25};
    a.support = {{0.0, 0.0, 0.5}, {1.0, 1.0, 2.0}};
    const double self = w2_bruteforce(a, a);

    GeostrophicMeasure s1 = a, s2 = a;
    s1.points.resize(1);
    s1.weights = {1.0};
    s2.points = {{0.9, 0.1, 1.9}};
    s2.weights = {1.0};
    const double pair = w2_bruteforce(s1, s2);
    const double expect = norm2(s1.points[0] - s2.points[0]);

    const bool pass =
        std::abs(self) <= 1e-12 && std::abs(pair - expect) <= 1e-12;
    out.report["w2"] = {{"identical", self},
                        {"single_pair", pair},
                        {"single_pair_expected", expect},
                        {"pass", pass}};
    out.pass = out.pass && pass;
  }

  out.report["pass"] = out.pass;
  return out;
}

}  // namespace sgfs
