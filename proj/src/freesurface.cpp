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
#include "sgfs/freesurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgfs/threading.hpp"

namespace sgfs {

namespace {

// Upper envelope of the node's affine columns g_i(x3) = y_i3 x3 + c_i with
// c_i = x1 y_i1 + x2 y_i2 + kappa_i; P(x1,x2,x3) = max_i g_i(x3). Strictly
// increasing since every y_i3 > 0.
struct NodeEnvelope {
  struct Piece {
    double start;
    double slope;
    double c;
  };
  std::vector<Piece> pieces;

  double eval(double x3) const {
    std::size_t k = pieces.size() - 1;
    while (k > 0 && pieces[k].start > x3) --k;
    return pieces[k].slope * x3 + pieces[k].c;
  }
};

NodeEnvelope build_node_envelope(const GeostrophicMeasure& nu,
                                 const std::vector<double>& kappa,
                                 const std::vector<int>& order, double x1,
                                 double x2) {
  NodeEnvelope env;
  // order is by increasing y3 = increasing slope; the upper envelope's
  // active slope increases left to right.
  for (int idx : order) {
    const Vec3& y = nu.points[idx];
    const double slope = y.z;
    const double c = x1 * y.x + x2 * y.y + kappa[idx];
    if (!env.pieces.empty() && env.pieces.back().slope == slope) {
      if (c <= env.pieces.back().c) continue;
      env.pieces.pop_back();
    }
    double start = -std::numeric_limits<double>::infinity();
    while (!env.pieces.empty()) {
      const auto& top = env.pieces.back();
      const double cross = (top.c - c) / (slope - top.slope);
      if (cross <= top.start) {
        env.pieces.pop_back();
        continue;
      }
      start = cross;
      break;
    }
    env.pieces.push_back({start, slope, c});
  }
  return env;
}

struct NodeRootTable {
  std::vector<NodeEnvelope> envs;
  std::vector<double> target;  // (x1^2 + x2^2) / 2 per node
};

NodeRootTable build_root_table(const GeostrophicMeasure& nu,
                               const DualState& dual, const BaseGrid& grid) {
  const std::size_t n = nu.size();
  std::vector<double> kappa(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& y = nu.points[i];
    kappa[i] = dual.psi[i] - 0.5 * (y.x * y.x + y.y * y.y);
  }
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return nu.points[a].z < nu.points[b].z;
  });

  NodeRootTable table;
  const std::size_t n_nodes = static_cast<std::size_t>(grid.n_nodes());
  table.envs.resize(n_nodes);
  table.target.resize(n_nodes);
  const std::size_t n_blocks =
      std::min<std::size_t>(kReductionBlocks, n_nodes);
  parallel_blocks(n_blocks, [&](std::size_t blk) {
    const std::size_t a = blk * n_nodes / n_blocks;
    const std::size_t b = (blk + 1) * n_nodes / n_blocks;
    for (std::size_t k = a; k < b; ++k) {
      const int i = static_cast<int>(k) % grid.nx;
      const int j = static_cast<int>(k) / grid.nx;
      const double x1 = grid.node_x(i);
      const double x2 = grid.node_y(j);
      table.envs[k] = build_node_envelope(nu, kappa, order, x1, x2);
      table.target[k] = 0.5 * (x1 * x1 + x2 * x2);
    }
  });
  return table;
}

// Root of env(h) = target - delta on [0, z_max]; 0 when the root is below,
// z_max (capped flag) when it is above.
double node_root(const NodeEnvelope& env, double target, double delta,
                 double z_max, bool* capped) {
  const double goal = target - delta;
  if (env.eval(0.0) >= goal) return 0.0;
  if (env.eval(z_max) < goal) {
    *capped = true;
    return z_max;
  }
  double lo = 0.0, hi = z_max;
  for (int it = 0; it < 80 && hi - lo > 1e-16 * (1.0 + z_max); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (env.eval(mid) < goal)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double default_z_max(const BaseGrid& grid, const SurfaceSolveOptions& opts) {
  return opts.z_max_factor / grid.area();
}

SurfaceProfile surface_update(const GeostrophicMeasure& nu,
                              const DualState& dual, const BaseGrid& grid,
                              double z_max, double* delta_out) {
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (!(nu.points[i].z > 0.0))
      throw SolverError("surface update needs every y3 > 0");

  const NodeRootTable table = build_root_table(nu, dual, grid);
  const std::size_t n_nodes = table.envs.size();

  SurfaceProfile out;
  out.grid = grid;
  out.heights.assign(n_nodes, 0.0);

  // Total volume with every node at the cap bounds what any delta can do.
  {
    SurfaceProfile capped = out;
    capped.heights.assign(n_nodes, z_max);
    if (volume(capped) < 1.0 - 1e-12)
      throw GaugeFailureError(
          "vertical bound z_max is too small to reach unit volume");
  }

  auto eval_nodes = [&](double delta, bool* any_capped) {
    bool capped = false;
    const std::size_t n_blocks =
        std::min<std::size_t>(kReductionBlocks, n_nodes);
    std::vector<char> cap_flags(n_blocks, 0);
    parallel_blocks(n_blocks, [&](std::size_t blk) {
      const std::size_t a = blk * n_nodes / n_blocks;
      const std::size_t b = (blk + 1) * n_nodes / n_blocks;
      bool local = false;
      for (std::size_t k = a; k < b; ++k)
        out.heights[k] =
            node_root(table.envs[k], table.target[k], delta, z_max, &local);
      cap_flags[blk] = local ? 1 : 0;
    });
    for (char f : cap_flags) capped = capped || (f != 0);
    if (any_capped) *any_capped = capped;
    return volume(out);
  };

  // Bracket the gauge shift: far left every node caps, far right all clamp
  // to zero.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_nodes; ++k) {
    lo = std::fmin(lo, table.target[k] - table.envs[k].eval(z_max));
    hi = std::fmax(hi, table.target[k] - table.envs[k].eval(0.0));
  }
  lo -= 1.0;
  hi += 1.0;

  bool any_capped = false;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = eval_nodes(mid, nullptr);
    if (v >= 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * (1.0 + std::abs(lo) + std::abs(hi))) break;
  }
  const double delta = lo;
  const double v = eval_nodes(delta, &any_capped);
  if (std::abs(v - 1.0) > 1e-8)
    throw GaugeFailureError("gauge bisection failed to reach unit volume");
  if (any_capped) {
    for (std::size_t k = 0; k < n_nodes; ++k)
      if (out.heights[k] == z_max) {
        const int i = static_cast<int>(k) % grid.nx;
        const int j = static_cast<int>(k) / grid.nx;
        throw NoBracketError(i, j, z_max);
      }
  }
  if (delta_out) *delta_out = delta;
  return out;
}

FreeSurfaceSolution solve_free_surface(const GeostrophicMeasure& nu,
                                       const BaseGrid& grid,
                                       const SurfaceProfile& init,
                                       const SurfaceSolveOptions& opts,
                                       const DualState* psi0) {
  nu.validate();
  grid.validate();
  const ColumnQuadrature quad = column_quadrature(grid);
  const double z_max = default_z_max(grid, opts);

  DualSolveOptions dopts;
  dopts.tol_mass = opts.tol_mass;
  dopts.max_iter = opts.max_iter;
  dopts.eps_floor = opts.eps_floor;

  FreeSurfaceSolution sol;
  sol.profile = normalize_volume(init, 1.0);
  sol.dual = psi0 ? *psi0 : DualState::zeros(nu.size());

  double prev_change = std::numeric_limits<double>::infinity();
  double relax = 1.0;
  int halvings = 0;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    DualSolveReport dual_report;
    sol.dual = solve_dual(sol.profile, quad, nu, sol.dual, dopts, &dual_report);
    sol.tess = build_tessellation(sol.profile, quad, nu, sol.dual);
    const double cost = transport_cost(sol.tess);

    double delta = 0.0;
    SurfaceProfile updated = surface_update(nu, sol.dual, grid, z_max, &delta);

    double change = 0.0;
    for (std::size_t k = 0; k < updated.heights.size(); ++k)
      change = std::fmax(change,
                         std::abs(updated.heights[k] - sol.profile.heights[k]));

    sol.history.push_back({outer, cost, dual_report.mass_residual, change,
                           delta});
    sol.delta_gauge = delta;
    sol.outer_iterations = outer + 1;

    if (change <= opts.tol_surface) {
      sol.profile = updated;
      sol.dual = solve_dual(sol.profile, quad, nu, sol.dual, dopts,
                            &dual_report);
      sol.tess = build_tessellation(sol.profile, quad, nu, sol.dual);
      sol.hamiltonian = transport_cost(sol.tess);
      sol.mass_residual = dual_report.mass_residual;
      sol.surface_residual = change;
      return sol;
    }

    // Halve the applied step while the residual grows (oscillation guard).
    if (change > prev_change * (1.0 + 1e-12)) {
      if (halvings < 20) {
        relax *= 0.5;
        ++halvings;
      }
    } else {
      relax = std::fmin(1.0, relax * 1.25);
    }
    for (std::size_t k = 0; k < updated.heights.size(); ++k)
      sol.profile.heights[k] += relax * (updated.heights[k] -
                                         sol.profile.heights[k]);
    prev_change = change;
  }

  sol.hamiltonian = transport_cost(sol.tess);
  sol.mass_residual = mass_residual_of(sol.tess, nu);
  throw SurfaceNoConvergence(std::move(sol), opts.max_outer);
}

double evaluate_A_hamiltonian(const GeostrophicMeasure& nu,
                              const BaseGrid& grid,
                              const SurfaceSolveOptions& opts) {
  return initial_surface(nu, grid, opts).hamiltonian;
}

FreeSurfaceSolution initial_surface(const GeostrophicMeasure& nu,
                                    const BaseGrid& grid,
                                    const SurfaceSolveOptions& opts) {
  return solve_free_surface(nu, grid, constant_profile(grid), opts);
}

double surface_pressure_residual(const SurfaceProfile& profile,
                                 const GeostrophicMeasure& nu,
                                 const DualState& dual, double delta) {
  const PotentialEvaluator pot(nu, dual);
  const BaseGrid& g = profile.grid;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double h = profile.at(i, j);
      if (!(h > 0.0)) continue;
      const double x1 = g.node_x(i);
      const double x2 = g.node_y(j);
      const double p = pot.value({x1, x2, h});
      worst = std::fmax(worst,
                        std::abs(p + delta - 0.5 * (x1 * x1 + x2 * x2)));
    }
  return worst;
}

double recover_delta_gauge(const SurfaceProfile& profile,
                           const GeostrophicMeasure& nu,
                           const DualState& dual) {
  const PotentialEvaluator pot(nu, dual);
  const BaseGrid& g = profile.grid;
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double h = profile.at(i, j);
      if (!(h > 0.0)) continue;
      const double x1 = g.node_x(i);
      const double x2 = g.node_y(j);
      sum += 0.5 * (x1 * x1 + x2 * x2) - pot.value({x1, x2, h});
      ++count;
    }
  return count > 0 ? sum / count : 0.0;
}

}  // namespace sgfs
