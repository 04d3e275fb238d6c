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
#pragma once

#include <vector>

#include "sgfs/domain.hpp"
#include "sgfs/measures.hpp"
#include "sgfs/transport.hpp"

namespace sgfs {

struct SurfaceSolveOptions {
  double tol_surface = 1e-7;  // sup-norm change of h between outer iterations
  double tol_mass = 1e-9;
  int max_outer = 200;
  int max_iter = 500;  // dual iterations per outer step
  double eps_floor = 0.1;
  double z_max_factor = 10.0;  // times the constant unit-volume height
};

struct OuterIterRow {
  int outer_iter;
  double cost;
  double mass_residual;
  double surface_residual;
  double delta_gauge;
};

struct FreeSurfaceSolution {
  SurfaceProfile profile;
  DualState dual;
  LaguerreTessellation tess;  // for the converged (profile, dual) pair
  double hamiltonian = 0.0;
  double mass_residual = 0.0;
  double surface_residual = 0.0;
  double delta_gauge = 0.0;
  int outer_iterations = 0;
  std::vector<OuterIterRow> history;
};

struct SurfaceNoConvergence : SolverError {
  FreeSurfaceSolution last;
  SurfaceNoConvergence(FreeSurfaceSolution l, int outer)
      : SolverError("free-surface iteration did not converge after " +
                    std::to_string(outer) + " outer iterations"),
        last(std::move(l)) {}
};

// Per-node root of P(x1, x2, h) + delta = (x1^2 + x2^2)/2 by bisection,
// clamped at zero, with the gauge shift delta chosen so the profile has
// unit volume. Needs every y_i3 > 0, which makes each column strictly
// monotone. delta_out receives the gauge shift.
SurfaceProfile surface_update(const GeostrophicMeasure& nu,
                              const DualState& dual, const BaseGrid& grid,
                              double z_max, double* delta_out = nullptr);

// Alternating scheme: dual solve on the current profile, then the
// surface-pressure update, relaxed when the surface residual grows,
// until the profile change falls under tol_surface.
FreeSurfaceSolution solve_free_surface(const GeostrophicMeasure& nu,
                                       const BaseGrid& grid,
                                       const SurfaceProfile& init,
                                       const SurfaceSolveOptions& opts,
                                       const DualState* psi0 = nullptr);

double evaluate_A_hamiltonian(const GeostrophicMeasure& nu,
                              const BaseGrid& grid,
                              const SurfaceSolveOptions& opts);

// Minimising profile for the initial measure, from the constant start.
FreeSurfaceSolution initial_surface(const GeostrophicMeasure& nu,
                                    const BaseGrid& grid,
                                    const SurfaceSolveOptions& opts);

double default_z_max(const BaseGrid& grid, const SurfaceSolveOptions& opts);

// max over nodes with h > 0 of |P(x1,x2,h) + delta - (x1^2+x2^2)/2|.
double surface_pressure_residual(const SurfaceProfile& profile,
                                 const GeostrophicMeasure& nu,
                                 const DualState& dual, double delta);

// Gauge shift that recentres the surface-pressure identity on a stored
// state: mean of (x1^2+x2^2)/2 - P over nodes with h > 0.
double recover_delta_gauge(const SurfaceProfile& profile,
                           const GeostrophicMeasure& nu,
                           const DualState& dual);

}  // namespace sgfs
