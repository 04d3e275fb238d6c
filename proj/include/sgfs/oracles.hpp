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
// Brute-force reference computations. Everything here works from the cost
// function and elementary geometry directly; none of it reuses the envelope
// or Newton machinery it is meant to check.
#pragma once

#include <vector>

#include "sgfs/domain.hpp"
#include "sgfs/measures.hpp"
#include "sgfs/transport.hpp"

namespace sgfs::oracles {

struct VoxelResult {
  double cost = 0.0;
  std::vector<double> masses;
  double volume = 0.0;
};

// Dense voxel assignment: its own nh x nh horizontal grid over the base,
// nv vertical slabs per column, every voxel assigned to
// argmin_i e(x, y_i) - psi_i by direct evaluation.
VoxelResult voxel_assignment(const SurfaceProfile& profile,
                             const GeostrophicMeasure& nu,
                             const std::vector<double>& psi, int nh, int nv);

// Same assignment on the solver's quadrature columns but with exact
// vertical intervals from pairwise line crossings (sweep over segments).
VoxelResult column_assignment(const SurfaceProfile& profile,
                              const ColumnQuadrature& quad,
                              const GeostrophicMeasure& nu,
                              const std::vector<double>& psi);

// Voxelised source as a discrete measure, for the LP oracles.
struct AtomCloud {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

AtomCloud voxelize_source(const SurfaceProfile& profile, int nh, int nv);

// Exact LP over plans from the atom cloud to the particles under an
// arbitrary cost; returns the optimal cost and the plan's support.
struct LpPlan {
  double cost = 0.0;
  std::vector<std::pair<int, int>> support;  // (atom, particle), flow > tol
};

enum class GroundCost { transport_e, squared_euclidean };

LpPlan lp_plan(const AtomCloud& atoms, const GeostrophicMeasure& nu,
               GroundCost ground);

// Inner optimal transport cost from sigma_h to nu for n <= 2 particles,
// per-column closed forms plus a one-parameter dual bisection for n = 2.
double inner_cost_small(const SurfaceProfile& profile,
                        const ColumnQuadrature& quad,
                        const GeostrophicMeasure& nu);

struct LatticeSearchResult {
  SurfaceProfile profile;
  double cost = 0.0;
  double height_quantum = 0.0;
  double cost_resolution = 0.0;  // |cost change| across one-quantum moves
  long candidates = 0;
};

// Exhaustive enumeration of every volume-normalised lattice profile
// (levels^nodes candidates); node count is capped so the enumeration stays
// exact. Maximises the inner-optimal cost, which is what the stationary
// surface-pressure profile extremises for an atomic measure.
LatticeSearchResult lattice_search_full(const GeostrophicMeasure& nu,
                                        const BaseGrid& grid, int levels,
                                        double h_cap);

// Exhaustive per-node sweep: each node in turn tries all lattice levels
// (renormalising), cycling until no single-node move improves the cost.
LatticeSearchResult lattice_sweep(const GeostrophicMeasure& nu,
                                  const BaseGrid& grid, int levels,
                                  double h_cap, int max_sweeps = 64);

}  // namespace sgfs::oracles
