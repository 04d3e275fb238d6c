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

#include <string>
#include <vector>

#include "sgfs/freesurface.hpp"
#include "sgfs/measures.hpp"

namespace sgfs {

enum class TimeScheme { euler, heun, rk4 };

TimeScheme scheme_from_string(const std::string& s);

// Converged snapshot of the flow: the measure together with its surface,
// dual weights, tessellation and Hamiltonian value.
struct SimulationState {
  double t = 0.0;
  int step_index = 0;
  GeostrophicMeasure measure;
  FreeSurfaceSolution solution;
};

// Geostrophic particle velocities U_i = J (y_i - c_i) with c_i the cell
// barycenter; the third component is exactly zero. Throws EmptyCellError
// when a cell's mass falls under mass_floor.
std::vector<Vec3> geostrophic_velocity(const SimulationState& state,
                                       double mass_floor);

SimulationState make_state(double t, int step_index, GeostrophicMeasure nu,
                           const BaseGrid& grid,
                           const SurfaceSolveOptions& opts);

// One explicit step; every stage re-solves the surface and dual, warm
// started from the incoming state. Weights and vertical coordinates are
// copied through untouched.
SimulationState step(const SimulationState& state, double dt,
                     TimeScheme scheme, const BaseGrid& grid,
                     const SurfaceSolveOptions& opts);

}  // namespace sgfs
