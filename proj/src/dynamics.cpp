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
#include "sgfs/dynamics.hpp"

#include <cmath>

namespace sgfs {

TimeScheme scheme_from_string(const std::string& s) {
  if (s == "euler") return TimeScheme::euler;
  if (s == "heun") return TimeScheme::heun;
  if (s == "rk4") return TimeScheme::rk4;
  throw ConfigError("unknown time scheme '" + s + "'");
}

std::vector<Vec3> geostrophic_velocity(const SimulationState& state,
                                       double mass_floor) {
  const auto& tess = state.solution.tess;
  const auto& nu = state.measure;
  std::vector<Vec3> u(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (tess.cells[i].mass < mass_floor)
      throw EmptyCellError(static_cast<int>(i));
    const Vec3 c = tess.barycenter(i);
    u[i] = apply_j(nu.points[i] - c);
  }
  return u;
}

SimulationState make_state(double t, int step_index, GeostrophicMeasure nu,
                           const BaseGrid& grid,
                           const SurfaceSolveOptions& opts) {
  SimulationState s;
  s.t = t;
  s.step_index = step_index;
  s.solution = initial_surface(nu, grid, opts);
  s.measure = std::move(nu);
  return s;
}

namespace {

// Re-solve on displaced positions, warm started from a previous solution.
SimulationState stage_state(const SimulationState& base,
                            const std::vector<Vec3>& displacement,
                            const BaseGrid& grid,
                            const SurfaceSolveOptions& opts, double t,
                            int step_index) {
  SimulationState s;
  s.t = t;
  s.step_index = step_index;
  s.measure = base.measure;
  for (std::size_t i = 0; i < s.measure.size(); ++i) {
    Vec3 p = base.measure.points[i];
    p.x += displacement[i].x;
    p.y += displacement[i].y;
    // vertical velocities vanish identically; copy y3 through bitwise
    s.measure.points[i] = p;
    s.measure.support.expand_to(p);
  }
  s.solution = solve_free_surface(s.measure, grid, base.solution.profile,
                                  opts, &base.solution.dual);
  return s;
}

std::vector<Vec3> scaled(const std::vector<Vec3>& v, double s) {
  std::vector<Vec3> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

}  // namespace

SimulationState step(const SimulationState& state, double dt,
                     TimeScheme scheme, const BaseGrid& grid,
                     const SurfaceSolveOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double mass_floor = opts.tol_mass;
  const double t1 = state.t + dt;
  const int next_index = state.step_index + 1;

  switch (scheme) {
    case TimeScheme::euler: {
      const auto k1 = geostrophic_velocity(state, mass_floor);
      return stage_state(state, scaled(k1, dt), grid, opts, t1, next_index);
    }
    case TimeScheme::heun: {
      const auto k1 = geostrophic_velocity(state, mass_floor);
      const auto mid =
          stage_state(state, scaled(k1, dt), grid, opts, t1, next_index);
      const auto k2 = geostrophic_velocity(mid, mass_floor);
      std::vector<Vec3> d(k1.size());
      for (std::size_t i = 0; i < k1.size(); ++i)
        d[i] = (0.5 * dt) * (k1[i] + k2[i]);
      return stage_state(state, d, grid, opts, t1, next_index);
    }
    case TimeScheme::rk4: {
      const auto k1 = geostrophic_velocity(state, mass_floor);
      const auto s2 = stage_state(state, scaled(k1, 0.5 * dt), grid, opts,
                                  state.t + 0.5 * dt, next_index);
      const auto k2 = geostrophic_velocity(s2, mass_floor);
      const auto s3 = stage_state(state, scaled(k2, 0.5 * dt), grid, opts,
                                  state.t + 0.5 * dt, next_index);
      const auto k3 = geostrophic_velocity(s3, mass_floor);
      const auto s4 = stage_state(state, scaled(k3, dt), grid, opts, t1,
                                  next_index);
      const auto k4 = geostrophic_velocity(s4, mass_floor);
      std::vector<Vec3> d(k1.size());
      for (std::size_t i = 0; i < k1.size(); ++i)
        d[i] = (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      return stage_state(state, d, grid, opts, t1, next_index);
    }
  }
  throw ConfigError("unreachable time scheme");
}

}  // namespace sgfs
