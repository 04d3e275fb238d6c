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
#include <doctest.h>

#include <cmath>

#include "sgfs/dynamics.hpp"
#include "sgfs/rng.hpp"

using namespace sgfs;

namespace {

BaseGrid small_grid() {
  BaseGrid g;
  g.lx = 1.0;
  g.ly = 1.0;
  g.nx = 8;
  g.ny = 8;
  g.qx = 2;
  g.qy = 2;
  return g;
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

}  // namespace

TEST_CASE("rotation matrix application") {
  CHECK(apply_j({1.0, 0.0, 0.0}).x == 0.0);
  CHECK(apply_j({1.0, 0.0, 0.0}).y == 1.0);
  CHECK(apply_j({1.0, 0.0, 0.0}).z == 0.0);
  CHECK(apply_j({0.0, 1.0, 5.0}).x == -1.0);
  CHECK(apply_j({0.0, 1.0, 5.0}).y == 0.0);
  CHECK(apply_j({0.0, 1.0, 5.0}).z == 0.0);
}

TEST_CASE("centered single particle is stationary") {
  const BaseGrid g = small_grid();
  GeostrophicMeasure m;
  m.points = {{0.5, 0.5, 1.0}};
  m.weights = {1.0};
  m.support = {{0.0, 0.0, 0.4}, {1.0, 1.0, 2.0}};
  SurfaceSolveOptions opts;
  const SimulationState s = make_state(0.0, 0, m, g, opts);
  const auto u = geostrophic_velocity(s, opts.tol_mass);
  CHECK(std::abs(u[0].x) < 1e-10);
  CHECK(std::abs(u[0].y) < 1e-10);
  CHECK(u[0].z == 0.0);
}

TEST_CASE("velocities have exactly zero vertical component") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const SimulationState s = make_state(0.0, 0, four_particles(), g, opts);
  for (const Vec3& u : geostrophic_velocity(s, opts.tol_mass))
    CHECK(u.z == 0.0);
}

TEST_CASE("velocities refuse inconsistent states") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  SimulationState s = make_state(0.0, 0, four_particles(), g, opts);
  s.solution.tess.cells[2].mass = 0.0;  // no longer converged for measure
  CHECK_THROWS_AS(geostrophic_velocity(s, opts.tol_mass), EmptyCellError);
}

TEST_CASE("steps conserve weights and vertical coordinates bitwise") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const SimulationState s0 = make_state(0.0, 0, four_particles(), g, opts);
  for (TimeScheme scheme :
       {TimeScheme::euler, TimeScheme::heun, TimeScheme::rk4}) {
    const SimulationState s1 = step(s0, 0.01, scheme, g, opts);
    CHECK(s1.t == doctest::Approx(0.01));
    CHECK(s1.step_index == 1);
    for (std::size_t i = 0; i < s0.measure.size(); ++i) {
      CHECK(s1.measure.weights[i] == s0.measure.weights[i]);
      CHECK(s1.measure.points[i].z == s0.measure.points[i].z);
    }
    CHECK(s1.solution.mass_residual <= opts.tol_mass);
  }
}

TEST_CASE("first-order consistency of the step") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const SimulationState s0 = make_state(0.0, 0, four_particles(), g, opts);
  const auto u0 = geostrophic_velocity(s0, opts.tol_mass);

  auto deviation = [&](double dt) {
    const SimulationState s1 = step(s0, dt, TimeScheme::heun, g, opts);
    double worst = 0.0;
    for (std::size_t i = 0; i < s0.measure.size(); ++i) {
      const Vec3 d = s1.measure.points[i] -
                     (s0.measure.points[i] + dt * u0[i]);
      worst = std::fmax(worst, norm(d));
    }
    return worst;
  };
  const double e2 = deviation(1e-2);
  const double e3 = deviation(1e-3);
  CHECK(e3 < e2 / 20.0);  // second-order remainder shrinks ~100x
}

TEST_CASE("trajectories are deterministic") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  SimulationState a = make_state(0.0, 0, four_particles(), g, opts);
  SimulationState b = make_state(0.0, 0, four_particles(), g, opts);
  for (int k = 0; k < 5; ++k) {
    a = step(a, 0.01, TimeScheme::heun, g, opts);
    b = step(b, 0.01, TimeScheme::heun, g, opts);
  }
  CHECK(a.solution.hamiltonian == b.solution.hamiltonian);
  for (std::size_t i = 0; i < a.measure.size(); ++i) {
    CHECK(a.measure.points[i].x == b.measure.points[i].x);
    CHECK(a.measure.points[i].y == b.measure.points[i].y);
  }
}

TEST_CASE("single particle stays in the support box over 100 steps") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  GeostrophicMeasure m;
  m.points = {{0.52, 0.47, 1.0}};
  m.weights = {1.0};
  m.support = {{0.2, 0.2, 0.4}, {0.8, 0.8, 2.0}};
  SimulationState s = make_state(0.0, 0, m, g, opts);
  for (int k = 0; k < 100; ++k) {
    s = step(s, 0.01, TimeScheme::heun, g, opts);
    CHECK(s.measure.support.contains(s.measure.points[0]));
    CHECK(std::abs(s.measure.points[0].x - 0.52) < 0.25);
    CHECK(std::abs(s.measure.points[0].y - 0.47) < 0.25);
  }
}

TEST_CASE("stacked z-layers survive long trajectories") {
  // two de-tied layers of four particles each: the dual Hessian is badly
  // conditioned and the ascent needs its ridge escalation (this instance
  // used to stall mid-trajectory)
  BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  DensitySpec spec;
  spec.kind = DensitySpec::Kind::uniform_box;
  spec.box = {{0.35, 0.35, 0.8}, {0.65, 0.65, 1.4}};
  spec.cell_average_m = 2;
  const GeostrophicMeasure nu0 = discretize(spec, 2);
  REQUIRE(nu0.size() == 8);
  SimulationState s = make_state(0.0, 0, nu0, g, opts);
  const double h0 = s.solution.hamiltonian;
  for (int k = 1; k <= 14; ++k) {
    s = step(s, 0.01, TimeScheme::heun, g, opts);
    CHECK(s.solution.mass_residual <= opts.tol_mass);
  }
  CHECK(std::abs(s.solution.hamiltonian - h0) <= 1e-4 * std::abs(h0));
}

TEST_CASE("hamiltonian drifts slowly under heun") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  SimulationState s = make_state(0.0, 0, four_particles(), g, opts);
  const double h0 = s.solution.hamiltonian;
  for (int k = 0; k < 20; ++k) s = step(s, 0.01, TimeScheme::heun, g, opts);
  CHECK(std::abs(s.solution.hamiltonian - h0) <=
        1e-3 * std::abs(h0));
}
