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

#include "sgfs/rng.hpp"
#include "sgfs/stability.hpp"

using namespace sgfs;

namespace {

BaseGrid small_grid(int n = 8, int q = 2) {
  BaseGrid g;
  g.lx = 1.0;
  g.ly = 1.0;
  g.nx = n;
  g.ny = n;
  g.qx = q;
  g.qy = q;
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

TEST_CASE("geostrophic energy on the flat box") {
  const BaseGrid g = small_grid(9, 8);
  const SurfaceProfile p = constant_profile(g);
  const ColumnQuadrature q = column_quadrature(g);

  GeostrophicMeasure m;
  m.points = {{0.5, 0.5, 0.0}};
  m.weights = {1.0};
  m.support = {{0, 0, -1}, {1, 1, 1}};
  auto tess = build_tessellation(p, q, m, DualState::zeros(1));
  // with the particle over the barycenter and no vertical coordinate the
  // energy equals the transport cost
  CHECK(energy_bb(tess, m) ==
        doctest::Approx(transport_cost(tess)).epsilon(1e-13));

  // lifting the particle adds y3 times the vertical first moment twice
  m.points[0].z = 1.4;
  tess = build_tessellation(p, q, m, DualState::zeros(1));
  // closed form: integral of 0.5|xh-c|^2 is 1/12, vertical moment is 1/2
  CHECK(energy_bb(tess, m) ==
        doctest::Approx(1.0 / 12.0 + 1.4 * 0.5).epsilon(2e-4));
  CHECK(energy_identity_residual(tess, m) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("energy identity holds on converged states") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const auto nu = four_particles();
  const auto sol = initial_surface(nu, g, opts);
  const double resid = energy_identity_residual(sol.tess, nu);
  CHECK(std::abs(resid) <= 1e-12 * (1.0 + std::abs(energy_bb(sol.tess, nu))));
}

TEST_CASE("monotonicity report is clean on converged states") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const auto nu = four_particles();
  const auto sol = initial_surface(nu, g, opts);
  const auto rep =
      check_gradient_monotonicity(sol.profile, nu, sol.dual, 10000);
  CHECK(rep.violations == 0);
  CHECK(rep.min_dot >= -1e-10);

  // corrupting the dual weights must visibly change the cells
  DualState corrupted = sol.dual;
  std::swap(corrupted.psi[0], corrupted.psi[2]);
  const ColumnQuadrature q = column_quadrature(g);
  const auto tess = build_tessellation(sol.profile, q, nu, corrupted);
  CHECK(mass_residual_of(tess, nu) > 100.0 * opts.tol_mass);
}

TEST_CASE("second inner variation is positive semidefinite in practice") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const auto nu = four_particles();
  const auto sol = initial_surface(nu, g, opts);
  const ColumnQuadrature q = column_quadrature(g);
  const double s0 = 2.0 * g.dx() / g.qx;

  const Box3 box{{0.0, 0.0, 0.0}, {1.0, 1.0, 0.3}};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const TestField f = random_field(seed, box, 2, false);
    const double nrm = field_norm2(sol.profile, q, f);
    for (double s : {s0, 0.5 * s0}) {
      const double v =
          second_inner_variation(sol.profile, q, nu, sol.dual, f, f, s);
      CHECK(v >= -1e-6 * nrm);
    }
  }

  // bilinearity: doubling the first field doubles the value
  const TestField f = random_field(9, box, 2, false);
  TestField f2 = f;
  for (auto& b : f2.bumps) b.amplitude = 2.0 * b.amplitude;
  const TestField h = random_field(10, box, 2, false);
  const double v1 =
      second_inner_variation(sol.profile, q, nu, sol.dual, f, h, s0);
  const double v2 =
      second_inner_variation(sol.profile, q, nu, sol.dual, f2, h, s0);
  CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-10));

  // single particle: affine potential, vanishing second variation
  GeostrophicMeasure one;
  one.points = {{0.5, 0.5, 1.0}};
  one.weights = {1.0};
  one.support = {{0, 0, 0.4}, {1, 1, 2}};
  const auto sol1 = initial_surface(one, g, opts);
  const double v0 =
      second_inner_variation(sol1.profile, q, one, sol1.dual, f, f, s0);
  CHECK(std::abs(v0) <= 1e-12);
}

TEST_CASE("subdifferential inequality on perturbation pairs") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const auto mu = four_particles();

  // identical measures: every term vanishes
  const auto same = check_subdifferential_inequality(mu, mu, g, opts);
  CHECK(std::abs(same.lhs) <= 1e-10);
  CHECK(std::abs(same.rhs) <= 1e-10);
  CHECK(std::abs(same.w2sq) <= 1e-12);

  // a small rigid horizontal translation
  const TestField shift = TestField::linear({1.0, 0.5, 0.0});
  const auto moved = perturb(mu, shift, 0.02);
  const auto rep = check_subdifferential_inequality(mu, moved, g, opts);
  CHECK(rep.slack >= -1e-8);

  // randomized perturbation pairs
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const TestField f =
        random_field(3000 + trial, mu.support, 2, false);
    const auto nu = perturb(mu, f, rng.uniform(0.02, 0.1));
    const auto r = check_subdifferential_inequality(mu, nu, g, opts);
    CHECK(r.slack >= -1e-8);
  }
}

TEST_CASE("growth bound report") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;

  GeostrophicMeasure one;
  one.points = {{0.5, 0.5, 1.0}};
  one.weights = {1.0};
  one.support = {{0, 0, 0.4}, {1, 1, 2}};
  const auto sol1 = initial_surface(one, g, opts);
  const auto rep1 = check_h1_growth(sol1.tess, one);
  CHECK(rep1.c0 < 0.3);          // vertical offset to the barycenter remains
  CHECK(rep1.max_speed < 1e-8);  // but the centred particle does not move

  const auto nu = four_particles();
  const auto sol = initial_surface(nu, g, opts);
  const auto rep = check_h1_growth(sol.tess, nu);
  double ymax = 0.0;
  for (const Vec3& y : nu.points) ymax = std::fmax(ymax, norm(y));
  CHECK(std::isfinite(rep.c0));
  CHECK(rep.c0 <= ymax + 3.0);
}

TEST_CASE("velocity and surface stability under shrinking perturbations") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  const auto nu = four_particles();

  const TestField lin = TestField::linear({0.8, -0.6, 0.0});
  const auto rows = check_h2_stability(nu, g, opts, lin, 6);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].velocity_delta <=
          1.5 * rows[k - 1].velocity_delta + 1e-12);
    CHECK(rows[k].surface_delta <= 1.5 * rows[k - 1].surface_delta + 1e-12);
  }
  CHECK(rows.back().velocity_delta < 0.5 * rows.front().velocity_delta);
  CHECK(rows.back().surface_delta < 0.5 * rows.front().surface_delta);
}

TEST_CASE("directional derivative of the hamiltonian") {
  const BaseGrid g = small_grid();
  SurfaceSolveOptions opts;
  opts.tol_surface = 1e-9;
  opts.tol_mass = 1e-11;
  const auto nu = four_particles();

  // horizontal-gradient fields: the barycenter formula as stated
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const TestField f = random_field(seed, nu.support, 2, true);
    const auto d =
        hamiltonian_directional_derivative(nu, g, opts, f, 1e-4);
    if (std::abs(d.predicted) < 1e-3) continue;
    CHECK(std::abs(d.fd - d.predicted) <= 0.05 * std::abs(d.predicted));
    CHECK(d.predicted ==
          doctest::Approx(d.predicted_envelope).epsilon(1e-12));
  }

  // fields with vertical components follow the envelope form; the naive
  // vertical term overshoots by the particle heights
  const TestField vertical = TestField::linear({0.0, 0.0, 1.0});
  const auto d =
      hamiltonian_directional_derivative(nu, g, opts, vertical, 1e-4);
  CHECK(std::abs(d.fd - d.predicted_envelope) <=
        0.05 * std::abs(d.predicted_envelope));
  CHECK(std::abs(d.fd - d.predicted) > 0.2 * std::abs(d.fd));
}

#include "sgfs/verify.hpp"

TEST_CASE("verification probes all pass on a fresh state") {
  RunConfig cfg;
  cfg.base = small_grid(6, 2);
  cfg.probes = {"mass_balance", "surface_pressure", "monotonicity",
                "second_variation", "h1_growth", "energy_identity",
                "h2_stability", "subdifferential"};
  cfg.n_pairs = 2000;
  const auto nu = four_particles();
  const auto sol = initial_surface(nu, cfg.base, cfg.surface);
  const auto results =
      run_probes(cfg, sol.profile, nu, sol.dual, sol.tess);
  REQUIRE(results.size() == cfg.probes.size());
  for (const auto& r : results) {
    INFO(r.name);
    CHECK(r.pass);
  }

  RunConfig unknown = cfg;
  unknown.probes = {"no_such_probe"};
  const auto bad = run_probes(unknown, sol.profile, nu, sol.dual, sol.tess);
  REQUIRE(bad.size() == 1);
  CHECK_FALSE(bad[0].pass);
}
