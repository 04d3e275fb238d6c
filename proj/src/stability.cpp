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
#include "sgfs/stability.hpp"

#include <algorithm>
#include <cmath>

#include "sgfs/rng.hpp"

namespace sgfs {

double energy_bb(const LaguerreTessellation& tess,
                 const GeostrophicMeasure& nu) {
  double e = 0.0;
  for (std::size_t i = 0; i < tess.cells.size(); ++i)
    e += tess.cells[i].horiz + nu.points[i].z * tess.cells[i].m1;
  return e;
}

double energy_identity_residual(const LaguerreTessellation& tess,
                                const GeostrophicMeasure& nu) {
  double vertical = 0.0;
  for (std::size_t i = 0; i < tess.cells.size(); ++i)
    vertical += nu.points[i].z * tess.cells[i].m1;
  return energy_bb(tess, nu) - transport_cost(tess) - 2.0 * vertical;
}

namespace {

Vec3 sample_point(Rng& rng, const SurfaceProfile& profile) {
  const BaseGrid& g = profile.grid;
  for (int attempt = 0; attempt < 1024; ++attempt) {
    const double x1 = rng.uniform(g.ox, g.ox + g.lx);
    const double x2 = rng.uniform(g.oy, g.oy + g.ly);
    const double h = eval_height(profile, x1, x2);
    if (h > 0.0) return {x1, x2, rng.next_double() * h};
  }
  throw SolverError("could not sample a point inside the fluid domain");
}

}  // namespace

MonotonicityReport check_gradient_monotonicity(const SurfaceProfile& profile,
                                               const GeostrophicMeasure& nu,
                                               const DualState& dual,
                                               int n_pairs,
                                               std::uint64_t seed) {
  const PotentialEvaluator pot(nu, dual);
  Rng rng(seed);
  MonotonicityReport report;
  report.pairs = n_pairs;
  report.min_dot = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_pairs; ++k) {
    const Vec3 a = sample_point(rng, profile);
    const Vec3 b = sample_point(rng, profile);
    const double d = dot(pot.grad(a) - pot.grad(b), a - b);
    report.min_dot = std::fmin(report.min_dot, d);
    if (d < -1e-10) ++report.violations;
  }
  if (n_pairs == 0) report.min_dot = 0.0;
  return report;
}

namespace {

// Gauss-Hermite, 6 nodes, physicists' weight exp(-t^2).
constexpr double kGhNode[6] = {-2.350604973674492223, -1.335849074013696949,
                               -0.436077411927616508, 0.436077411927616508,
                               1.335849074013696949,  2.350604973674492223};
constexpr double kGhWeight[6] = {0.004530009905508846, 0.157067320322856644,
                                 0.724629595224392524, 0.724629595224392524,
                                 0.157067320322856644, 0.004530009905508846};

// D2(P * G_s)(x) = -(1/s^2) E[ grad P(x - u) u^T ], u ~ N(0, s^2 I),
// evaluated with a tensor Gauss-Hermite rule.
void mollified_hessian(const PotentialEvaluator& pot, const Vec3& x, double s,
                       double m[3][3]) {
  const double pi32 = std::pow(M_PI, 1.5);
  const double scale = std::sqrt(2.0) * s;
  double acc[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int c = 0; c < 6; ++c) {
        const Vec3 u{scale * kGhNode[a], scale * kGhNode[b],
                     scale * kGhNode[c]};
        const double w = kGhWeight[a] * kGhWeight[b] * kGhWeight[c] / pi32;
        const Vec3 g = pot.grad(x - u);
        acc[0][0] += w * g.x * u.x;
        acc[0][1] += w * g.x * u.y;
        acc[0][2] += w * g.x * u.z;
        acc[1][0] += w * g.y * u.x;
        acc[1][1] += w * g.y * u.y;
        acc[1][2] += w * g.y * u.z;
        acc[2][0] += w * g.z * u.x;
        acc[2][1] += w * g.z * u.y;
        acc[2][2] += w * g.z * u.z;
      }
  const double inv = -1.0 / (s * s);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = inv * 0.5 * (acc[r][c] + acc[c][r]);
}

}  // namespace

double second_inner_variation(const SurfaceProfile& profile,
                              const ColumnQuadrature& quad,
                              const GeostrophicMeasure& nu,
                              const DualState& dual, const TestField& phi,
                              const TestField& psi_field, double smoothing) {
  if (!(smoothing > 0.0)) throw SolverError("smoothing must be positive");
  const PotentialEvaluator pot(nu, dual);
  const std::vector<double> heights = column_heights(profile, quad);
  constexpr int kVertical = 4;
  double total = 0.0;
  for (std::size_t c = 0; c < quad.size(); ++c) {
    const double h = heights[c];
    if (!(h > 0.0)) continue;
    const double wslab = quad.w[c] * h / kVertical;
    for (int k = 0; k < kVertical; ++k) {
      const Vec3 x{quad.x1[c], quad.x2[c], (k + 0.5) * h / kVertical};
      double m[3][3];
      mollified_hessian(pot, x, smoothing, m);
      const Vec3 a = phi.vector_at(x);
      const Vec3 b = psi_field.vector_at(x);
      const double quad_form =
          a.x * (m[0][0] * b.x + m[0][1] * b.y + m[0][2] * b.z) +
          a.y * (m[1][0] * b.x + m[1][1] * b.y + m[1][2] * b.z) +
          a.z * (m[2][0] * b.x + m[2][1] * b.y + m[2][2] * b.z);
      total += wslab * quad_form;
    }
  }
  return total;
}

double field_norm2(const SurfaceProfile& profile, const ColumnQuadrature& quad,
                   const TestField& phi) {
  const std::vector<double> heights = column_heights(profile, quad);
  constexpr int kVertical = 4;
  double total = 0.0;
  for (std::size_t c = 0; c < quad.size(); ++c) {
    const double h = heights[c];
    if (!(h > 0.0)) continue;
    const double wslab = quad.w[c] * h / kVertical;
    for (int k = 0; k < kVertical; ++k) {
      const Vec3 x{quad.x1[c], quad.x2[c], (k + 0.5) * h / kVertical};
      total += wslab * norm2(phi.vector_at(x));
    }
  }
  return total;
}

SubdifferentialReport check_subdifferential_inequality(
    const GeostrophicMeasure& mu, const GeostrophicMeasure& nu,
    const BaseGrid& grid, const SurfaceSolveOptions& opts) {
  constexpr std::size_t kMax = 10;
  if (mu.size() > kMax) throw TooLargeError(mu.size());
  if (nu.size() != mu.size())
    throw SolverError("subdifferential audit needs matching atom counts");
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::abs(mu.weights[i] - nu.weights[i]) > 1e-12)
      throw SolverError("subdifferential audit needs matching weights");

  const FreeSurfaceSolution sol_mu = initial_surface(mu, grid, opts);
  const FreeSurfaceSolution sol_nu = initial_surface(nu, grid, opts);

  // Route the comparison through nu's surface: H(nu) is the inner optimum
  // there, so composing mu's optimal plan on that surface with the matching
  // T gives a feasible competitor and the inequality is exact up to solver
  // tolerance. Barycenters from mu's own surface fail at second order.
  const ColumnQuadrature quad = column_quadrature(grid);
  DualSolveOptions dopts;
  dopts.tol_mass = opts.tol_mass;
  dopts.max_iter = opts.max_iter;
  dopts.eps_floor = opts.eps_floor;
  const DualState psi_mu = solve_dual(sol_nu.profile, quad, mu,
                                      DualState::zeros(mu.size()), dopts);
  const LaguerreTessellation tess_mu =
      build_tessellation(sol_nu.profile, quad, mu, psi_mu);

  const std::size_t n = mu.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = norm2(mu.points[i] - nu.points[j]);
  std::vector<int> perm;
  detail::min_cost_matching(cost, n, &perm);

  SubdifferentialReport rep;
  rep.h_mu = sol_mu.hamiltonian;
  rep.h_nu = sol_nu.hamiltonian;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec3 y = mu.points[j];
    const Vec3 c = tess_mu.barycenter(j);
    const Vec3 xi{c.x - y.x, c.y - y.y, c.z};
    const Vec3 d = nu.points[perm[j]] - y;
    rep.inner += mu.weights[j] * dot(xi, d);
    rep.w2sq += mu.weights[j] * norm2(d);
  }
  rep.lhs = -rep.h_nu + rep.h_mu;
  rep.rhs = rep.inner - 0.5 * rep.w2sq;
  rep.slack = rep.lhs - rep.rhs;
  return rep;
}

H1Report check_h1_growth(const LaguerreTessellation& tess,
                         const GeostrophicMeasure& nu) {
  H1Report rep;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec3 w = nu.points[i] - tess.barycenter(i);
    rep.c0 = std::fmax(rep.c0, norm(w) / (1.0 + norm(nu.points[i])));
    rep.max_speed = std::fmax(rep.max_speed, norm(apply_j(w)));
  }
  return rep;
}

std::vector<H2Row> check_h2_stability(const GeostrophicMeasure& nu,
                                      const BaseGrid& grid,
                                      const SurfaceSolveOptions& opts,
                                      const TestField& field, int levels) {
  const FreeSurfaceSolution base = initial_surface(nu, grid, opts);
  std::vector<Vec3> u0(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i)
    u0[i] = apply_j(nu.points[i] - base.tess.barycenter(i));

  std::vector<H2Row> rows;
  for (int j = 1; j <= levels; ++j) {
    const double s = std::pow(2.0, -j);
    const GeostrophicMeasure nu_s = perturb(nu, field, s);
    const FreeSurfaceSolution sol = initial_surface(nu_s, grid, opts);
    H2Row row{s, 0.0, 0.0};
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const Vec3 u = apply_j(nu_s.points[i] - sol.tess.barycenter(i));
      row.velocity_delta = std::fmax(row.velocity_delta, norm(u - u0[i]));
    }
    for (std::size_t k = 0; k < sol.profile.heights.size(); ++k)
      row.surface_delta =
          std::fmax(row.surface_delta,
                    std::abs(sol.profile.heights[k] - base.profile.heights[k]));
    rows.push_back(row);
  }
  return rows;
}

DirectionalDerivative hamiltonian_directional_derivative(
    const GeostrophicMeasure& nu, const BaseGrid& grid,
    const SurfaceSolveOptions& opts, const TestField& field, double s) {
  const FreeSurfaceSolution base = initial_surface(nu, grid, opts);
  const GeostrophicMeasure nu_s = perturb(nu, field, s);
  const FreeSurfaceSolution shifted = solve_free_surface(
      nu_s, grid, base.profile, opts, &base.dual);

  DirectionalDerivative out;
  out.fd = (shifted.hamiltonian - base.hamiltonian) / s;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec3 y = nu.points[i];
    const Vec3 c = base.tess.barycenter(i);
    const Vec3 g = field.grad_potential(y);
    out.predicted += nu.weights[i] * dot(y - c, g);
    out.predicted_envelope +=
        nu.weights[i] * dot(Vec3{y.x - c.x, y.y - c.y, -c.z}, g);
  }
  return out;
}

}  // namespace sgfs
