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
#include "sgfs/errors.hpp"
#include "sgfs/geometry.hpp"
#include "sgfs/measures.hpp"

namespace sgfs {

// Transport cost between a fluid point x and a geostrophic point y.
inline double cost_e(const Vec3& x, const Vec3& y) {
  const double dx = x.x - y.x;
  const double dy = x.y - y.y;
  return 0.5 * (dx * dx + dy * dy) - x.z * y.z;
}

// Kantorovich dual weights, one per particle; gauged so min psi = 0.
struct DualState {
  std::vector<double> psi;

  static DualState zeros(std::size_t n) { return DualState{std::vector<double>(n, 0.0)}; }
  void gauge();
};

// Per-cell integrals with respect to the source measure restricted to the
// Laguerre cell of particle i: mass, first horizontal moments, vertical
// first and second moments, the horizontal half-square term, and the cell's
// transport cost contribution.
struct CellAggregates {
  double mass = 0.0;
  double sx1 = 0.0;    // integral of x1
  double sx2 = 0.0;    // integral of x2
  double m1 = 0.0;     // integral of x3
  double m2 = 0.0;     // integral of x3^2
  double horiz = 0.0;  // integral of 0.5*|xh - yh_i|^2
  double cost = 0.0;   // integral of e(x, y_i)
};

struct ColumnPiece {
  int particle;
  double lo;
  double hi;
};

// Per-column vertical partition induced by the lower envelope of the affine
// functions x3 -> e(x, y_i) - psi_i, plus the aggregated cell integrals.
struct LaguerreTessellation {
  std::vector<CellAggregates> cells;
  std::vector<std::vector<ColumnPiece>> columns;
  double source_volume = 0.0;
  double dual_integral = 0.0;  // integral of min_i (e - psi_i), for the dual

  std::vector<double> masses() const;
  Vec3 barycenter(std::size_t i) const;
  double min_mass() const;
};

struct TessellationRequest {
  bool columns = false;  // keep per-column interval lists
  bool hessian = false;  // accumulate d(mass)/d(psi)
};

struct TessellationBuild {
  LaguerreTessellation tess;
  std::vector<double> hessian;  // dense n*n, row-major, only if requested
};

TessellationBuild build_tessellation_ex(const SurfaceProfile& profile,
                                        const ColumnQuadrature& quad,
                                        const GeostrophicMeasure& nu,
                                        const DualState& dual,
                                        const TessellationRequest& req);

LaguerreTessellation build_tessellation(const SurfaceProfile& profile,
                                        const ColumnQuadrature& quad,
                                        const GeostrophicMeasure& nu,
                                        const DualState& dual);

std::vector<double> cell_masses(const LaguerreTessellation& tess);

double transport_cost(const LaguerreTessellation& tess);

// max_i |m_i - nu_i|
double mass_residual_of(const LaguerreTessellation& tess,
                        const GeostrophicMeasure& nu);

double dual_functional(const SurfaceProfile& profile,
                       const ColumnQuadrature& quad,
                       const GeostrophicMeasure& nu, const DualState& dual);

struct DualSolveOptions {
  double tol_mass = 1e-9;  // absolute, per cell
  int max_iter = 500;
  double eps_floor = 0.1;  // line-search mass floor, times min weight
};

struct DualSolveReport {
  int iterations = 0;
  double mass_residual = 0.0;
};

struct DualNoConvergence : SolverError {
  DualState best;
  double residual;
  int iterations;
  DualNoConvergence(DualState b, double r, int it)
      : SolverError("dual solve did not reach tolerance after " +
                    std::to_string(it) + " iterations (residual " +
                    std::to_string(r) + ")"),
        best(std::move(b)),
        residual(r),
        iterations(it) {}
};

// Damped Newton ascent on the concave Kantorovich dual; the gradient is
// nu - m(psi) and the Hessian comes from the envelope breakpoints. Steps
// that drive a cell mass under eps_floor * min_i nu_i are rejected.
DualState solve_dual(const SurfaceProfile& profile,
                     const ColumnQuadrature& quad,
                     const GeostrophicMeasure& nu, const DualState& psi0,
                     const DualSolveOptions& opts,
                     DualSolveReport* report = nullptr);

// Max-affine geopotential P(x) = max_i (x . y_i + kappa_i) with
// kappa_i = psi_i - 0.5 (y_i1^2 + y_i2^2), optionally shifted by delta.
struct PotentialEvaluator {
  std::vector<double> y1, y2, y3, kappa;

  PotentialEvaluator(const GeostrophicMeasure& nu, const DualState& dual,
                     double delta = 0.0);
  std::size_t size() const { return y1.size(); }
  double value(const Vec3& x) const;
  int argmax(const Vec3& x) const;  // ties resolve to the lowest index
  Vec3 grad(const Vec3& x) const;   // position of the argmax particle
};

// Conjugate values at the particles: P*(y_i) = 0.5(y_i1^2+y_i2^2) - psi_i.
std::vector<double> legendre_conjugate(const GeostrophicMeasure& nu,
                                       const DualState& dual);

}  // namespace sgfs
