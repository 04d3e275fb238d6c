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

#include <cstdint>
#include <vector>

#include "sgfs/freesurface.hpp"
#include "sgfs/measures.hpp"
#include "sgfs/test_field.hpp"
#include "sgfs/transport.hpp"

namespace sgfs {

// Geostrophic energy of a tessellated state:
//   sum_i integral over cell i of 0.5*|xh - yh_i|^2 + x3 * y_i3.
// It exceeds the transport cost by exactly twice the weighted vertical
// first moments.
double energy_bb(const LaguerreTessellation& tess,
                 const GeostrophicMeasure& nu);

// energy_bb - transport_cost - 2 sum_i y_i3 * m1_i, from stored moments.
double energy_identity_residual(const LaguerreTessellation& tess,
                                const GeostrophicMeasure& nu);

struct MonotonicityReport {
  int pairs = 0;
  int violations = 0;
  double min_dot = 0.0;  // most negative (grad P(x)-grad P(x')) . (x-x')
};

// Samples point pairs inside the fluid domain and checks the monotonicity
// of the max-affine gradient.
MonotonicityReport check_gradient_monotonicity(const SurfaceProfile& profile,
                                               const GeostrophicMeasure& nu,
                                               const DualState& dual,
                                               int n_pairs,
                                               std::uint64_t seed = 0x5eed);

// Mollified second inner variation: integral of Phi . D2P_s Psi over the
// fluid domain, with P mollified by a Gaussian of scale `smoothing`.
double second_inner_variation(const SurfaceProfile& profile,
                              const ColumnQuadrature& quad,
                              const GeostrophicMeasure& nu,
                              const DualState& dual, const TestField& phi,
                              const TestField& psi_field, double smoothing);

// Squared L2(sigma_h) norm of a probe field, for tolerance scaling.
double field_norm2(const SurfaceProfile& profile, const ColumnQuadrature& quad,
                   const TestField& phi);

struct SubdifferentialReport {
  double h_mu = 0.0;
  double h_nu = 0.0;
  double inner = 0.0;  // sum_j mu_j xi_j . (T(y_j) - y_j)
  double w2sq = 0.0;
  double lhs = 0.0;    // -H(nu) + H(mu)
  double rhs = 0.0;    // inner - w2sq / 2
  double slack = 0.0;  // lhs - rhs
};

// Both measures must have matching weight multisets (a transport map needs
// them); xi_j = c_j - (I - e3 e3^T) y_j with c_j the barycenters of mu's
// optimal cells on nu's converged surface.
SubdifferentialReport check_subdifferential_inequality(
    const GeostrophicMeasure& mu, const GeostrophicMeasure& nu,
    const BaseGrid& grid, const SurfaceSolveOptions& opts);

struct H1Report {
  double c0 = 0.0;  // max_i |y_i - c_i| / (1 + |y_i|)
  double max_speed = 0.0;
};

H1Report check_h1_growth(const LaguerreTessellation& tess,
                         const GeostrophicMeasure& nu);

struct H2Row {
  double s;
  double velocity_delta;  // max_i |U_i(nu_s) - U_i(nu)|
  double surface_delta;   // sup-norm profile change
};

// Shrinking perturbations s_j = 2^-j, j = 1..levels; deltas should decay.
std::vector<H2Row> check_h2_stability(const GeostrophicMeasure& nu,
                                      const BaseGrid& grid,
                                      const SurfaceSolveOptions& opts,
                                      const TestField& field, int levels = 8);

struct DirectionalDerivative {
  double fd = 0.0;                // (H(nu_s) - H(nu)) / s
  double predicted = 0.0;         // sum nu_i (y_i - c_i) . grad phi(y_i)
  double predicted_envelope = 0;  // same with (I - e3 e3^T) y_i - c_i
};

DirectionalDerivative hamiltonian_directional_derivative(
    const GeostrophicMeasure& nu, const BaseGrid& grid,
    const SurfaceSolveOptions& opts, const TestField& field, double s);

}  // namespace sgfs
