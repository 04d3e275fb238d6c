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

#include <cstddef>
#include <string>
#include <vector>

#include "sgfs/errors.hpp"
#include "sgfs/geometry.hpp"
#include "sgfs/test_field.hpp"

namespace sgfs {

// Weighted particle cloud in geostrophic coordinates. Weights sum to one,
// every weight is positive, every point lies in the recorded support box,
// and every vertical coordinate is positive (the surface root-finder needs
// strictly increasing columns).
struct GeostrophicMeasure {
  std::vector<Vec3> points;
  std::vector<double> weights;
  Box3 support;

  std::size_t size() const { return points.size(); }
  void validate(double tol = 1e-12) const;  // throws SolverError on violation
};

struct DensitySpec {
  enum class Kind { uniform_box, gaussian_blob, two_blob };

  Kind kind = Kind::uniform_box;
  Box3 box;                        // uniform_box support
  Vec3 centers[2];                 // blob centres
  double sigmas[2] = {0.1, 0.1};   // blob spreads
  double mix[2] = {0.5, 0.5};      // mixture weights
  double support_sigmas = 3.0;     // blob support half-width, in sigmas
  int cell_average_m = 3;          // sub-samples per cell and axis

  static Kind kind_from_string(const std::string& s);
};

// Deterministic cell-centre discretisation: n_per_axis^3 cells per component
// box, weights proportional to the cell-averaged density, weights below
// 1e-14 dropped, then renormalised. Vertical coordinates that would collide
// exactly receive a graded sub-cell offset: pairwise-distinct slopes keep
// the dual mass system invertible under column quadrature.
GeostrophicMeasure discretize(const DensitySpec& spec, int n_per_axis);

double second_moment(const GeostrophicMeasure& nu);

// Squared 2-Wasserstein distance by exact transportation LP (exhaustive
// enumeration of matchings backs it in the tests). Throws TooLargeError
// above 12 particles per side.
double w2_bruteforce(const GeostrophicMeasure& mu,
                     const GeostrophicMeasure& nu);

// Pushforward under y + s * grad phi; weights unchanged, support box grown
// to contain the displaced points.
GeostrophicMeasure perturb(const GeostrophicMeasure& nu, const TestField& phi,
                           double s);

namespace detail {

// Exact dense transportation LP (simplex on the spanning-tree basis).
// cost is row-major m x n, a sums to b's total. Returns optimal cost and,
// optionally, the optimal plan.
double transport_lp(const std::vector<double>& cost, std::size_t m,
                    std::size_t n, const std::vector<double>& a,
                    const std::vector<double>& b,
                    std::vector<double>* plan_out = nullptr);

// Minimum over all bijections, for equal-count equal-weight point sets.
// Returns the optimal permutation. n <= 10.
double min_cost_matching(const std::vector<double>& cost, std::size_t n,
                         std::vector<int>* perm_out = nullptr);

}  // namespace detail

}  // namespace sgfs
