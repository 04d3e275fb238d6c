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

#include "sgfs/geometry.hpp"

namespace sgfs {

// Smooth, effectively compactly supported probe field built from Gaussian
// bumps G_k(y) = exp(-|y - c_k|^2 / w_k^2):
//
//   vector field  Phi(y)  = sum_k a_k G_k(y)
//   potential     phi(y)  = sum_k (a_k . (y - c_k)) G_k(y)
//
// |Phi| decays below 1e-12 * |a| outside six widths from every centre.
// With horizontal_only set, bumps and amplitudes ignore the vertical
// coordinate entirely, so grad phi has an exactly zero third component.
// An optional exact linear term (phi += g . y) provides constant-gradient
// probes for translation and composition checks.
struct TestField {
  struct Bump {
    Vec3 center;
    double width = 1.0;
    Vec3 amplitude;
  };

  std::vector<Bump> bumps;
  bool horizontal_only = false;
  bool has_linear = false;
  Vec3 linear_gradient;

  static TestField linear(const Vec3& gradient) {
    TestField f;
    f.has_linear = true;
    f.linear_gradient = gradient;
    return f;
  }

  Vec3 vector_at(const Vec3& y) const;
  double potential(const Vec3& y) const;
  Vec3 grad_potential(const Vec3& y) const;

  // max over points of |grad phi| is not closed-form; this crude bound is
  // enough to inflate support boxes.
  double gradient_bound() const;
};

// Deterministic field generator used by probes and the acceptance suite.
// horizontal_only zeroes all vertical amplitude components.
TestField random_field(std::uint64_t seed, const Box3& around, int n_bumps,
                       bool horizontal_only);

}  // namespace sgfs
