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
#include "sgfs/test_field.hpp"

#include <cmath>

#include "sgfs/rng.hpp"

namespace sgfs {

namespace {

inline Vec3 masked(const Vec3& v, bool horizontal) {
  return horizontal ? Vec3{v.x, v.y, 0.0} : v;
}

}  // namespace

Vec3 TestField::vector_at(const Vec3& y) const {
  Vec3 out;
  if (has_linear) out = out + linear_gradient;
  for (const Bump& b : bumps) {
    const Vec3 d = masked(y - b.center, horizontal_only);
    const double g = std::exp(-norm2(d) / (b.width * b.width));
    out = out + g * b.amplitude;
  }
  return out;
}

double TestField::potential(const Vec3& y) const {
  double out = 0.0;
  if (has_linear) out += dot(linear_gradient, y);
  for (const Bump& b : bumps) {
    const Vec3 d = masked(y - b.center, horizontal_only);
    const double g = std::exp(-norm2(d) / (b.width * b.width));
    out += dot(b.amplitude, d) * g;
  }
  return out;
}

Vec3 TestField::grad_potential(const Vec3& y) const {
  Vec3 out;
  if (has_linear) out = out + linear_gradient;
  for (const Bump& b : bumps) {
    const Vec3 d = masked(y - b.center, horizontal_only);
    const double w2 = b.width * b.width;
    const double g = std::exp(-norm2(d) / w2);
    const Vec3 a = masked(b.amplitude, horizontal_only);
    const double s = dot(a, d);
    out = out + g * a + (-2.0 * s * g / w2) * d;
  }
  return out;
}

double TestField::gradient_bound() const {
  double bound = has_linear ? norm(linear_gradient) : 0.0;
  for (const Bump& b : bumps)
    bound += 2.0 * norm(b.amplitude);  // |grad| peaks below 2|a| for any width
  return bound;
}

TestField random_field(std::uint64_t seed, const Box3& around, int n_bumps,
                       bool horizontal_only) {
  Rng rng(seed);
  TestField f;
  f.horizontal_only = horizontal_only;
  const Vec3 ext = around.extent();
  const double scale =
      std::fmax(std::fmax(ext.x, ext.y), std::fmax(ext.z, 1e-3));
  for (int k = 0; k < n_bumps; ++k) {
    TestField::Bump b;
    b.center = {rng.uniform(around.lo.x, around.hi.x),
                rng.uniform(around.lo.y, around.hi.y),
                rng.uniform(around.lo.z, around.hi.z)};
    b.width = rng.uniform(0.4, 1.2) * scale;
    b.amplitude = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                   horizontal_only ? 0.0 : rng.uniform(-1.0, 1.0)};
    f.bumps.push_back(b);
  }
  return f;
}

}  // namespace sgfs
