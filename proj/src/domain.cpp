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
#include "sgfs/domain.hpp"

#include <algorithm>
#include <cmath>

namespace sgfs {

void BaseGrid::validate() const {
  if (!(lx > 0.0) || !(ly > 0.0))
    throw ConfigError("base extents must be positive");
  if (nx < 2 || ny < 2) throw ConfigError("base grid needs nx >= 2, ny >= 2");
  if (qx < 1 || qy < 1)
    throw ConfigError("quadrature needs qx >= 1, qy >= 1");
}

SurfaceProfile constant_profile(const BaseGrid& grid) {
  SurfaceProfile p;
  p.grid = grid;
  p.heights.assign(static_cast<std::size_t>(grid.n_nodes()),
                   1.0 / grid.area());
  return p;
}

double volume(const SurfaceProfile& profile) {
  const BaseGrid& g = profile.grid;
  const double cell_area = g.dx() * g.dy();
  double sum = 0.0;
  for (int cj = 0; cj < g.ny - 1; ++cj) {
    for (int ci = 0; ci < g.nx - 1; ++ci) {
      const double s = profile.at(ci, cj) + profile.at(ci + 1, cj) +
                       profile.at(ci, cj + 1) + profile.at(ci + 1, cj + 1);
      sum += 0.25 * s * cell_area;
    }
  }
  return sum;
}

SurfaceProfile normalize_volume(const SurfaceProfile& profile, double target) {
  const double v = volume(profile);
  if (v == 0.0) throw ZeroVolumeError();
  const double scale = target / v;
  SurfaceProfile out = profile;
  for (double& h : out.heights) h *= scale;
  return out;
}

double eval_height(const SurfaceProfile& profile, double x1, double x2) {
  const BaseGrid& g = profile.grid;
  const double u = x1 - g.ox;
  const double v = x2 - g.oy;
  if (u < 0.0 || u > g.lx || v < 0.0 || v > g.ly)
    throw OutOfBaseError(x1, x2);
  int ci = static_cast<int>(u / g.dx());
  int cj = static_cast<int>(v / g.dy());
  ci = std::clamp(ci, 0, g.nx - 2);
  cj = std::clamp(cj, 0, g.ny - 2);
  const double s = (u - ci * g.dx()) / g.dx();
  const double t = (v - cj * g.dy()) / g.dy();
  const double h00 = profile.at(ci, cj);
  const double h10 = profile.at(ci + 1, cj);
  const double h01 = profile.at(ci, cj + 1);
  const double h11 = profile.at(ci + 1, cj + 1);
  return (1.0 - t) * ((1.0 - s) * h00 + s * h10) +
         t * ((1.0 - s) * h01 + s * h11);
}

ColumnQuadrature column_quadrature(const BaseGrid& grid) {
  grid.validate();
  ColumnQuadrature q;
  const std::size_t n = static_cast<std::size_t>(grid.n_cells()) *
                        static_cast<std::size_t>(grid.qx * grid.qy);
  q.x1.reserve(n);
  q.x2.reserve(n);
  q.w.reserve(n);
  const double sx = grid.dx() / grid.qx;
  const double sy = grid.dy() / grid.qy;
  const double sub_area = sx * sy;
  for (int cj = 0; cj < grid.ny - 1; ++cj) {
    for (int ci = 0; ci < grid.nx - 1; ++ci) {
      const double x0 = grid.node_x(ci);
      const double y0 = grid.node_y(cj);
      for (int sj = 0; sj < grid.qy; ++sj) {
        for (int si = 0; si < grid.qx; ++si) {
          q.x1.push_back(x0 + (si + 0.5) * sx);
          q.x2.push_back(y0 + (sj + 0.5) * sy);
          q.w.push_back(sub_area);
        }
      }
    }
  }
  return q;
}

std::vector<double> column_heights(const SurfaceProfile& profile,
                                   const ColumnQuadrature& quad) {
  std::vector<double> h(quad.size());
  for (std::size_t c = 0; c < quad.size(); ++c)
    h[c] = eval_height(profile, quad.x1[c], quad.x2[c]);
  return h;
}

bool is_admissible(const SurfaceProfile& profile, double tol) {
  for (double h : profile.heights)
    if (!(h >= 0.0)) return false;
  return std::abs(volume(profile) - 1.0) <= tol;
}

}  // namespace sgfs
