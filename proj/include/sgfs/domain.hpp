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

#include "sgfs/errors.hpp"

namespace sgfs {

// Rectangular base B = (ox, ox+lx) x (oy, oy+ly) with nx x ny surface nodes
// and qx x qy quadrature sub-columns per grid cell.
struct BaseGrid {
  double lx = 1.0;
  double ly = 1.0;
  int nx = 2;
  int ny = 2;
  int qx = 1;
  int qy = 1;
  double ox = 0.0;
  double oy = 0.0;

  double dx() const { return lx / (nx - 1); }
  double dy() const { return ly / (ny - 1); }
  double area() const { return lx * ly; }
  double node_x(int i) const { return ox + i * dx(); }
  double node_y(int j) const { return oy + j * dy(); }
  int n_nodes() const { return nx * ny; }
  int n_cells() const { return (nx - 1) * (ny - 1); }

  void validate() const;
};

// Surface height sampled at grid nodes, bilinear in between. Membership in
// the admissible class is continuity (automatic), non-negativity and unit
// volume, checked by is_admissible.
struct SurfaceProfile {
  BaseGrid grid;
  std::vector<double> heights;  // node (i,j) at heights[j*nx + i]

  double& at(int i, int j) { return heights[j * grid.nx + i]; }
  double at(int i, int j) const { return heights[j * grid.nx + i]; }
};

// Horizontal quadrature: one column per sub-cell midpoint, weight = sub-cell
// area. Column order is fixed (cells row-major with i fastest, then the
// qx x qy sub-columns row-major) so reductions are reproducible.
struct ColumnQuadrature {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
};

SurfaceProfile constant_profile(const BaseGrid& grid);

// Exact integral of the bilinear interpolant over B.
double volume(const SurfaceProfile& profile);

// Scales heights by a single factor so that volume == target.
SurfaceProfile normalize_volume(const SurfaceProfile& profile, double target);

// Bilinear interpolation; throws OutOfBaseError outside the closed base.
double eval_height(const SurfaceProfile& profile, double x1, double x2);

ColumnQuadrature column_quadrature(const BaseGrid& grid);

// Heights per column of the quadrature, in column order.
std::vector<double> column_heights(const SurfaceProfile& profile,
                                   const ColumnQuadrature& quad);

bool is_admissible(const SurfaceProfile& profile, double tol);

}  // namespace sgfs
