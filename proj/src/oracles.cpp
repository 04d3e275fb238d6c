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
#include "sgfs/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgfs/threading.hpp"

namespace sgfs::oracles {

namespace {

int argmin_shifted_cost(const GeostrophicMeasure& nu,
                        const std::vector<double>& psi, const Vec3& x) {
  int best = 0;
  double best_v = cost_e(x, nu.points[0]) - psi[0];
  for (std::size_t i = 1; i < nu.size(); ++i) {
    const double v = cost_e(x, nu.points[i]) - psi[i];
    if (v < best_v) {
      best_v = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

VoxelResult voxel_assignment(const SurfaceProfile& profile,
                             const GeostrophicMeasure& nu,
                             const std::vector<double>& psi, int nh, int nv) {
  const BaseGrid& g = profile.grid;
  VoxelResult out;
  out.masses.assign(nu.size(), 0.0);
  const double hx = g.lx / nh;
  const double hy = g.ly / nh;

  const std::size_t n_blocks = std::min<std::size_t>(kReductionBlocks,
                                                     static_cast<std::size_t>(nh));
  struct Partial {
    double cost = 0.0;
    double volume = 0.0;
    std::vector<double> masses;
  };
  std::vector<Partial> partials(n_blocks);
  parallel_blocks(n_blocks, [&](std::size_t blk) {
    Partial& p = partials[blk];
    p.masses.assign(nu.size(), 0.0);
    const int r0 = static_cast<int>(blk * nh / n_blocks);
    const int r1 = static_cast<int>((blk + 1) * nh / n_blocks);
    for (int iy = r0; iy < r1; ++iy) {
      for (int ix = 0; ix < nh; ++ix) {
        const double x1 = g.ox + (ix + 0.5) * hx;
        const double x2 = g.oy + (iy + 0.5) * hy;
        const double h = eval_height(profile, x1, x2);
        if (!(h > 0.0)) continue;
        const double slab = h / nv;
        const double vol = hx * hy * slab;
        for (int iz = 0; iz < nv; ++iz) {
          const Vec3 x{x1, x2, (iz + 0.5) * slab};
          const int i = argmin_shifted_cost(nu, psi, x);
          p.masses[i] += vol;
          p.cost += vol * cost_e(x, nu.points[i]);
          p.volume += vol;
        }
      }
    }
  });
  for (const Partial& p : partials) {
    if (p.masses.empty()) continue;
    out.cost += p.cost;
    out.volume += p.volume;
    for (std::size_t i = 0; i < nu.size(); ++i) out.masses[i] += p.masses[i];
  }
  return out;
}

VoxelResult column_assignment(const SurfaceProfile& profile,
                              const ColumnQuadrature& quad,
                              const GeostrophicMeasure& nu,
                              const std::vector<double>& psi) {
  const std::size_t n = nu.size();
  VoxelResult out;
  out.masses.assign(n, 0.0);
  const std::vector<double> heights = column_heights(profile, quad);

  std::vector<double> cuts;
  for (std::size_t c = 0; c < quad.size(); ++c) {
    const double H = heights[c];
    const double w = quad.w[c];
    if (!(H > 0.0)) continue;
    out.volume += w * H;

    // Segment sweep: cut [0, H] at every pairwise crossing, then assign
    // each segment by direct argmin at its midpoint.
    cuts.clear();
    cuts.push_back(0.0);
    cuts.push_back(H);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3& yi = nu.points[i];
        const Vec3& yj = nu.points[j];
        if (yi.z == yj.z) continue;
        const double bi =
            cost_e({quad.x1[c], quad.x2[c], 0.0}, yi) - psi[i];
        const double bj =
            cost_e({quad.x1[c], quad.x2[c], 0.0}, yj) - psi[j];
        const double cross = (bi - bj) / (yi.z - yj.z);
        if (cross > 0.0 && cross < H) cuts.push_back(cross);
      }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double lo = cuts[s];
      const double hi = cuts[s + 1];
      if (!(hi > lo)) continue;
      const Vec3 mid{quad.x1[c], quad.x2[c], 0.5 * (lo + hi)};
      const int i = argmin_shifted_cost(nu, psi, mid);
      const double len = hi - lo;
      const double i1 = 0.5 * (hi * hi - lo * lo);
      out.masses[i] += w * len;
      const Vec3& y = nu.points[i];
      const double dx = quad.x1[c] - y.x;
      const double dy = quad.x2[c] - y.y;
      out.cost += w * (0.5 * (dx * dx + dy * dy) * len - y.z * i1);
    }
  }
  return out;
}

AtomCloud voxelize_source(const SurfaceProfile& profile, int nh, int nv) {
  const BaseGrid& g = profile.grid;
  AtomCloud cloud;
  const double hx = g.lx / nh;
  const double hy = g.ly / nh;
  for (int iy = 0; iy < nh; ++iy)
    for (int ix = 0; ix < nh; ++ix) {
      const double x1 = g.ox + (ix + 0.5) * hx;
      const double x2 = g.oy + (iy + 0.5) * hy;
      const double h = eval_height(profile, x1, x2);
      if (!(h > 0.0)) continue;
      const double slab = h / nv;
      for (int iz = 0; iz < nv; ++iz) {
        cloud.points.push_back({x1, x2, (iz + 0.5) * slab});
        cloud.weights.push_back(hx * hy * slab);
      }
    }
  return cloud;
}

LpPlan lp_plan(const AtomCloud& atoms, const GeostrophicMeasure& nu,
               GroundCost ground) {
  const std::size_t m = atoms.points.size();
  const std::size_t n = nu.size();
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3& x = atoms.points[i];
      const Vec3& y = nu.points[j];
      cost[i * n + j] = ground == GroundCost::transport_e
                            ? cost_e(x, y)
                            : 0.5 * norm2(x - y);
    }
  // Atom weights are renormalised against the particle weights inside the
  // LP; pass them as they come.
  std::vector<double> plan;
  LpPlan out;
  out.cost = detail::transport_lp(cost, m, n, atoms.weights, nu.weights, &plan);
  double wmax = 0.0;
  for (double f : plan) wmax = std::fmax(wmax, f);
  const double tol = 1e-12 * (1.0 + wmax);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (plan[i * n + j] > tol)
        out.support.push_back({static_cast<int>(i), static_cast<int>(j)});
  return out;
}

namespace {

struct ColumnGeom {
  double x1, x2, w, H;
};

std::vector<ColumnGeom> columns_of(const SurfaceProfile& profile,
                                   const ColumnQuadrature& quad) {
  std::vector<ColumnGeom> cols;
  const std::vector<double> heights = column_heights(profile, quad);
  for (std::size_t c = 0; c < quad.size(); ++c)
    if (heights[c] > 0.0)
      cols.push_back({quad.x1[c], quad.x2[c], quad.w[c], heights[c]});
  return cols;
}

double column_piece_cost(const ColumnGeom& col, const Vec3& y, double lo,
                         double hi) {
  const double dx = col.x1 - y.x;
  const double dy = col.x2 - y.y;
  const double len = hi - lo;
  const double i1 = 0.5 * (hi * hi - lo * lo);
  return col.w * (0.5 * (dx * dx + dy * dy) * len - y.z * i1);
}

// Mass of particle 1 as a function of the dual offset s = psi1 - psi0,
// resolved directly from the two-line crossing; nondecreasing in s.
double two_particle_mass1(const std::vector<ColumnGeom>& cols, const Vec3& y0,
                          const Vec3& y1, double s) {
  double m1 = 0.0;
  for (const auto& col : cols) {
    const double dx0 = col.x1 - y0.x, dy0 = col.x2 - y0.y;
    const double dx1 = col.x1 - y1.x, dy1 = col.x2 - y1.y;
    const double b0 = 0.5 * (dx0 * dx0 + dy0 * dy0);
    const double b1 = 0.5 * (dx1 * dx1 + dy1 * dy1) - s;
    if (y0.z == y1.z) {
      if (b1 < b0) m1 += col.w * col.H;
      continue;
    }
    // f0 < f1 iff (b0 - b1) < (y0.z - y1.z) x3
    const double cross = (b0 - b1) / (y0.z - y1.z);
    double lo1, hi1;  // interval owned by particle 1
    if (y1.z > y0.z) {
      lo1 = std::clamp(cross, 0.0, col.H);  // 1 wins above the crossing
      hi1 = col.H;
    } else {
      lo1 = 0.0;
      hi1 = std::clamp(cross, 0.0, col.H);
    }
    if (hi1 > lo1) m1 += col.w * (hi1 - lo1);
  }
  return m1;
}

}  // namespace

double inner_cost_small(const SurfaceProfile& profile,
                        const ColumnQuadrature& quad,
                        const GeostrophicMeasure& nu) {
  const auto cols = columns_of(profile, quad);
  if (nu.size() == 1) {
    double c = 0.0;
    for (const auto& col : cols)
      c += column_piece_cost(col, nu.points[0], 0.0, col.H);
    return c;
  }
  if (nu.size() != 2)
    throw TooLargeError(nu.size());

  const Vec3 y0 = nu.points[0];
  const Vec3 y1 = nu.points[1];
  const double target = nu.weights[1];

  // m1(s) is nondecreasing; bracket then bisect.
  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 80 && two_particle_mass1(cols, y0, y1, lo) > target;
       ++k)
    lo *= 2.0;
  for (int k = 0; k < 80 && two_particle_mass1(cols, y0, y1, hi) < target;
       ++k)
    hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (two_particle_mass1(cols, y0, y1, mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1.0 + std::abs(lo))) break;
  }
  const double s = 0.5 * (lo + hi);

  double c = 0.0;
  for (const auto& col : cols) {
    const double dx0 = col.x1 - y0.x, dy0 = col.x2 - y0.y;
    const double dx1 = col.x1 - y1.x, dy1 = col.x2 - y1.y;
    const double b0 = 0.5 * (dx0 * dx0 + dy0 * dy0);
    const double b1 = 0.5 * (dx1 * dx1 + dy1 * dy1) - s;
    if (y0.z == y1.z) {
      const Vec3& y = (b1 < b0) ? y1 : y0;
      c += column_piece_cost(col, y, 0.0, col.H);
      continue;
    }
    const double cross =
        std::clamp((b0 - b1) / (y0.z - y1.z), 0.0, col.H);
    if (y1.z > y0.z) {
      c += column_piece_cost(col, y0, 0.0, cross);
      c += column_piece_cost(col, y1, cross, col.H);
    } else {
      c += column_piece_cost(col, y1, 0.0, cross);
      c += column_piece_cost(col, y0, cross, col.H);
    }
  }
  return c;
}

namespace {

SurfaceProfile profile_from_levels(const BaseGrid& grid,
                                   const std::vector<int>& levels,
                                   double quantum) {
  SurfaceProfile p;
  p.grid = grid;
  p.heights.resize(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k)
    p.heights[k] = levels[k] * quantum;
  return p;
}

double cost_of_levels(const BaseGrid& grid, const ColumnQuadrature& quad,
                      const GeostrophicMeasure& nu,
                      const std::vector<int>& levels, double quantum,
                      SurfaceProfile* normalized_out) {
  SurfaceProfile p = profile_from_levels(grid, levels, quantum);
  const double v = volume(p);
  if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
  for (double& h : p.heights) h /= v;
  if (normalized_out) *normalized_out = p;
  return inner_cost_small(p, quad, nu);
}

double resolution_of(const BaseGrid& grid, const ColumnQuadrature& quad,
                     const GeostrophicMeasure& nu,
                     const std::vector<int>& levels, double quantum,
                     int max_level, double best_cost) {
  double res = 0.0;
  std::vector<int> probe = levels;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    for (int d : {-1, 1}) {
      const int l = levels[k] + d;
      if (l < 0 || l > max_level) continue;
      probe[k] = l;
      const double c = cost_of_levels(grid, quad, nu, probe, quantum, nullptr);
      if (std::isfinite(c)) res = std::fmax(res, std::abs(c - best_cost));
      probe[k] = levels[k];
    }
  }
  return res;
}

}  // namespace

LatticeSearchResult lattice_search_full(const GeostrophicMeasure& nu,
                                        const BaseGrid& grid, int levels,
                                        double h_cap) {
  grid.validate();
  const int nodes = grid.n_nodes();
  if (nodes > 4) throw TooLargeError(static_cast<std::size_t>(nodes));
  const double quantum = h_cap / (levels - 1);
  const ColumnQuadrature quad = column_quadrature(grid);

  std::vector<int> idx(nodes, 0), best_idx(nodes, 0);
  double best = -std::numeric_limits<double>::infinity();
  long candidates = 0;
  while (true) {
    const double c = cost_of_levels(grid, quad, nu, idx, quantum, nullptr);
    ++candidates;
    if (c > best) {
      best = c;
      best_idx = idx;
    }
    int k = 0;
    while (k < nodes && ++idx[k] == levels) {
      idx[k] = 0;
      ++k;
    }
    if (k == nodes) break;
  }

  LatticeSearchResult out;
  out.cost = cost_of_levels(grid, quad, nu, best_idx, quantum, &out.profile);
  out.height_quantum = quantum / std::fmax(volume(profile_from_levels(
                                               grid, best_idx, quantum)),
                                           1e-300);
  out.cost_resolution =
      resolution_of(grid, quad, nu, best_idx, quantum, levels - 1, out.cost);
  out.candidates = candidates;
  return out;
}

LatticeSearchResult lattice_sweep(const GeostrophicMeasure& nu,
                                  const BaseGrid& grid, int levels,
                                  double h_cap, int max_sweeps) {
  grid.validate();
  const int nodes = grid.n_nodes();
  const double quantum = h_cap / (levels - 1);
  const ColumnQuadrature quad = column_quadrature(grid);

  // Start from the flattest admissible lattice profile.
  const double flat = 1.0 / grid.area();
  const int flat_level =
      std::clamp(static_cast<int>(std::lround(flat / quantum)), 1, levels - 1);
  std::vector<int> idx(nodes, flat_level);
  double best = cost_of_levels(grid, quad, nu, idx, quantum, nullptr);
  long candidates = 1;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (int k = 0; k < nodes; ++k) {
      int best_l = idx[k];
      for (int l = 0; l < levels; ++l) {
        if (l == idx[k]) continue;
        std::vector<int> cand = idx;
        cand[k] = l;
        const double c = cost_of_levels(grid, quad, nu, cand, quantum, nullptr);
        ++candidates;
        if (c > best + 1e-15 * (1.0 + std::abs(best))) {
          best = c;
          best_l = l;
        }
      }
      if (best_l != idx[k]) {
        idx[k] = best_l;
        changed = true;
      }
    }
    if (!changed) break;
  }

  LatticeSearchResult out;
  out.cost = cost_of_levels(grid, quad, nu, idx, quantum, &out.profile);
  const double v = volume(profile_from_levels(grid, idx, quantum));
  out.height_quantum = quantum / std::fmax(v, 1e-300);
  out.cost_resolution =
      resolution_of(grid, quad, nu, idx, quantum, levels - 1, out.cost);
  out.candidates = candidates;
  return out;
}

}  // namespace sgfs::oracles
