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
#include "sgfs/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "sgfs/errors.hpp"

namespace sgfs {

void GeostrophicMeasure::validate(double tol) const {
  if (points.size() != weights.size())
    throw SolverError("measure arrays disagree in length");
  if (points.empty()) throw EmptyMeasureError();
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(weights[i] > 0.0))
      throw SolverError("particle " + std::to_string(i) +
                        " has non-positive weight");
    if (!(points[i].z > 0.0))
      throw SolverError("particle " + std::to_string(i) +
                        " has non-positive vertical coordinate");
    if (!support.contains(points[i], 1e-12))
      throw SolverError("particle " + std::to_string(i) +
                        " escapes the recorded support box");
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > tol)
    throw SolverError("weights sum to " + std::to_string(sum));
}

DensitySpec::Kind DensitySpec::kind_from_string(const std::string& s) {
  if (s == "uniform_box") return Kind::uniform_box;
  if (s == "gaussian_blob") return Kind::gaussian_blob;
  if (s == "two_blob") return Kind::two_blob;
  throw ConfigError("unknown density kind '" + s + "'");
}

namespace {

struct Component {
  Box3 box;
  Vec3 center;
  double sigma = 0.0;  // 0 means uniform
  double mass = 1.0;
};

double density_at(const Component& c, const Vec3& p) {
  if (c.sigma <= 0.0) return 1.0;
  const double r2 = norm2(p - c.center);
  return std::exp(-r2 / (2.0 * c.sigma * c.sigma));
}

std::vector<Component> components_of(const DensitySpec& spec) {
  std::vector<Component> comps;
  switch (spec.kind) {
    case DensitySpec::Kind::uniform_box:
      comps.push_back({spec.box, spec.box.center(), 0.0, 1.0});
      break;
    case DensitySpec::Kind::gaussian_blob: {
      const double r = spec.support_sigmas * spec.sigmas[0];
      Box3 b{{spec.centers[0].x - r, spec.centers[0].y - r,
              spec.centers[0].z - r},
             {spec.centers[0].x + r, spec.centers[0].y + r,
              spec.centers[0].z + r}};
      comps.push_back({b, spec.centers[0], spec.sigmas[0], 1.0});
      break;
    }
    case DensitySpec::Kind::two_blob: {
      for (int k = 0; k < 2; ++k) {
        const double r = spec.support_sigmas * spec.sigmas[k];
        Box3 b{{spec.centers[k].x - r, spec.centers[k].y - r,
                spec.centers[k].z - r},
               {spec.centers[k].x + r, spec.centers[k].y + r,
                spec.centers[k].z + r}};
        comps.push_back({b, spec.centers[k], spec.sigmas[k], spec.mix[k]});
      }
      break;
    }
  }
  return comps;
}

}  // namespace

GeostrophicMeasure discretize(const DensitySpec& spec, int n_per_axis) {
  if (n_per_axis < 1) throw ConfigError("n_per_axis must be >= 1");
  const int m = std::max(1, spec.cell_average_m);
  const auto comps = components_of(spec);

  GeostrophicMeasure nu;
  double min_hz = 0.0;
  bool first_box = true;
  for (const auto& comp : comps) {
    const Vec3 ext = comp.box.extent();
    if (!(ext.x > 0.0 && ext.y > 0.0 && ext.z > 0.0))
      throw ConfigError("density support box is degenerate");
    if (!(comp.box.lo.z > 0.0))
      throw ConfigError("density support must lie above the base plane");
    const double hx = ext.x / n_per_axis;
    const double hy = ext.y / n_per_axis;
    const double hz = ext.z / n_per_axis;
    min_hz = first_box ? hz : std::fmin(min_hz, hz);
    if (first_box) {
      nu.support = comp.box;
      first_box = false;
    } else {
      nu.support.expand_to(comp.box.lo);
      nu.support.expand_to(comp.box.hi);
    }
    const double cell_vol = hx * hy * hz;
    for (int iz = 0; iz < n_per_axis; ++iz) {
      for (int iy = 0; iy < n_per_axis; ++iy) {
        for (int ix = 0; ix < n_per_axis; ++ix) {
          const Vec3 c{comp.box.lo.x + (ix + 0.5) * hx,
                       comp.box.lo.y + (iy + 0.5) * hy,
                       comp.box.lo.z + (iz + 0.5) * hz};
          double avg = 0.0;
          for (int sz = 0; sz < m; ++sz)
            for (int sy = 0; sy < m; ++sy)
              for (int sx = 0; sx < m; ++sx) {
                const Vec3 p{
                    comp.box.lo.x + (ix + (sx + 0.5) / m) * hx,
                    comp.box.lo.y + (iy + (sy + 0.5) / m) * hy,
                    comp.box.lo.z + (iz + (sz + 0.5) / m) * hz};
                avg += density_at(comp, p);
              }
          avg /= static_cast<double>(m) * m * m;
          const double w = comp.mass * avg * cell_vol;
          if (w > 0.0) {
            nu.points.push_back(c);
            nu.weights.push_back(w);
          }
        }
      }
    }
  }

  double total = std::accumulate(nu.weights.begin(), nu.weights.end(), 0.0);
  if (!(total > 0.0)) throw EmptyMeasureError();
  for (double& w : nu.weights) w /= total;

  // Drop negligible atoms, renormalise again.
  {
    GeostrophicMeasure kept;
    kept.support = nu.support;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (nu.weights[i] >= 1e-14) {
        kept.points.push_back(nu.points[i]);
        kept.weights.push_back(nu.weights[i]);
      }
    }
    if (kept.points.empty()) throw EmptyMeasureError();
    total = std::accumulate(kept.weights.begin(), kept.weights.end(), 0.0);
    for (double& w : kept.weights) w /= total;
    nu = std::move(kept);
  }

  // Graded vertical de-tie: exactly equal vertical coordinates would make
  // cell masses a step function of the dual weights, and the mass system
  // unsolvable to tight tolerance under column quadrature.
  {
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < nu.size(); ++i)
      groups[nu.points[i].z].push_back(i);
    const double step = 1e-4 * min_hz;
    for (auto& [z, idx] : groups) {
      if (idx.size() < 2) continue;
      for (std::size_t r = 1; r < idx.size(); ++r) {
        nu.points[idx[r]].z = z + static_cast<double>(r) * step;
        nu.support.expand_to(nu.points[idx[r]]);
      }
    }
  }

  nu.validate();
  return nu;
}

double second_moment(const GeostrophicMeasure& nu) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    s += nu.weights[i] * norm2(nu.points[i]);
  return s;
}

GeostrophicMeasure perturb(const GeostrophicMeasure& nu, const TestField& phi,
                           double s) {
  GeostrophicMeasure out = nu;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    out.points[i] = nu.points[i] + s * phi.grad_potential(nu.points[i]);
    out.support.expand_to(out.points[i]);
  }
  return out;
}

double w2_bruteforce(const GeostrophicMeasure& mu,
                     const GeostrophicMeasure& nu) {
  constexpr std::size_t kMax = 12;
  if (mu.size() > kMax) throw TooLargeError(mu.size());
  if (nu.size() > kMax) throw TooLargeError(nu.size());
  const std::size_t m = mu.size();
  const std::size_t n = nu.size();
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = norm2(mu.points[i] - nu.points[j]);
  return detail::transport_lp(cost, m, n, mu.weights, nu.weights);
}

namespace detail {

double transport_lp(const std::vector<double>& cost, std::size_t m,
                    std::size_t n, const std::vector<double>& a_in,
                    const std::vector<double>& b_in,
                    std::vector<double>* plan_out) {
  std::vector<double> a = a_in;
  std::vector<double> b = b_in;
  const double ta = std::accumulate(a.begin(), a.end(), 0.0);
  const double tb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(ta > 0.0) || !(tb > 0.0))
    throw SolverError("transport LP needs positive marginals");
  for (double& x : b) x *= ta / tb;

  struct Arc {
    int i, j;
    double flow;
  };
  std::vector<Arc> basis;
  basis.reserve(m + n - 1);

  // Northwest-corner initial basic solution.
  {
    std::size_t i = 0, j = 0;
    double ra = a[0], rb = b[0];
    while (true) {
      const double t = std::fmin(ra, rb);
      basis.push_back({static_cast<int>(i), static_cast<int>(j), t});
      ra -= t;
      rb -= t;
      if (i == m - 1 && j == n - 1) break;
      if (ra <= rb && i < m - 1) {
        ++i;
        ra = a[i];
      } else if (j < n - 1) {
        ++j;
        rb = b[j];
      } else {
        ++i;
        ra = a[i];
      }
    }
  }

  const std::size_t nodes = m + n;  // sources 0..m-1, sinks m..m+n-1
  double cmax = 0.0;
  for (double c : cost) cmax = std::fmax(cmax, std::abs(c));
  const double tol = 1e-12 * (1.0 + cmax);

  std::vector<double> u(m), v(n);
  std::vector<int> parent(nodes), parent_arc(nodes), order(nodes);
  std::vector<std::vector<int>> adj(nodes);

  const std::size_t max_iters = 200 * nodes * nodes + 1000;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // Tree traversal from node 0: potentials and parent pointers.
    for (auto& l : adj) l.clear();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      adj[basis[k].i].push_back(static_cast<int>(k));
      adj[m + basis[k].j].push_back(static_cast<int>(k));
    }
    std::fill(parent.begin(), parent.end(), -2);
    std::size_t head = 0, tail = 0;
    order[tail++] = 0;
    parent[0] = -1;
    u[0] = 0.0;
    while (head < tail) {
      const int x = order[head++];
      for (int k : adj[x]) {
        const Arc& arc = basis[k];
        const int other = (x == arc.i) ? static_cast<int>(m) + arc.j : arc.i;
        if (parent[other] != -2) continue;
        parent[other] = x;
        parent_arc[other] = k;
        if (other >= static_cast<int>(m))
          v[other - m] = cost[arc.i * n + arc.j] - u[arc.i];
        else
          u[other] = cost[arc.i * n + arc.j] - v[arc.j];
        order[tail++] = other;
      }
    }
    if (tail != nodes)
      throw SolverError("transport LP basis lost connectivity");

    // Bland: first arc with negative reduced cost enters.
    int ei = -1, ej = -1;
    for (std::size_t i = 0; i < m && ei < 0; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (cost[i * n + j] - u[i] - v[j] < -tol) {
          ei = static_cast<int>(i);
          ej = static_cast<int>(j);
          break;
        }
    if (ei < 0) break;  // optimal

    // Unique tree path between the entering arc's endpoints.
    std::vector<int> depth(nodes, -1);
    for (std::size_t k = 0; k < nodes; ++k) {
      const int node = order[k];
      depth[node] = parent[node] < 0 ? 0 : depth[parent[node]] + 1;
    }
    int x = ei, y = static_cast<int>(m) + ej;
    std::vector<int> arcs_x, arcs_y;
    while (x != y) {
      if (depth[x] >= depth[y]) {
        arcs_x.push_back(parent_arc[x]);
        x = parent[x];
      } else {
        arcs_y.push_back(parent_arc[y]);
        y = parent[y];
      }
    }
    std::vector<int> cycle;  // arcs around the cycle, entering arc implicit
    cycle.insert(cycle.end(), arcs_x.begin(), arcs_x.end());
    std::reverse(arcs_y.begin(), arcs_y.end());
    cycle.insert(cycle.end(), arcs_y.begin(), arcs_y.end());

    // Walking from the entering source endpoint, odd positions lose flow.
    // The walk starts at ei along arcs_x then arcs_y; arcs alternate sign
    // starting with minus.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    int sign = -1;
    for (int k : cycle) {
      if (sign < 0 && basis[k].flow < theta) {
        theta = basis[k].flow;
        leave = k;
      }
      sign = -sign;
    }
    if (leave < 0) throw SolverError("transport LP found no leaving arc");

    sign = -1;
    for (int k : cycle) {
      basis[k].flow += sign * theta;
      sign = -sign;
    }
    basis[leave] = {ei, ej, theta};
  }

  double total = 0.0;
  for (const Arc& arc : basis) total += arc.flow * cost[arc.i * n + arc.j];
  if (plan_out) {
    plan_out->assign(m * n, 0.0);
    for (const Arc& arc : basis) (*plan_out)[arc.i * n + arc.j] += arc.flow;
  }
  return total;
}

double min_cost_matching(const std::vector<double>& cost, std::size_t n,
                         std::vector<int>* perm_out) {
  // Shift every row to be non-negative so partial sums admit pruning; the
  // argmin over bijections is unchanged.
  std::vector<double> shifted = cost;
  double offset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = shifted[i * n];
    for (std::size_t j = 1; j < n; ++j) lo = std::fmin(lo, shifted[i * n + j]);
    for (std::size_t j = 0; j < n; ++j) shifted[i * n + j] -= lo;
    offset += lo;
  }

  std::vector<int> perm(n), best_perm(n);
  std::vector<bool> used(n, false);
  double best = std::numeric_limits<double>::infinity();
  // Depth-first over permutations in lexicographic order with pruning.
  std::function<void(std::size_t, double)> rec = [&](std::size_t i,
                                                     double acc) {
    if (acc >= best) return;
    if (i == n) {
      best = acc;
      best_perm = perm;
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      perm[i] = static_cast<int>(j);
      rec(i + 1, acc + shifted[i * n + j]);
      used[j] = false;
    }
  };
  rec(0, 0.0);
  if (perm_out) *perm_out = best_perm;
  return best + offset;
}

}  // namespace detail

}  // namespace sgfs
