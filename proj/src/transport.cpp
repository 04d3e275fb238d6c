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
#include "sgfs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sgfs/kernels.hpp"
#include "sgfs/threading.hpp"

namespace sgfs {

void DualState::gauge() {
  if (psi.empty()) return;
  const double lo = *std::min_element(psi.begin(), psi.end());
  for (double& p : psi) p -= lo;
}

std::vector<double> LaguerreTessellation::masses() const {
  std::vector<double> m(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) m[i] = cells[i].mass;
  return m;
}

Vec3 LaguerreTessellation::barycenter(std::size_t i) const {
  const CellAggregates& c = cells[i];
  if (!(c.mass > 0.0)) throw EmptyCellError(static_cast<int>(i));
  return {c.sx1 / c.mass, c.sx2 / c.mass, c.m1 / c.mass};
}

double LaguerreTessellation::min_mass() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : cells) lo = std::fmin(lo, c.mass);
  return lo;
}

namespace {

// Particle order by increasing vertical coordinate (envelope slope is
// -y3, so this is decreasing slope = left-to-right activation order).
std::vector<int> slope_order(const GeostrophicMeasure& nu) {
  std::vector<int> order(nu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return nu.points[a].z < nu.points[b].z;
  });
  return order;
}

struct StackEntry {
  int idx;
  double b;      // intercept
  double slope;  // -y3
  double start;  // x3 where this line becomes the envelope
};

struct BlockScratch {
  std::vector<double> intercepts;
  std::vector<StackEntry> stack;
  std::vector<CellAggregates> cells;
  std::vector<double> hessian;
  double source_volume = 0.0;
  double dual_integral = 0.0;
};

}  // namespace

TessellationBuild build_tessellation_ex(const SurfaceProfile& profile,
                                        const ColumnQuadrature& quad,
                                        const GeostrophicMeasure& nu,
                                        const DualState& dual,
                                        const TessellationRequest& req) {
  const std::size_t n = nu.size();
  if (dual.psi.size() != n)
    throw SolverError("dual state size does not match the measure");

  const std::vector<int> order = slope_order(nu);
  const std::vector<double> col_h = column_heights(profile, quad);
  const std::size_t n_cols = quad.size();

  // SoA views for the intercept kernel.
  std::vector<double> py1(n), py2(n), py3(n);
  for (std::size_t i = 0; i < n; ++i) {
    py1[i] = nu.points[i].x;
    py2[i] = nu.points[i].y;
    py3[i] = nu.points[i].z;
  }

  TessellationBuild out;
  out.tess.cells.assign(n, CellAggregates{});
  if (req.columns) out.tess.columns.assign(n_cols, {});
  if (req.hessian) out.hessian.assign(n * n, 0.0);

  const std::size_t n_blocks =
      std::min<std::size_t>(kReductionBlocks, std::max<std::size_t>(n_cols, 1));
  std::vector<BlockScratch> blocks(n_blocks);

  auto process_block = [&](std::size_t blk) {
    BlockScratch& s = blocks[blk];
    s.intercepts.resize(n);
    s.cells.assign(n, CellAggregates{});
    if (req.hessian) s.hessian.assign(n * n, 0.0);
    const std::size_t c0 = blk * n_cols / n_blocks;
    const std::size_t c1 = (blk + 1) * n_cols / n_blocks;

    for (std::size_t c = c0; c < c1; ++c) {
      const double H = col_h[c];
      const double w = quad.w[c];
      if (!(H > 0.0)) continue;
      s.source_volume += w * H;

      kernels::column_intercepts(py1.data(), py2.data(), dual.psi.data(), n,
                                 quad.x1[c], quad.x2[c],
                                 s.intercepts.data());

      // Lower envelope: push lines in decreasing slope order; among equal
      // slopes only the lowest line survives (ties to the lowest index).
      s.stack.clear();
      std::size_t k = 0;
      while (k < order.size()) {
        int idx = order[k];
        double slope = -py3[idx];
        double b = s.intercepts[idx];
        std::size_t k2 = k + 1;
        while (k2 < order.size() && -py3[order[k2]] == slope) {
          const int j = order[k2];
          if (s.intercepts[j] < b) {
            idx = j;
            b = s.intercepts[j];
          }
          ++k2;
        }
        k = k2;

        double start = -std::numeric_limits<double>::infinity();
        while (!s.stack.empty()) {
          const StackEntry& top = s.stack.back();
          const double cross = (b - top.b) / (top.slope - slope);
          if (cross <= top.start) {
            s.stack.pop_back();
            continue;
          }
          start = cross;
          break;
        }
        s.stack.push_back({idx, b, slope, start});
      }

      // Clip pieces to [0, H] and accumulate exact vertical integrals.
      for (std::size_t p = 0; p < s.stack.size(); ++p) {
        const StackEntry& e = s.stack[p];
        const double lo = std::fmax(e.start, 0.0);
        const double hi =
            (p + 1 < s.stack.size()) ? std::fmin(s.stack[p + 1].start, H) : H;
        if (!(hi > lo)) continue;
        const double len = hi - lo;
        const double i1 = 0.5 * (hi * hi - lo * lo);
        const double i2 = (hi * hi * hi - lo * lo * lo) / 3.0;
        CellAggregates& cell = s.cells[e.idx];
        const double y3 = py3[e.idx];
        const double hsq = e.b + dual.psi[e.idx];  // 0.5*|xh - yh|^2
        cell.mass += w * len;
        cell.sx1 += w * len * quad.x1[c];
        cell.sx2 += w * len * quad.x2[c];
        cell.m1 += w * i1;
        cell.m2 += w * i2;
        cell.horiz += w * len * hsq;
        cell.cost += w * (len * hsq - y3 * i1);
        s.dual_integral += w * (len * e.b - y3 * i1);

        if (req.hessian && p + 1 < s.stack.size()) {
          const double cross = s.stack[p + 1].start;
          if (cross > 0.0 && cross < H) {
            const int a = e.idx;
            const int bidx = s.stack[p + 1].idx;
            const double dslope = e.slope - s.stack[p + 1].slope;  // > 0
            const double cpl = w / dslope;
            s.hessian[a * n + a] += cpl;
            s.hessian[bidx * n + bidx] += cpl;
            s.hessian[a * n + bidx] -= cpl;
            s.hessian[bidx * n + a] -= cpl;
          }
        }

        if (req.columns)
          out.tess.columns[c].push_back({e.idx, lo, hi});
      }
    }
  };

  parallel_blocks(n_blocks, process_block);

  // Deterministic combine in block order.
  for (const BlockScratch& s : blocks) {
    if (s.cells.empty()) continue;
    for (std::size_t i = 0; i < n; ++i) {
      CellAggregates& d = out.tess.cells[i];
      const CellAggregates& c = s.cells[i];
      d.mass += c.mass;
      d.sx1 += c.sx1;
      d.sx2 += c.sx2;
      d.m1 += c.m1;
      d.m2 += c.m2;
      d.horiz += c.horiz;
      d.cost += c.cost;
    }
    if (req.hessian)
      for (std::size_t k = 0; k < n * n; ++k) out.hessian[k] += s.hessian[k];
    out.tess.source_volume += s.source_volume;
    out.tess.dual_integral += s.dual_integral;
  }
  return out;
}

LaguerreTessellation build_tessellation(const SurfaceProfile& profile,
                                        const ColumnQuadrature& quad,
                                        const GeostrophicMeasure& nu,
                                        const DualState& dual) {
  TessellationRequest req;
  req.columns = true;
  return build_tessellation_ex(profile, quad, nu, dual, req).tess;
}

std::vector<double> cell_masses(const LaguerreTessellation& tess) {
  return tess.masses();
}

double transport_cost(const LaguerreTessellation& tess) {
  double c = 0.0;
  for (const auto& cell : tess.cells) c += cell.cost;
  return c;
}

double mass_residual_of(const LaguerreTessellation& tess,
                        const GeostrophicMeasure& nu) {
  double r = 0.0;
  for (std::size_t i = 0; i < tess.cells.size(); ++i)
    r = std::fmax(r, std::abs(tess.cells[i].mass - nu.weights[i]));
  return r;
}

double dual_functional(const SurfaceProfile& profile,
                       const ColumnQuadrature& quad,
                       const GeostrophicMeasure& nu, const DualState& dual) {
  TessellationRequest req;  // aggregates only
  const auto build = build_tessellation_ex(profile, quad, nu, dual, req);
  double v = build.tess.dual_integral;
  for (std::size_t i = 0; i < nu.size(); ++i)
    v += dual.psi[i] * nu.weights[i];
  return v;
}

namespace {

// Cholesky solve of (A + ridge I) x = rhs for symmetric positive
// semi-definite A, in place. Returns false if a pivot fails.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& x,
                    std::size_t n, double ridge) {
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += ridge;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / l;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {  // forward
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * x[k];
    x[i] = v / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {  // backward
    double v = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= a[k * n + ii] * x[k];
    x[ii] = v / a[ii * n + ii];
  }
  return true;
}

double mass_residual(const std::vector<double>& m,
                     const GeostrophicMeasure& nu) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    r = std::fmax(r, std::abs(m[i] - nu.weights[i]));
  return r;
}

// Raises psi for empty cells until every line touches its envelope: the
// Newton gradient carries no information for a cell of zero mass.
bool activate_empty_cells(const SurfaceProfile& profile,
                          const ColumnQuadrature& quad,
                          const GeostrophicMeasure& nu, DualState& psi) {
  const std::size_t n = nu.size();
  for (int round = 0; round < static_cast<int>(n) * 4 + 8; ++round) {
    TessellationRequest req;
    req.columns = true;
    const auto build = build_tessellation_ex(profile, quad, nu, psi, req);
    int worst = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (!(build.tess.cells[i].mass > 0.0)) {
        worst = static_cast<int>(i);
        break;
      }
    if (worst < 0) return true;

    // Smallest gap between the idle line and the envelope over all column
    // breakpoints; raising psi by slightly more than the gap activates it.
    double gap = std::numeric_limits<double>::infinity();
    const Vec3 yw = nu.points[worst];
    for (std::size_t c = 0; c < quad.size(); ++c) {
      const auto& pieces = build.tess.columns[c];
      if (pieces.empty()) continue;
      const double dx = quad.x1[c] - yw.x;
      const double dy = quad.x2[c] - yw.y;
      const double bw = 0.5 * (dx * dx + dy * dy) - psi.psi[worst];
      for (const auto& piece : pieces) {
        const Vec3 yp = nu.points[piece.particle];
        const double bp = cost_e({quad.x1[c], quad.x2[c], 0.0}, yp) -
                          psi.psi[piece.particle];
        for (double x3 : {piece.lo, piece.hi}) {
          const double fw = bw - yw.z * x3;
          const double fp = bp - yp.z * x3;
          gap = std::fmin(gap, fw - fp);
        }
      }
    }
    if (!std::isfinite(gap)) return false;
    psi.psi[worst] += gap + 1e-3 * (std::abs(gap) + 1e-9);
  }
  return false;
}

}  // namespace

DualState solve_dual(const SurfaceProfile& profile,
                     const ColumnQuadrature& quad,
                     const GeostrophicMeasure& nu, const DualState& psi0,
                     const DualSolveOptions& opts, DualSolveReport* report) {
  nu.validate();
  const std::size_t n = nu.size();
  DualState psi = psi0;
  if (psi.psi.size() != n)
    throw SolverError("initial dual state size does not match the measure");

  TessellationRequest light;  // masses and dual value only
  TessellationRequest full;
  full.hessian = true;

  auto light_build = [&](const DualState& p) {
    return build_tessellation_ex(profile, quad, nu, p, light);
  };

  {
    const auto b0 = light_build(psi);
    if (!(b0.tess.source_volume > 0.0)) throw DegenerateSourceError();
    if (b0.tess.min_mass() <= 0.0) {
      if (!activate_empty_cells(profile, quad, nu, psi))
        throw DualNoConvergence(psi, mass_residual(b0.tess.masses(), nu), 0);
    }
  }

  const double min_weight =
      *std::min_element(nu.weights.begin(), nu.weights.end());
  const double floor = opts.eps_floor * min_weight;

  double best_resid = std::numeric_limits<double>::infinity();
  DualState best = psi;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    auto build = build_tessellation_ex(profile, quad, nu, psi, full);
    const std::vector<double> m = build.tess.masses();
    const double resid = mass_residual(m, nu);
    double value = build.tess.dual_integral;
    for (std::size_t i = 0; i < n; ++i) value += psi.psi[i] * nu.weights[i];

    if (resid < best_resid) {
      best_resid = resid;
      best = psi;
    }
    if (resid <= opts.tol_mass) {
      psi.gauge();
      if (report) {
        report->iterations = iter;
        report->mass_residual = resid;
      }
      return psi;
    }

    // Backtracking acceptance: keep every cell above the mass floor and do
    // not lose dual value.
    const double cand_floor = std::fmin(floor, 0.5 * build.tess.min_mass());
    auto try_direction = [&](const std::vector<double>& delta, double t0) {
      double t = t0;
      for (int halving = 0; halving < 30; ++halving) {
        DualState cand = psi;
        for (std::size_t i = 0; i < n; ++i) cand.psi[i] += t * delta[i];
        const auto cb = light_build(cand);
        double cand_value = cb.tess.dual_integral;
        for (std::size_t i = 0; i < n; ++i)
          cand_value += cand.psi[i] * nu.weights[i];
        if (cb.tess.min_mass() >= cand_floor &&
            cand_value >= value - 1e-13 * (1.0 + std::abs(value))) {
          psi = cand;
          return true;
        }
        t *= 0.5;
      }
      return false;
    };

    // Newton direction with the gauge pinned at index 0; near-parallel
    // slopes make the Hessian ill conditioned, so escalate the ridge until
    // a step is accepted and fall back to plain ascent as the last resort.
    bool accepted = false;
    if (n > 1) {
      const std::size_t r = n - 1;
      std::vector<double> a0(r * r);
      std::vector<double> rhs(r);
      for (std::size_t i = 0; i < r; ++i) {
        rhs[i] = nu.weights[i + 1] - m[i + 1];
        for (std::size_t j = 0; j < r; ++j)
          a0[i * r + j] = build.hessian[(i + 1) * n + (j + 1)];
      }
      double dmax = 0.0;
      for (std::size_t i = 0; i < r; ++i)
        dmax = std::fmax(dmax, a0[i * r + i]);
      for (double ridge : {1e-12, 1e-8, 1e-4, 1e-2}) {
        std::vector<double> a = a0;
        std::vector<double> sol = rhs;
        if (!cholesky_solve(a, sol, r, ridge * (1.0 + dmax))) continue;
        std::vector<double> delta(n, 0.0);
        for (std::size_t i = 0; i < r; ++i) delta[i + 1] = sol[i];
        if (try_direction(delta, 1.0)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        std::vector<double> grad(n);
        for (std::size_t i = 0; i < n; ++i)
          grad[i] = nu.weights[i] - m[i];
        accepted = try_direction(grad, 1.0 / (1.0 + dmax));
      }
    }
    if (!accepted)
      throw DualNoConvergence(best, best_resid, iter + 1);
  }
  throw DualNoConvergence(best, best_resid, opts.max_iter);
}

PotentialEvaluator::PotentialEvaluator(const GeostrophicMeasure& nu,
                                       const DualState& dual, double delta) {
  const std::size_t n = nu.size();
  y1.resize(n);
  y2.resize(n);
  y3.resize(n);
  kappa.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    y1[i] = nu.points[i].x;
    y2[i] = nu.points[i].y;
    y3[i] = nu.points[i].z;
    kappa[i] =
        dual.psi[i] - 0.5 * (y1[i] * y1[i] + y2[i] * y2[i]) + delta;
  }
}

double PotentialEvaluator::value(const Vec3& x) const {
  return kernels::argmax_affine(y1.data(), y2.data(), y3.data(), kappa.data(),
                                size(), x.x, x.y, x.z)
      .value;
}

int PotentialEvaluator::argmax(const Vec3& x) const {
  return static_cast<int>(kernels::argmax_affine(y1.data(), y2.data(),
                                                 y3.data(), kappa.data(),
                                                 size(), x.x, x.y, x.z)
                              .index);
}

Vec3 PotentialEvaluator::grad(const Vec3& x) const {
  const int i = argmax(x);
  return {y1[i], y2[i], y3[i]};
}

std::vector<double> legendre_conjugate(const GeostrophicMeasure& nu,
                                       const DualState& dual) {
  std::vector<double> out(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec3& y = nu.points[i];
    out[i] = 0.5 * (y.x * y.x + y.y * y.y) - dual.psi[i];
  }
  return out;
}

}  // namespace sgfs
