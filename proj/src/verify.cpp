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
#include "sgfs/verify.hpp"

#include <cmath>

#include "sgfs/stability.hpp"

namespace sgfs {

namespace {

using nlohmann::ordered_json;

Box3 fluid_box(const SurfaceProfile& profile) {
  const BaseGrid& g = profile.grid;
  double hmax = 0.0;
  for (double h : profile.heights) hmax = std::fmax(hmax, h);
  return {{g.ox, g.oy, 0.0}, {g.ox + g.lx, g.oy + g.ly, std::fmax(hmax, 1e-6)}};
}

}  // namespace

std::vector<ProbeResult> run_probes(const RunConfig& cfg,
                                    const SurfaceProfile& profile,
                                    const GeostrophicMeasure& nu,
                                    const DualState& dual,
                                    const LaguerreTessellation& tess) {
  std::vector<ProbeResult> results;
  const ColumnQuadrature quad = column_quadrature(profile.grid);

  for (const std::string& probe : cfg.probes) {
    ProbeResult r;
    r.name = probe;
    r.report["probe"] = probe;

    if (probe == "mass_balance") {
      const double resid = mass_residual_of(tess, nu);
      r.report["mass_residual"] = resid;
      r.report["tolerance"] = cfg.surface.tol_mass;
      r.pass = resid <= cfg.surface.tol_mass;

    } else if (probe == "surface_pressure") {
      const double delta = recover_delta_gauge(profile, nu, dual);
      const double resid = surface_pressure_residual(profile, nu, dual, delta);
      double ymax2 = 0.0;
      for (const Vec3& y : nu.points) ymax2 = std::fmax(ymax2, norm2(y));
      const double bound = cfg.surface.tol_surface * (1.0 + ymax2);
      r.report["delta_gauge"] = delta;
      r.report["residual"] = resid;
      r.report["tolerance"] = bound;
      r.pass = resid <= bound;

    } else if (probe == "monotonicity") {
      const auto rep =
          check_gradient_monotonicity(profile, nu, dual, cfg.n_pairs);
      r.report["pairs"] = rep.pairs;
      r.report["violations"] = rep.violations;
      r.report["min_dot"] = rep.min_dot;
      r.report["tolerance"] = -1e-10;
      r.pass = rep.violations == 0;

    } else if (probe == "second_variation") {
      const double s0 = cfg.resolved_smoothing();
      const Box3 box = fluid_box(profile);
      bool ok = true;
      ordered_json runs = ordered_json::array();
      for (std::uint64_t seed : {101u, 102u, 103u, 104u}) {
        const TestField f = random_field(seed, box, 2, false);
        const double nrm = field_norm2(profile, quad, f);
        for (double s : {s0, 0.5 * s0}) {
          const double v =
              second_inner_variation(profile, quad, nu, dual, f, f, s);
          const double tol = -1e-6 * nrm;
          runs.push_back({{"seed", seed},
                          {"smoothing", s},
                          {"value", v},
                          {"tolerance", tol}});
          ok = ok && v >= tol;
        }
      }
      r.report["runs"] = runs;
      r.pass = ok;

    } else if (probe == "h1_growth") {
      const auto rep = check_h1_growth(tess, nu);
      double ymax = 0.0;
      for (const Vec3& y : nu.points) ymax = std::fmax(ymax, norm(y));
      const Box3 box = fluid_box(profile);
      const double bound = ymax + norm(box.extent()) + 1.0;
      r.report["c0"] = rep.c0;
      r.report["max_speed"] = rep.max_speed;
      r.report["bound"] = bound;
      r.pass = std::isfinite(rep.c0) && rep.c0 <= bound;

    } else if (probe == "energy_identity") {
      const double resid = energy_identity_residual(tess, nu);
      const double e = energy_bb(tess, nu);
      const double tol = 1e-12 * (1.0 + std::abs(e));
      r.report["energy_bb"] = e;
      r.report["transport_cost"] = transport_cost(tess);
      r.report["residual"] = resid;
      r.report["tolerance"] = tol;
      r.pass = std::abs(resid) <= tol;

    } else if (probe == "h2_stability") {
      const TestField f = random_field(777, nu.support, 2, false);
      const auto rows = check_h2_stability(nu, profile.grid, cfg.surface, f, 6);
      ordered_json jrows = ordered_json::array();
      bool ok = true;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        jrows.push_back({{"s", rows[k].s},
                         {"velocity_delta", rows[k].velocity_delta},
                         {"surface_delta", rows[k].surface_delta}});
        if (k > 0) {
          ok = ok && rows[k].velocity_delta <=
                         1.5 * rows[k - 1].velocity_delta + 1e-12;
          ok = ok &&
               rows[k].surface_delta <= 1.5 * rows[k - 1].surface_delta + 1e-12;
        }
      }
      r.report["rows"] = jrows;
      r.pass = ok;

    } else if (probe == "subdifferential") {
      if (nu.size() > 10) {
        r.report["error"] = "instance too large for the brute-force audit";
        r.pass = false;
      } else {
        const TestField f = random_field(555, nu.support, 2, false);
        const GeostrophicMeasure moved = perturb(nu, f, 0.05);
        const auto rep = check_subdifferential_inequality(nu, moved,
                                                          profile.grid,
                                                          cfg.surface);
        r.report["lhs"] = rep.lhs;
        r.report["rhs"] = rep.rhs;
        r.report["slack"] = rep.slack;
        r.report["w2sq"] = rep.w2sq;
        r.report["tolerance"] = -1e-8;
        r.pass = rep.slack >= -1e-8;
      }

    } else {
      r.report["error"] = "unknown probe";
      r.pass = false;
    }

    r.report["pass"] = r.pass;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace sgfs
