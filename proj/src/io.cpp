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
#include "sgfs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sgfs::io {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

void write_surface_csv(const std::string& path,
                       const SurfaceProfile& profile) {
  auto out = open_out(path);
  out << "i,j,x1,x2,h\n";
  const BaseGrid& g = profile.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << i << ',' << j << ',' << fmt_g17(g.node_x(i)) << ','
          << fmt_g17(g.node_y(j)) << ',' << fmt_g17(profile.at(i, j)) << '\n';
}

SurfaceProfile read_surface_csv(const std::string& path,
                                const BaseGrid& grid) {
  std::ifstream in(path);
  if (!in) throw SolverError("cannot open surface file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv(line) !=
      std::vector<std::string>{"i", "j", "x1", "x2", "h"})
    throw SolverError("bad surface header in '" + path + "'");
  SurfaceProfile p;
  p.grid = grid;
  p.heights.assign(static_cast<std::size_t>(grid.n_nodes()), 0.0);
  std::vector<bool> seen(p.heights.size(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw SolverError("bad surface row in '" + path + "'");
    const int i = std::stoi(f[0]);
    const int j = std::stoi(f[1]);
    if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny)
      throw SolverError("surface node out of range in '" + path + "'");
    const double x1 = to_double(f[2]);
    const double x2 = to_double(f[3]);
    if (std::abs(x1 - grid.node_x(i)) > 1e-9 ||
        std::abs(x2 - grid.node_y(j)) > 1e-9)
      throw SolverError("surface node coordinates disagree with the grid");
    p.at(i, j) = to_double(f[4]);
    seen[j * grid.nx + i] = true;
  }
  for (bool s : seen)
    if (!s) throw SolverError("surface file misses nodes");
  return p;
}

void write_state_csv(const std::string& path, const GeostrophicMeasure& nu,
                     const DualState& dual,
                     const LaguerreTessellation& tess) {
  auto out = open_out(path);
  out << "id,y1,y2,y3,weight,psi,c1,c2,c3,cell_mass\n";
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec3 c = tess.cells[i].mass > 0.0
                       ? tess.barycenter(i)
                       : Vec3{0.0, 0.0, 0.0};
    out << i << ',' << fmt_g17(nu.points[i].x) << ','
        << fmt_g17(nu.points[i].y) << ',' << fmt_g17(nu.points[i].z) << ','
        << fmt_g17(nu.weights[i]) << ',' << fmt_g17(dual.psi[i]) << ','
        << fmt_g17(c.x) << ',' << fmt_g17(c.y) << ',' << fmt_g17(c.z) << ','
        << fmt_g17(tess.cells[i].mass) << '\n';
  }
}

LoadedState read_state_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SolverError("cannot open state file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) ||
      split_csv(line) != std::vector<std::string>{"id", "y1", "y2", "y3",
                                                  "weight", "psi", "c1", "c2",
                                                  "c3", "cell_mass"})
    throw SolverError("bad state header in '" + path + "'");
  LoadedState s;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 10) throw SolverError("bad state row in '" + path + "'");
    const Vec3 y{to_double(f[1]), to_double(f[2]), to_double(f[3])};
    s.measure.points.push_back(y);
    s.measure.weights.push_back(to_double(f[4]));
    s.dual.psi.push_back(to_double(f[5]));
    s.stored_barycenter.push_back(
        {to_double(f[6]), to_double(f[7]), to_double(f[8])});
    s.stored_cell_mass.push_back(to_double(f[9]));
    if (first) {
      s.measure.support = {y, y};
      first = false;
    } else {
      s.measure.support.expand_to(y);
    }
  }
  if (s.measure.points.empty())
    throw SolverError("state file '" + path + "' has no particles");
  return s;
}

void write_freesurface_log(const std::string& path,
                           const std::vector<OuterIterRow>& history) {
  auto out = open_out(path);
  out << "outer_iter,cost,mass_residual,surface_residual,delta_gauge\n";
  for (const auto& r : history)
    out << r.outer_iter << ',' << fmt_g17(r.cost) << ','
        << fmt_g17(r.mass_residual) << ',' << fmt_g17(r.surface_residual)
        << ',' << fmt_g17(r.delta_gauge) << '\n';
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows) {
  auto out = open_out(path);
  out << "step,t,H,E_bb,mass_residual,surface_residual,min_cell_mass,"
         "max_speed\n";
  for (const auto& r : rows)
    out << r.step << ',' << fmt_g17(r.t) << ',' << fmt_g17(r.hamiltonian)
        << ',' << fmt_g17(r.energy_bb) << ',' << fmt_g17(r.mass_residual)
        << ',' << fmt_g17(r.surface_residual) << ','
        << fmt_g17(r.min_cell_mass) << ',' << fmt_g17(r.max_speed) << '\n';
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace sgfs::io
