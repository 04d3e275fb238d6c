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

#include <string>
#include <vector>

#include <json.hpp>

#include "sgfs/domain.hpp"
#include "sgfs/freesurface.hpp"
#include "sgfs/measures.hpp"
#include "sgfs/transport.hpp"

// Plain-CSV and JSON emitters. All files use LF line endings and decimal
// floats with 17 significant digits, which round-trip doubles exactly; a
// rerun of the same config reproduces every byte.
namespace sgfs::io {

std::string fmt_g17(double v);

void write_surface_csv(const std::string& path, const SurfaceProfile& profile);

// Reads node heights back onto the grid shape given by `grid`; node
// coordinates in the file must match the grid.
SurfaceProfile read_surface_csv(const std::string& path, const BaseGrid& grid);

void write_state_csv(const std::string& path, const GeostrophicMeasure& nu,
                     const DualState& dual, const LaguerreTessellation& tess);

struct LoadedState {
  GeostrophicMeasure measure;
  DualState dual;
  std::vector<double> stored_cell_mass;
  std::vector<Vec3> stored_barycenter;
};

LoadedState read_state_csv(const std::string& path);

void write_freesurface_log(const std::string& path,
                           const std::vector<OuterIterRow>& history);

struct DiagnosticsRow {
  int step;
  double t;
  double hamiltonian;
  double energy_bb;
  double mass_residual;
  double surface_residual;
  double min_cell_mass;
  double max_speed;
};

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows);

void write_json(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace sgfs::io
