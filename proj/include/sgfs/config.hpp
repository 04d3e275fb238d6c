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
#include "sgfs/dynamics.hpp"
#include "sgfs/freesurface.hpp"
#include "sgfs/measures.hpp"
#include "sgfs/transport.hpp"

namespace sgfs {

// One JSON document fully determines a run. Parsing is strict: any unknown
// key anywhere fails before computation starts.
struct RunConfig {
  BaseGrid base;
  DensitySpec density;
  int n_per_axis = 2;

  double dt = 0.01;
  int n_steps = 100;
  TimeScheme scheme = TimeScheme::heun;

  SurfaceSolveOptions surface;  // also carries the dual-solver settings

  std::string out_dir = "out";
  int checkpoint_every = 10;

  std::vector<std::string> probes = {"mass_balance",   "surface_pressure",
                                     "monotonicity",   "second_variation",
                                     "h1_growth",      "energy_identity"};
  int n_pairs = 10000;
  double smoothing = 0.0;  // 0 picks twice the column width

  double resolved_smoothing() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);

// Fully resolved round-trippable form (defaults filled in), for meta.json.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace sgfs
