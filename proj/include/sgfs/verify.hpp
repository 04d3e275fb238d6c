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

#include "sgfs/config.hpp"

namespace sgfs {

struct ProbeResult {
  std::string name;
  bool pass = false;
  nlohmann::ordered_json report;
};

// Runs the enabled probes against a stored state (profile + dual weights,
// tessellation rebuilt by the caller).
std::vector<ProbeResult> run_probes(const RunConfig& cfg,
                                    const SurfaceProfile& profile,
                                    const GeostrophicMeasure& nu,
                                    const DualState& dual,
                                    const LaguerreTessellation& tess);

}  // namespace sgfs
