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

#include <json.hpp>

#include "sgfs/config.hpp"

namespace sgfs {

struct OracleOutcome {
  bool pass = false;
  nlohmann::ordered_json report;
};

// Canned solver-versus-brute-force comparisons on the configured base grid:
// a 3-particle transport instance against the dense voxel oracle, a
// 1-particle free-surface solve against the exhaustive lattice search, and
// degenerate Wasserstein distances.
OracleOutcome run_oracle_suite(const RunConfig& cfg);

}  // namespace sgfs
