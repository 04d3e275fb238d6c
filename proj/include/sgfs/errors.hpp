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

#include <stdexcept>
#include <string>

namespace sgfs {

// Configuration problems (bad keys, bad values). CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical solver failures. CLI exit code 3.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroVolumeError : SolverError {
  ZeroVolumeError() : SolverError("profile has zero volume") {}
};

struct OutOfBaseError : SolverError {
  OutOfBaseError(double x1, double x2)
      : SolverError("point (" + std::to_string(x1) + ", " +
                    std::to_string(x2) + ") lies outside the closed base") {}
};

struct EmptyMeasureError : SolverError {
  EmptyMeasureError() : SolverError("all particle weights vanished") {}
};

struct TooLargeError : SolverError {
  explicit TooLargeError(std::size_t n)
      : SolverError("instance too large for the brute-force oracle (n = " +
                    std::to_string(n) + ")") {}
};

struct DegenerateSourceError : SolverError {
  DegenerateSourceError() : SolverError("source volume is not positive") {}
};

struct NoBracketError : SolverError {
  NoBracketError(int i, int j, double z_max)
      : SolverError("no surface root below z_max = " + std::to_string(z_max) +
                    " at node (" + std::to_string(i) + ", " +
                    std::to_string(j) + ")") {}
};

struct GaugeFailureError : SolverError {
  explicit GaugeFailureError(const std::string& what) : SolverError(what) {}
};

struct EmptyCellError : SolverError {
  explicit EmptyCellError(int particle)
      : SolverError("cell of particle " + std::to_string(particle) +
                    " has vanishing mass") {}
};

}  // namespace sgfs
