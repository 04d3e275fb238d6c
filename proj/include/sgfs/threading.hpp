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

#include <cstddef>
#include <functional>

namespace sgfs {

// Worker count: min(SGFS_THREADS, hardware threads), at least 1.
int worker_count();

// Runs fn(block) for block = 0..n_blocks-1, possibly on several threads.
// The block partition is fixed and independent of the worker count, so any
// per-block partial results combined afterwards in block order reproduce
// the serial result bit for bit.
void parallel_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn);

// Fixed block count used by the column/node loops.
inline constexpr std::size_t kReductionBlocks = 64;

}  // namespace sgfs
