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
#include "sgfs/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sgfs {

int worker_count() {
  static const int cached = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SGFS_THREADS")) {
      int cap = std::atoi(env);
      if (cap >= 1 && cap < hw) hw = cap;
      if (cap >= 1 && cap >= hw) hw = cap > 64 ? 64 : cap;
    }
    return hw;
  }();
  return cached;
}

void parallel_blocks(std::size_t n_blocks,
                     const std::function<void(std::size_t)>& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) break;
      fn(b);
    }
  };
  std::vector<std::thread> pool;
  const int spawned = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers) - 1, n_blocks - 1));
  pool.reserve(spawned);
  for (int t = 0; t < spawned; ++t) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
}

}  // namespace sgfs
