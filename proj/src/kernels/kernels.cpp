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
#include "sgfs/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

namespace sgfs::kernels {

Argmax argmax_affine_scalar(const double* y1, const double* y2,
                            const double* y3, const double* kappa,
                            std::size_t n, double x1, double x2, double x3) {
  Argmax best{-std::numeric_limits<double>::infinity(), -1};
  for (std::size_t i = 0; i < n; ++i) {
    const double v = ((x1 * y1[i] + x2 * y2[i]) + x3 * y3[i]) + kappa[i];
    if (v > best.value) {
      best.value = v;
      best.index = static_cast<std::int64_t>(i);
    }
  }
  return best;
}

void column_intercepts_scalar(const double* y1, const double* y2,
                              const double* psi, std::size_t n, double x1,
                              double x2, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x1 - y1[i];
    const double dy = x2 - y2[i];
    out[i] = 0.5 * (dx * dx + dy * dy) - psi[i];
  }
}

bool avx2_available() {
#if defined(SGFS_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  Backend b = avx2_available() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("SGFS_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) b = Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) b = Backend::avx2;
  }
  return b;
}

Backend g_backend = initial_backend();

}  // namespace

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  g_backend = b;
}

Argmax argmax_affine(const double* y1, const double* y2, const double* y3,
                     const double* kappa, std::size_t n, double x1, double x2,
                     double x3) {
#if defined(SGFS_HAVE_AVX2)
  if (g_backend == Backend::avx2)
    return argmax_affine_avx2(y1, y2, y3, kappa, n, x1, x2, x3);
#endif
  return argmax_affine_scalar(y1, y2, y3, kappa, n, x1, x2, x3);
}

void column_intercepts(const double* y1, const double* y2, const double* psi,
                       std::size_t n, double x1, double x2, double* out) {
#if defined(SGFS_HAVE_AVX2)
  if (g_backend == Backend::avx2) {
    column_intercepts_avx2(y1, y2, psi, n, x1, x2, out);
    return;
  }
#endif
  column_intercepts_scalar(y1, y2, psi, n, x1, x2, out);
}

}  // namespace sgfs::kernels
