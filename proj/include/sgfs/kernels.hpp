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
#include <cstdint>

// Data-parallel inner loops over the particle arrays. Every backend performs
// the same elementary operations in the same per-element order, so the scalar
// reference and the AVX2 variant produce bit-identical results; the dispatch
// therefore never affects output. Ties in argmax_affine resolve to the lowest
// index in every backend.
namespace sgfs::kernels {

enum class Backend { scalar, avx2 };

struct Argmax {
  double value;
  std::int64_t index;  // -1 when n == 0
};

// max_i over ((x1*y1[i] + x2*y2[i]) + x3*y3[i]) + kappa[i].
Argmax argmax_affine(const double* y1, const double* y2, const double* y3,
                     const double* kappa, std::size_t n, double x1, double x2,
                     double x3);

// out[i] = 0.5*((x1-y1[i])^2 + (x2-y2[i])^2) - psi[i].
void column_intercepts(const double* y1, const double* y2, const double* psi,
                       std::size_t n, double x1, double x2, double* out);

bool avx2_available();
Backend active_backend();
void set_backend(Backend b);  // falls back to scalar if b is unavailable

// Scalar reference entry points, always available (equivalence tests).
Argmax argmax_affine_scalar(const double* y1, const double* y2,
                            const double* y3, const double* kappa,
                            std::size_t n, double x1, double x2, double x3);
void column_intercepts_scalar(const double* y1, const double* y2,
                              const double* psi, std::size_t n, double x1,
                              double x2, double* out);

#if defined(SGFS_HAVE_AVX2)
Argmax argmax_affine_avx2(const double* y1, const double* y2, const double* y3,
                          const double* kappa, std::size_t n, double x1,
                          double x2, double x3);
void column_intercepts_avx2(const double* y1, const double* y2,
                            const double* psi, std::size_t n, double x1,
                            double x2, double* out);
#endif

}  // namespace sgfs::kernels
