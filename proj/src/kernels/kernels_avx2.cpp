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
#if defined(SGFS_HAVE_AVX2)

#include <immintrin.h>

#include <cstdint>
#include <limits>

#include "sgfs/kernels.hpp"

// Plain mul/add only: fused multiply-add would round differently from the
// scalar reference (the build also disables fp contraction).
namespace sgfs::kernels {

Argmax argmax_affine_avx2(const double* y1, const double* y2, const double* y3,
                          const double* kappa, std::size_t n, double x1,
                          double x2, double x3) {
  Argmax best{-std::numeric_limits<double>::infinity(), -1};
  std::size_t i = 0;

  if (n >= 4) {
    const __m256d vx1 = _mm256_set1_pd(x1);
    const __m256d vx2 = _mm256_set1_pd(x2);
    const __m256d vx3 = _mm256_set1_pd(x3);
    __m256d vbest = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    __m256i ibest = _mm256_set1_epi64x(-1);
    __m256i icur = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i istep = _mm256_set1_epi64x(4);

    for (; i + 4 <= n; i += 4) {
      const __m256d a = _mm256_mul_pd(vx1, _mm256_loadu_pd(y1 + i));
      const __m256d b = _mm256_mul_pd(vx2, _mm256_loadu_pd(y2 + i));
      const __m256d c = _mm256_mul_pd(vx3, _mm256_loadu_pd(y3 + i));
      const __m256d v = _mm256_add_pd(
          _mm256_add_pd(_mm256_add_pd(a, b), c), _mm256_loadu_pd(kappa + i));
      const __m256d gt = _mm256_cmp_pd(v, vbest, _CMP_GT_OQ);
      vbest = _mm256_blendv_pd(vbest, v, gt);
      ibest = _mm256_blendv_epi8(ibest, icur, _mm256_castpd_si256(gt));
      icur = _mm256_add_epi64(icur, istep);
    }

    alignas(32) double lane_v[4];
    alignas(32) std::int64_t lane_i[4];
    _mm256_store_pd(lane_v, vbest);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), ibest);
    for (int l = 0; l < 4; ++l) {
      if (lane_v[l] > best.value ||
          (lane_v[l] == best.value && lane_i[l] >= 0 &&
           (best.index < 0 || lane_i[l] < best.index))) {
        best.value = lane_v[l];
        best.index = lane_i[l];
      }
    }
  }

  for (; i < n; ++i) {
    const double v = ((x1 * y1[i] + x2 * y2[i]) + x3 * y3[i]) + kappa[i];
    if (v > best.value) {
      best.value = v;
      best.index = static_cast<std::int64_t>(i);
    }
  }
  return best;
}

void column_intercepts_avx2(const double* y1, const double* y2,
                            const double* psi, std::size_t n, double x1,
                            double x2, double* out) {
  const __m256d vx1 = _mm256_set1_pd(x1);
  const __m256d vx2 = _mm256_set1_pd(x2);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(vx1, _mm256_loadu_pd(y1 + i));
    const __m256d dy = _mm256_sub_pd(vx2, _mm256_loadu_pd(y2 + i));
    const __m256d q =
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_mul_pd(half, q),
                                            _mm256_loadu_pd(psi + i)));
  }
  for (; i < n; ++i) {
    const double dx = x1 - y1[i];
    const double dy = x2 - y2[i];
    out[i] = 0.5 * (dx * dx + dy * dy) - psi[i];
  }
}

}  // namespace sgfs::kernels

#endif  // SGFS_HAVE_AVX2
