// Copyright 2026 The Spanforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kernels_impl.hpp"

#if SPANFORGE_HAVE_X86

#include <immintrin.h>

#include <cmath>

#define SF_AVX2 __attribute__((target("avx2,fma")))

namespace spanforge::kernels::avx2 {
namespace {

SF_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

SF_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

SF_AVX2 double weighted_sq_norm(const double* v, const double* w,
                                std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(v + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), x), x, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * v[i] * v[i];
  return s;
}

SF_AVX2 void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

SF_AVX2 void triple_accumulate(const double* c, const double* a,
                               const double* b, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ca = _mm256_mul_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(a + i));
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(ca, _mm256_loadu_pd(b + i),
                                              _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += c[i] * a[i] * b[i];
}

SF_AVX2 double max_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

#define SF_BITOP(name, expr)                                                  \
  SF_AVX2 void name(const std::uint64_t* a, const std::uint64_t* b,           \
                    std::uint64_t* out, std::size_t words) {                  \
    std::size_t i = 0;                                                        \
    for (; i + 4 <= words; i += 4) {                                          \
      __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)); \
      __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)); \
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), expr);         \
    }                                                                         \
    for (; i < words; ++i) scalar::name(a + i, b + i, out + i, 1);            \
  }

SF_BITOP(bit_and, _mm256_and_si256(va, vb))
SF_BITOP(bit_or, _mm256_or_si256(va, vb))
SF_BITOP(bit_xor, _mm256_xor_si256(va, vb))
SF_BITOP(bit_andnot, _mm256_andnot_si256(vb, va))

#undef SF_BITOP

}  // namespace spanforge::kernels::avx2

#endif  // SPANFORGE_HAVE_X86
