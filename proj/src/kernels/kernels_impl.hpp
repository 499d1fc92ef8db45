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

#pragma once

#include <cstddef>
#include <cstdint>

#include "spanforge/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SPANFORGE_HAVE_X86 1
#else
#define SPANFORGE_HAVE_X86 0
#endif

namespace spanforge::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_sq_norm(const double* v, const double* w, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void triple_accumulate(const double* c, const double* a, const double* b,
                       double* acc, std::size_t n);
double max_abs(const double* x, std::size_t n);
void bit_and(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
             std::size_t words);
void bit_or(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
            std::size_t words);
void bit_xor(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
             std::size_t words);
void bit_andnot(const std::uint64_t* a, const std::uint64_t* b,
                std::uint64_t* out, std::size_t words);
}  // namespace scalar

#if SPANFORGE_HAVE_X86
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_sq_norm(const double* v, const double* w, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void triple_accumulate(const double* c, const double* a, const double* b,
                       double* acc, std::size_t n);
double max_abs(const double* x, std::size_t n);
void bit_and(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
             std::size_t words);
void bit_or(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
            std::size_t words);
void bit_xor(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out,
             std::size_t words);
void bit_andnot(const std::uint64_t* a, const std::uint64_t* b,
                std::uint64_t* out, std::size_t words);
}  // namespace avx2
#endif

}  // namespace spanforge::kernels
