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
#include <span>
#include <string_view>

/// Data-parallel inner loops used by the solvers and exhaustive sweeps.
///
/// Every kernel has a scalar reference implementation and, on x86-64, an
/// AVX2/FMA variant. The variant is chosen once at first use from CPUID;
/// setting SPANFORGE_ISA=scalar in the environment pins the reference path.
/// Bitwise kernels agree exactly across variants. Floating-point reductions
/// agree to rounding (the AVX2 variants reassociate sums and fuse multiplies).
namespace spanforge::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // Floating point.
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * v[i]^2
  double (*weighted_sq_norm)(const double* v, const double* w, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // acc[i] += c[i] * a[i] * b[i]
  void (*triple_accumulate)(const double* c, const double* a, const double* b,
                            double* acc, std::size_t n);
  // returns max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);

  // Word-parallel bit operations over packed truth tables.
  void (*bit_and)(const std::uint64_t* a, const std::uint64_t* b,
                  std::uint64_t* out, std::size_t words);
  void (*bit_or)(const std::uint64_t* a, const std::uint64_t* b,
                 std::uint64_t* out, std::size_t words);
  void (*bit_xor)(const std::uint64_t* a, const std::uint64_t* b,
                  std::uint64_t* out, std::size_t words);
  // out = a & ~b
  void (*bit_andnot)(const std::uint64_t* a, const std::uint64_t* b,
                     std::uint64_t* out, std::size_t words);
};

const KernelTable& scalar_table();

// nullptr when the build target or the running CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// The table selected for this process.
const KernelTable& active();

// Span conveniences over active(). Lengths must match.
double dot(std::span<const double> a, std::span<const double> b);
double weighted_sq_norm(std::span<const double> v, std::span<const double> w);
void axpy(double a, std::span<const double> x, std::span<double> y);
double max_abs(std::span<const double> x);

}  // namespace spanforge::kernels
