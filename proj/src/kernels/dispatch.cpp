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

#include <cassert>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace spanforge::kernels {

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::kScalar,           scalar::dot,     scalar::weighted_sq_norm,
      scalar::axpy,           scalar::triple_accumulate,
      scalar::max_abs,        scalar::bit_and, scalar::bit_or,
      scalar::bit_xor,        scalar::bit_andnot,
  };
  return table;
}

const KernelTable* avx2_table() {
#if SPANFORGE_HAVE_X86
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  if (!supported) return nullptr;
  static const KernelTable table{
      Isa::kAvx2,           avx2::dot,     avx2::weighted_sq_norm,
      avx2::axpy,           avx2::triple_accumulate,
      avx2::max_abs,        avx2::bit_and, avx2::bit_or,
      avx2::bit_xor,        avx2::bit_andnot,
  };
  return &table;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* env = std::getenv("SPANFORGE_ISA");
    if (env != nullptr && std::string_view(env) == "scalar")
      return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double weighted_sq_norm(std::span<const double> v, std::span<const double> w) {
  assert(v.size() == w.size());
  return active().weighted_sq_norm(v.data(), w.data(), v.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

double max_abs(std::span<const double> x) {
  return active().max_abs(x.data(), x.size());
}

}  // namespace spanforge::kernels
