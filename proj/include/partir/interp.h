/* Copyright 2026 The partirc Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PARTIR_INTERP_H_
#define PARTIR_INTERP_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "partir/ir.h"
#include "partir/spmd.h"

namespace partir {

// Row-major f32 payload. The reference executor trades speed for an
// unambiguous evaluation order: every reduction accumulates in f32 in
// ascending index order, which is what makes single-device and simulated
// multi-device runs bit-comparable on order-preserving paths.
struct DenseTensor {
  std::vector<int64_t> shape;
  std::vector<float> data;

  int64_t num_elements() const {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
  }

  static DenseTensor zeros(const std::vector<int64_t>& shape);
  static DenseTensor splat(const std::vector<int64_t>& shape, float value);
  // Uniform values in [-1, 1), deterministic in the seed.
  static DenseTensor random(const std::vector<int64_t>& shape, uint64_t seed);

  bool operator==(const DenseTensor&) const = default;
};

// Flat binary tensor format: u32 rank, u32 dims, f32 payload, little-endian.
void write_tensor_file(const std::string& path, const DenseTensor& t);
DenseTensor read_tensor_file(const std::string& path);

using Env = std::map<std::string, DenseTensor>;

// Deterministic single-device evaluation of a base or tiled program.
// Tile loops run by literal iteration and concatenation; sum loops by
// ascending-index summation. Returns the final environment so tests can
// inspect intermediates; the result value is env.at(p.result_id).
Env eval_base_env(const Program& p, const std::vector<DenseTensor>& inputs);
DenseTensor eval_base(const Program& p, const std::vector<DenseTensor>& inputs);

// Simulates every device in lockstep program order. Inputs are global
// tensors, sharded per the argument specs before execution; the sharded
// result is reassembled into a global tensor. Replica divergence (devices
// that should hold identical data but do not) throws InternalError.
DenseTensor eval_spmd(const SpmdProgram& sp,
                      const std::vector<DenseTensor>& inputs);

struct EquivalenceReport {
  int trials = 0;
  double max_abs_diff = 0.;
  bool order_preserving = false;  // lowered program contains no all_reduce
  bool exact_pass = false;        // bit equality over all trials
  bool tol_pass = false;          // |a-b| <= 1e-5*max(|a|,|b|) + 1e-6
  bool pass = false;              // exact on order-preserving paths, tol else
  std::string first_divergence;   // empty when exact
};

// Runs `trials` random-input comparisons of sp against the base program.
EquivalenceReport check_equivalence(const Program& p, const SpmdProgram& sp,
                                    int trials, uint64_t seed);

}  // namespace partir

#endif  // PARTIR_INTERP_H_
