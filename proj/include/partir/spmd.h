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

#ifndef PARTIR_SPMD_H_
#define PARTIR_SPMD_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "partir/ir.h"
#include "partir/mesh.h"

namespace partir {

// A value with a global shape that is nevertheless stored in per-device
// chunks (dim axes) and possibly as unreduced partial sums (pending_sum).
struct DistType {
  TensorType global;
  ShardingSpec spec;

  std::vector<int64_t> local(const Mesh& mesh) const {
    return local_shape(global, spec, mesh);
  }

  bool operator==(const DistType&) const = default;
};

struct SpmdArg {
  std::string id;
  DistType type;
  std::string scope;
};

// Flat per-device program: base ops execute on local shapes; collectives
// (all_reduce, all_gather, slice_by_coord) move data across or along mesh
// axes. No loop ops remain after lowering.
struct SpmdProgram {
  std::string name;
  Mesh mesh;
  std::vector<SpmdArg> args;
  std::vector<Operation> ops;  // result_type fields hold LOCAL shapes
  std::string result_id;
  std::map<std::string, DistType> value_types;  // args and op results

  const DistType& type_of(const std::string& id) const;
};

// Lowers a validated tiled program: tile loops become local computation
// with the loop index bound to the device coordinate of the loop's axis;
// sum loops become local computation plus an all_reduce; slice_axis of a
// replicated value becomes a communication-free slice_by_coord; a sharded
// value consumed where a full value is required gets an all_gather.
SpmdProgram lower_to_spmd(const Program& p);

// Counts and byte totals per collective kind per axis. all_reduce counts
// the operand's global byte size per invocation; all_gather counts the
// gathered-minus-local bytes; slice_by_coord moves no data.
struct CollectiveStats {
  struct PerAxis {
    int64_t count = 0;
    int64_t bytes = 0;
  };
  std::map<std::string, PerAxis> all_reduce;
  std::map<std::string, PerAxis> all_gather;
  std::map<std::string, PerAxis> slice_by_coord;

  int64_t all_reduce_count() const;
  int64_t all_gather_count() const;
  int64_t all_reduce_bytes() const;
  int64_t all_gather_bytes() const;
};

CollectiveStats collective_stats(const SpmdProgram& sp);

// Textual form with distributed types, e.g. `f32[16,64{"shard"}]`.
// One-way: SPMD programs are re-derived from plans, never re-parsed.
std::string print_spmd(const SpmdProgram& sp);
std::string to_string(const DistType& t);

// Human-readable stats table used by the CLI.
std::string format_stats(const CollectiveStats& stats);

}  // namespace partir

#endif  // PARTIR_SPMD_H_
