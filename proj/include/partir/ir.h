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

#ifndef PARTIR_IR_H_
#define PARTIR_IR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partir/mesh.h"
#include "partir/tensor.h"

namespace partir {

enum class OpKind {
  // Base tensor dialect.
  kConstant,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kExp,
  kTanh,
  kRsqrt,
  kMaximum,
  kDot,
  kReduceSum,
  kReduceMax,
  kTranspose,
  kReshape,
  kBroadcastInDim,
  kSlice,
  kConcatenate,
  // Tiling dialect.
  kTile,
  kSum,
  kAtomic,
  kSliceAxis,
  // SPMD dialect; only appears in lowered programs.
  kAllReduce,
  kAllGather,
  kSliceByCoord,
};

inline constexpr int kNumBaseKinds = 18;

bool is_base_kind(OpKind kind);
bool is_pointwise_binary(OpKind kind);
bool is_pointwise_unary(OpKind kind);
bool is_loop_kind(OpKind kind);
std::string_view kind_name(OpKind kind);
std::optional<OpKind> kind_from_name(std::string_view name);

// Batch and contracting dimension pairs of a general dot contraction.
struct DotDims {
  std::vector<int> lhs_batch;
  std::vector<int> rhs_batch;
  std::vector<int> lhs_contract;
  std::vector<int> rhs_contract;

  bool operator==(const DotDims&) const = default;
};

// One SSA operation. A deliberately flat struct: attribute fields are only
// meaningful for the kinds that use them, mirroring how instruction classes
// in large tensor compilers carry a superset of attributes.
struct Operation {
  std::string id;  // result value name, without the leading '%'
  OpKind kind = OpKind::kAdd;
  std::vector<std::string> operands;
  TensorType result_type;
  std::string scope;  // optional hierarchical tag, e.g. "layer_0/mlp/w1"

  DotDims dot;                // kDot
  std::vector<int> dims;      // reduce dims / transpose perm / broadcast map
  std::vector<int64_t> start;  // kSlice
  std::vector<int64_t> limit;  // kSlice
  int dim = -1;       // concatenate / tile concat dim / slice_axis /
                      // all_gather / slice_by_coord
  double value = 0.;  // kConstant splat value
  std::string axis;   // tile / sum / collectives
  std::string index_var;        // loop binder; slice_axis index reference
  std::vector<Operation> body;  // tile / sum / atomic region
  std::string yield_id;         // value yielded by the region

  bool has_region() const {
    return kind == OpKind::kTile || kind == OpKind::kSum ||
           kind == OpKind::kAtomic;
  }

  bool operator==(const Operation&) const = default;
};

struct Argument {
  std::string id;
  TensorType type;
  std::string scope;

  bool operator==(const Argument&) const = default;
};

// An SSA-form tensor function: typed arguments, an op list (possibly with
// nested tile/sum/atomic regions), and a single returned value.
struct Program {
  std::string name;
  Mesh mesh;
  std::vector<Argument> args;
  std::vector<Operation> ops;
  std::string result_id;

  const Argument* find_arg(std::string_view id) const;

  bool operator==(const Program&) const = default;
};

// Depth-first walk over every operation, including region bodies.
// The visitor receives the op and its region nesting depth (0 = top level).
void walk(const Program& p,
          const std::function<void(const Operation&, int depth)>& visit);
void walk(const std::vector<Operation>& ops,
          const std::function<void(const Operation&, int depth)>& visit,
          int depth = 0);

// Number of uses of `id` as an operand (slice_axis operands and loop yields
// included; index variables excluded), across all regions.
int count_uses(const Program& p, std::string_view id);

// Hands out fresh value names "tN" and loop index names "iN". Seeded past
// any existing id with the same stem so rewrites never collide; one instance
// is shared across all rewrites of a given program copy.
class NameGen {
 public:
  explicit NameGen(const Program& p);
  std::string value() { return "t" + std::to_string(next_value_++); }
  std::string index() { return "i" + std::to_string(next_index_++); }

 private:
  int next_value_ = 0;
  int next_index_ = 0;
};

}  // namespace partir

#endif  // PARTIR_IR_H_
