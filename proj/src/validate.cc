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

#include "partir/validate.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "partir/error.h"

namespace partir {
namespace {

[[noreturn]] void fail(const Operation& op, const std::string& msg) {
  throw ValidationError("op %" + op.id + " (" + std::string(kind_name(op.kind)) +
                        "): " + msg);
}

void check_arity(const Operation& op, size_t expected) {
  if (op.operands.size() != expected)
    fail(op, "expects " + std::to_string(expected) + " operand(s), got " +
             std::to_string(op.operands.size()));
}

void check_dim_in_rank(const Operation& op, int dim, int rank,
                       const std::string& what) {
  if (dim < 0 || dim >= rank)
    fail(op, what + " " + std::to_string(dim) + " out of range for rank " +
             std::to_string(rank));
}

TensorType infer_dot(const Operation& op, const TensorType& lhs,
                     const TensorType& rhs) {
  const DotDims& d = op.dot;
  if (d.lhs_batch.size() != d.rhs_batch.size())
    fail(op, "batch dimension lists differ in length");
  if (d.lhs_contract.size() != d.rhs_contract.size())
    fail(op, "contracting dimension lists differ in length");
  std::set<int> lhs_used, rhs_used;
  for (size_t i = 0; i < d.lhs_batch.size(); ++i) {
    check_dim_in_rank(op, d.lhs_batch[i], lhs.rank(), "lhs batch dim");
    check_dim_in_rank(op, d.rhs_batch[i], rhs.rank(), "rhs batch dim");
    if (lhs.shape[d.lhs_batch[i]] != rhs.shape[d.rhs_batch[i]])
      fail(op, "batch dimension size mismatch");
    if (!lhs_used.insert(d.lhs_batch[i]).second ||
        !rhs_used.insert(d.rhs_batch[i]).second)
      fail(op, "repeated batch dimension");
  }
  for (size_t i = 0; i < d.lhs_contract.size(); ++i) {
    check_dim_in_rank(op, d.lhs_contract[i], lhs.rank(), "lhs contracting dim");
    check_dim_in_rank(op, d.rhs_contract[i], rhs.rank(), "rhs contracting dim");
    if (lhs.shape[d.lhs_contract[i]] != rhs.shape[d.rhs_contract[i]])
      fail(op, "contracting dimension size mismatch: lhs " +
                   std::to_string(lhs.shape[d.lhs_contract[i]]) + " vs rhs " +
                   std::to_string(rhs.shape[d.rhs_contract[i]]));
    if (!lhs_used.insert(d.lhs_contract[i]).second ||
        !rhs_used.insert(d.rhs_contract[i]).second)
      fail(op, "dimension both batch and contracting");
  }
  TensorType out;
  for (int b : d.lhs_batch) out.shape.push_back(lhs.shape[b]);
  for (int i = 0; i < lhs.rank(); ++i)
    if (!lhs_used.count(i)) out.shape.push_back(lhs.shape[i]);
  for (int i = 0; i < rhs.rank(); ++i)
    if (!rhs_used.count(i)) out.shape.push_back(rhs.shape[i]);
  if (out.rank() > kMaxRank) fail(op, "dot result rank exceeds 4");
  return out;
}

TensorType infer_reduce(const Operation& op, const TensorType& in) {
  std::set<int> reduced(op.dims.begin(), op.dims.end());
  if (reduced.size() != op.dims.size()) fail(op, "repeated reduce dim");
  for (int d : op.dims) check_dim_in_rank(op, d, in.rank(), "reduce dim");
  TensorType out;
  for (int i = 0; i < in.rank(); ++i)
    if (!reduced.count(i)) out.shape.push_back(in.shape[i]);
  return out;
}

TensorType infer_transpose(const Operation& op, const TensorType& in) {
  if (static_cast<int>(op.dims.size()) != in.rank())
    fail(op, "permutation length does not match rank");
  std::set<int> seen(op.dims.begin(), op.dims.end());
  if (static_cast<int>(seen.size()) != in.rank() ||
      (!seen.empty() && (*seen.begin() < 0 || *seen.rbegin() >= in.rank())))
    fail(op, "permutation is not a bijection on dims");
  TensorType out;
  for (int d : op.dims) out.shape.push_back(in.shape[d]);
  return out;
}

TensorType infer_broadcast(const Operation& op, const TensorType& in) {
  const TensorType& out = op.result_type;
  if (out.rank() > kMaxRank) fail(op, "broadcast result rank exceeds 4");
  if (static_cast<int>(op.dims.size()) != in.rank())
    fail(op, "broadcast dim map length does not match operand rank");
  int prev = -1;
  for (size_t i = 0; i < op.dims.size(); ++i) {
    int m = op.dims[i];
    check_dim_in_rank(op, m, out.rank(), "broadcast map entry");
    if (m <= prev) fail(op, "broadcast dim map must be strictly increasing");
    prev = m;
    if (in.shape[i] != out.shape[m])
      fail(op, "broadcast operand dim " + std::to_string(i) + " of size " +
               std::to_string(in.shape[i]) + " does not match output dim " +
               std::to_string(m) + " of size " + std::to_string(out.shape[m]));
  }
  return out;
}

TensorType infer_slice(const Operation& op, const TensorType& in) {
  if (static_cast<int>(op.start.size()) != in.rank() ||
      static_cast<int>(op.limit.size()) != in.rank())
    fail(op, "slice start/limit length does not match rank");
  TensorType out;
  for (int i = 0; i < in.rank(); ++i) {
    int64_t s = op.start[i], l = op.limit[i];
    if (s < 0 || l > in.shape[i] || s >= l)
      fail(op, "slice bounds [" + std::to_string(s) + "," + std::to_string(l) +
               ") invalid for dim " + std::to_string(i) + " of size " +
               std::to_string(in.shape[i]));
    out.shape.push_back(l - s);
  }
  return out;
}

TensorType infer_concat(const Operation& op,
                        const std::vector<TensorType>& ins) {
  if (ins.size() < 2) fail(op, "concatenate expects at least 2 operands");
  const TensorType& first = ins[0];
  check_dim_in_rank(op, op.dim, first.rank(), "concatenate dim");
  TensorType out = first;
  for (size_t i = 1; i < ins.size(); ++i) {
    if (ins[i].rank() != first.rank()) fail(op, "operand rank mismatch");
    for (int d = 0; d < first.rank(); ++d) {
      if (d == op.dim) continue;
      if (ins[i].shape[d] != first.shape[d])
        fail(op, "non-concat dimension " + std::to_string(d) + " mismatch");
    }
    out.shape[op.dim] += ins[i].shape[op.dim];
  }
  return out;
}

}  // namespace

TensorType infer_result_type(const Operation& op,
                             const std::vector<TensorType>& operand_types) {
  switch (op.kind) {
    case OpKind::kConstant: {
      check_arity(op, 0);
      if (op.result_type.rank() > kMaxRank) fail(op, "rank exceeds 4");
      for (int64_t d : op.result_type.shape)
        if (d < 1) fail(op, "dimension < 1");
      return op.result_type;
    }
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kDiv:
    case OpKind::kMaximum: {
      check_arity(op, 2);
      if (operand_types[0] != operand_types[1])
        fail(op, "operand shapes differ: " + to_string(operand_types[0]) +
                 " vs " + to_string(operand_types[1]));
      return operand_types[0];
    }
    case OpKind::kNeg:
    case OpKind::kExp:
    case OpKind::kTanh:
    case OpKind::kRsqrt: {
      check_arity(op, 1);
      return operand_types[0];
    }
    case OpKind::kDot: {
      check_arity(op, 2);
      return infer_dot(op, operand_types[0], operand_types[1]);
    }
    case OpKind::kReduceSum:
    case OpKind::kReduceMax: {
      check_arity(op, 1);
      return infer_reduce(op, operand_types[0]);
    }
    case OpKind::kTranspose: {
      check_arity(op, 1);
      return infer_transpose(op, operand_types[0]);
    }
    case OpKind::kReshape: {
      check_arity(op, 1);
      if (op.result_type.rank() > kMaxRank) fail(op, "rank exceeds 4");
      if (op.result_type.num_elements() != operand_types[0].num_elements())
        fail(op, "reshape changes element count: " +
                 to_string(operand_types[0]) + " -> " +
                 to_string(op.result_type));
      return op.result_type;
    }
    case OpKind::kBroadcastInDim: {
      check_arity(op, 1);
      return infer_broadcast(op, operand_types[0]);
    }
    case OpKind::kSlice: {
      check_arity(op, 1);
      return infer_slice(op, operand_types[0]);
    }
    case OpKind::kConcatenate: {
      return infer_concat(op, operand_types);
    }
    default:
      fail(op, "not a base-dialect op");
  }
}

namespace {

// Scope of visible value definitions during the checking walk. Region
// bodies see enclosing definitions; body-locals go out of scope when the
// region closes. Ids are globally unique across the whole program.
struct Checker {
  const Program& p;
  std::map<std::string, TensorType> types;        // currently visible values
  std::set<std::string> all_ids;                  // global uniqueness
  std::map<std::string, std::string> index_axis;  // index var -> loop axis

  explicit Checker(const Program& p) : p(p) {}

  const TensorType& type_of(const Operation& op, const std::string& id) {
    auto it = types.find(id);
    if (it == types.end()) fail(op, "unknown or not-yet-defined value %" + id);
    return it->second;
  }

  void define(const Operation& op, const std::string& id, TensorType t) {
    if (id.empty()) fail(op, "empty result id");
    if (!all_ids.insert(id).second) fail(op, "redefinition of %" + id);
    types.emplace(id, std::move(t));
  }

  // Axes of the enclosing loops, innermost last.
  void check_ops(const std::vector<Operation>& ops,
                 std::vector<std::string>& loop_axes) {
    for (const Operation& op : ops) {
      if (op.result_type.rank() > kMaxRank) fail(op, "rank exceeds 4");
      for (int64_t d : op.result_type.shape)
        if (d < 1) fail(op, "result dimension < 1");
      switch (op.kind) {
        case OpKind::kTile:
        case OpKind::kSum: {
          if (!p.mesh.has_axis(op.axis))
            fail(op, "loop over undeclared axis \"" + op.axis + "\"");
          if (std::find(loop_axes.begin(), loop_axes.end(), op.axis) !=
              loop_axes.end())
            fail(op, "loop over axis \"" + op.axis +
                     "\" nested inside a loop over the same axis");
          if (op.body.empty()) fail(op, "empty loop body");
          if (op.index_var.empty()) fail(op, "loop without index variable");
          if (!index_axis.emplace(op.index_var, op.axis).second)
            fail(op, "redefinition of index %" + op.index_var);
          loop_axes.push_back(op.axis);
          auto outer_scope = types;
          check_ops(op.body, loop_axes);
          loop_axes.pop_back();
          const TensorType yielded = type_of(op, op.yield_id);
          types = std::move(outer_scope);  // body-locals out of scope
          TensorType expect = op.result_type;
          if (op.kind == OpKind::kTile) {
            int64_t size = p.mesh.axis_size(op.axis);
            check_dim_in_rank(op, op.dim, expect.rank(), "tile concat dim");
            if (expect.shape[op.dim] % size != 0)
              fail(op, "concat dim " + std::to_string(op.dim) +
                       " not divisible by axis size");
            expect.shape[op.dim] /= size;
          }
          if (yielded != expect)
            fail(op, "yielded type " + to_string(yielded) +
                     " does not match per-iteration type " + to_string(expect));
          define(op, op.id, op.result_type);
          break;
        }
        case OpKind::kAtomic: {
          // v1 atomic bodies are pure pass-throughs: no ops, just a yield
          // of an already-defined value.
          if (!op.body.empty())
            fail(op, "atomic body must be a pass-through yield");
          const TensorType& yielded = type_of(op, op.yield_id);
          if (yielded != op.result_type)
            fail(op, "atomic result type does not match yielded value");
          define(op, op.id, op.result_type);
          break;
        }
        case OpKind::kSliceAxis: {
          check_arity(op, 1);
          const TensorType& in = type_of(op, op.operands[0]);
          auto it = index_axis.find(op.index_var);
          if (it == index_axis.end() ||
              std::find(loop_axes.begin(), loop_axes.end(), it->second) ==
                  loop_axes.end())
            fail(op, "slice_axis index %" + op.index_var +
                     " is not bound by an enclosing loop");
          check_dim_in_rank(op, op.dim, in.rank(), "slice_axis dim");
          int64_t size = p.mesh.axis_size(it->second);
          if (in.shape[op.dim] % size != 0)
            fail(op, "dim " + std::to_string(op.dim) + " of size " +
                     std::to_string(in.shape[op.dim]) +
                     " not divisible by axis \"" + it->second + "\"");
          TensorType expect = in;
          expect.shape[op.dim] /= size;
          if (op.result_type != expect)
            fail(op, "declared type " + to_string(op.result_type) +
                     " does not match inferred " + to_string(expect));
          define(op, op.id, op.result_type);
          break;
        }
        case OpKind::kAllReduce:
        case OpKind::kAllGather:
        case OpKind::kSliceByCoord:
          fail(op, "SPMD-dialect op in an unlowered program");
        default: {
          std::vector<TensorType> ins;
          ins.reserve(op.operands.size());
          for (const std::string& o : op.operands)
            ins.push_back(type_of(op, o));
          TensorType inferred = infer_result_type(op, ins);
          if (op.result_type != inferred)
            fail(op, "declared type " + to_string(op.result_type) +
                     " does not match inferred " + to_string(inferred));
          define(op, op.id, op.result_type);
          break;
        }
      }
    }
  }
};

// Loop-invariant-only walk used by validate_tiled.
void check_loops(const Program& p, const std::vector<Operation>& ops,
                 std::vector<std::string>& loop_axes) {
  for (const Operation& op : ops) {
    if (is_loop_kind(op.kind)) {
      if (!p.mesh.has_axis(op.axis))
        fail(op, "loop over undeclared axis \"" + op.axis + "\"");
      if (std::find(loop_axes.begin(), loop_axes.end(), op.axis) !=
          loop_axes.end())
        fail(op, "loop over axis \"" + op.axis +
                 "\" nested inside a loop over the same axis");
      loop_axes.push_back(op.axis);
      check_loops(p, op.body, loop_axes);
      loop_axes.pop_back();
    } else if (op.kind == OpKind::kAtomic) {
      if (!op.body.empty())
        fail(op, "atomic body must be a pass-through yield");
    }
  }
}

}  // namespace

const Program& validate(const Program& p) {
  validate_mesh(p.mesh);
  if (p.name.empty()) throw ValidationError("program without a name");
  Checker checker(p);
  for (const Argument& a : p.args) {
    if (a.type.rank() > kMaxRank)
      throw ValidationError("argument %" + a.id + " rank exceeds 4");
    for (int64_t d : a.type.shape)
      if (d < 1) throw ValidationError("argument %" + a.id + " dimension < 1");
    if (a.id.empty() || !checker.types.emplace(a.id, a.type).second)
      throw ValidationError("duplicate or empty argument id %" + a.id);
  }
  std::vector<std::string> loop_axes;
  checker.check_ops(p.ops, loop_axes);
  if (!checker.types.count(p.result_id))
    throw ValidationError("returned value %" + p.result_id +
                          " is not defined at top level");
  return p;
}

void validate_tiled(const Program& p) {
  validate_mesh(p.mesh);
  std::vector<std::string> loop_axes;
  check_loops(p, p.ops, loop_axes);
}

}  // namespace partir
