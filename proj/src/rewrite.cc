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

#include "partir/rewrite.h"

#include <functional>

#include "partir/error.h"

namespace partir {
namespace {

// Replaces uses of `from` with `to` in all ops except the one with id
// `except_id` (the freshly built loop that reconstructs the value).
void replace_uses(std::vector<Operation>& ops, const std::string& from,
                  const std::string& to, const std::string& except_id) {
  for (Operation& op : ops) {
    if (op.id == except_id) continue;
    for (std::string& o : op.operands)
      if (o == from) o = to;
    if (op.has_region()) {
      replace_uses(op.body, from, to, except_id);
      if (op.yield_id == from) op.yield_id = to;
    }
  }
}

}  // namespace

bool carries_tiling(const Program& p, const std::string& value) {
  bool carries = false;
  walk(p, [&](const Operation& op, int) {
    if (op.kind == OpKind::kSliceAxis && op.operands[0] == value)
      carries = true;
    if (op.kind == OpKind::kAtomic && op.yield_id == value) carries = true;
    if (is_loop_kind(op.kind) && op.id == value) carries = true;
  });
  return carries;
}

TensorType top_level_type(const Program& p, const std::string& value) {
  if (const Argument* a = p.find_arg(value)) return a->type;
  for (const Operation& op : p.ops)
    if (op.id == value) return op.result_type;
  throw IllegalActionError("value %" + value +
                           " does not exist at top level");
}

Program apply_tile_action(const Program& p, const std::string& value, int dim,
                          const std::string& axis) {
  TensorType type = top_level_type(p, value);
  if (!p.mesh.has_axis(axis))
    throw IllegalActionError("axis \"" + axis + "\" is not declared");
  if (dim < 0 || dim >= type.rank())
    throw IllegalActionError("dim " + std::to_string(dim) +
                             " out of range for %" + value);
  int64_t size = p.mesh.axis_size(axis);
  if (type.shape[dim] % size != 0)
    throw IllegalActionError(
        "dim " + std::to_string(dim) + " of %" + value + " (size " +
        std::to_string(type.shape[dim]) + ") is not divisible by axis \"" +
        axis + "\" (size " + std::to_string(size) + ")");
  if (carries_tiling(p, value))
    throw IllegalActionError("%" + value + " already carries tiling");

  Program out = p;
  NameGen names(out);
  std::string loop_id = names.value();
  std::string slice_id = names.value();
  std::string index_id = names.index();

  Operation slice;
  slice.id = slice_id;
  slice.kind = OpKind::kSliceAxis;
  slice.operands = {value};
  slice.dim = dim;
  slice.index_var = index_id;
  slice.result_type = type;
  slice.result_type.shape[dim] /= size;

  Operation loop;
  loop.id = loop_id;
  loop.kind = OpKind::kTile;
  loop.axis = axis;
  loop.dim = dim;
  loop.index_var = index_id;
  loop.result_type = type;
  loop.yield_id = slice_id;
  loop.body.push_back(std::move(slice));

  // The loop goes right after the value's definition.
  size_t insert_at = 0;
  if (!p.find_arg(value)) {
    for (size_t i = 0; i < out.ops.size(); ++i)
      if (out.ops[i].id == value) insert_at = i + 1;
  }
  out.ops.insert(out.ops.begin() + insert_at, std::move(loop));
  replace_uses(out.ops, value, loop_id, loop_id);
  if (out.result_id == value) out.result_id = loop_id;
  return out;
}

Program wrap_atomic(const Program& p, const std::string& value) {
  TensorType type = top_level_type(p, value);
  if (carries_tiling(p, value))
    throw IllegalActionError("%" + value +
                             " already carries tiling; cannot wrap atomic");
  Program out = p;
  NameGen names(out);
  Operation atomic;
  atomic.id = names.value();
  atomic.kind = OpKind::kAtomic;
  atomic.yield_id = value;
  atomic.result_type = type;
  size_t insert_at = 0;
  if (!p.find_arg(value)) {
    for (size_t i = 0; i < out.ops.size(); ++i)
      if (out.ops[i].id == value) insert_at = i + 1;
  }
  std::string atomic_id = atomic.id;
  out.ops.insert(out.ops.begin() + insert_at, std::move(atomic));
  replace_uses(out.ops, value, atomic_id, atomic_id);
  if (out.result_id == value) out.result_id = atomic_id;
  return out;
}

}  // namespace partir
