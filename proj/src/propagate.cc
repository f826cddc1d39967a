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

#include "partir/propagate.h"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "partir/error.h"
#include "partir/registry.h"
#include "partir/rewrite.h"
#include "partir/spmd.h"
#include "partir/validate.h"

namespace partir {

std::string_view reason_name(StuckNode::Reason r) {
  switch (r) {
    case StuckNode::Reason::kInsufficientOperands:
      return "insufficient_operands";
    case StuckNode::Reason::kBlockedDim:
      return "blocked_dim";
    case StuckNode::Reason::kConflictingAxes:
      return "conflicting_axes";
  }
  return "<unknown>";
}

namespace {

constexpr int kMaxRounds = 100000;

// Working state shared by the sweeps.
struct Propagator {
  Program& p;
  NameGen names;
  std::map<std::string, TensorType> types;

  explicit Propagator(Program& p) : p(p), names(p) {
    for (const Argument& a : p.args) types[a.id] = a.type;
    walk(p, [&](const Operation& op, int) { types[op.id] = op.result_type; });
  }

  const TensorType& type_of(const std::string& id) const {
    auto it = types.find(id);
    if (it == types.end())
      throw InternalError("propagate: unknown value %" + id);
    return it->second;
  }

  std::vector<TensorType> operand_types(const Operation& op) const {
    std::vector<TensorType> out;
    out.reserve(op.operands.size());
    for (const std::string& o : op.operands) out.push_back(type_of(o));
    return out;
  }

  // ---- Forward: pull consumers of tile-loop results inside loops. ----

  // Tile loop defined in `region` whose result is `id`, or nullptr.
  static const Operation* find_tile_loop(const std::vector<Operation>& region,
                                         const std::string& id) {
    for (const Operation& op : region)
      if (op.id == id && op.kind == OpKind::kTile) return &op;
    return nullptr;
  }

  struct PullPlan {
    bool ok = false;
    std::optional<StuckNode::Reason> stuck;
    const DimClass* driving_class = nullptr;
    std::string axis;
    const Operation* driving_loop = nullptr;  // loop feeding the driving use
  };

  // Decides whether consumer X (a base op in `region`) can be pulled into a
  // loop over the axis of its first tiled operand.
  PullPlan plan_pull(const std::vector<Operation>& region,
                     const Operation& X) const {
    PullPlan plan;
    std::vector<std::pair<int, const Operation*>> tiled;  // (operand pos, loop)
    for (size_t i = 0; i < X.operands.size(); ++i)
      if (const Operation* L = find_tile_loop(region, X.operands[i]))
        tiled.push_back({static_cast<int>(i), L});
    if (tiled.empty()) return plan;

    PropagationRule rule = rule_for(X, operand_types(X));
    // Any blocked use of a tiled dim stops the whole pull.
    for (auto& [pos, L] : tiled) {
      const DimClass* c = rule.class_of(pos, L->dim);
      if (c == nullptr || c->role == DimRole::kBlocked) {
        plan.stuck = StuckNode::Reason::kBlockedDim;
        return plan;
      }
    }
    const auto& [pos0, L0] = tiled[0];
    const DimClass* C = rule.class_of(pos0, L0->dim);
    plan.axis = L0->axis;
    plan.driving_class = C;
    plan.driving_loop = L0;
    // Other operands tiled on the same axis must demand the same class.
    for (auto& [pos, L] : tiled)
      if (L->axis == plan.axis && rule.class_of(pos, L->dim) != C) {
        plan.stuck = StuckNode::Reason::kConflictingAxes;
        return plan;
      }
    int64_t axis_size = p.mesh.axis_size(plan.axis);
    // Every class member must be sliceable along the axis.
    for (const DimClassMember& m : C->members) {
      const TensorType& t = type_of(X.operands[m.operand]);
      if (t.shape[m.dim] % axis_size != 0) {
        plan.stuck = StuckNode::Reason::kInsufficientOperands;
        return plan;
      }
      if (const Operation* L =
              find_tile_loop(region, X.operands[m.operand])) {
        bool same_axis = L->axis == plan.axis;
        bool same_dim = L->dim == m.dim;
        // Slicing a loop result along its own concat dim by its own axis is
        // a free alias; slicing it along that dim by another axis, or along
        // another dim by the same axis, is an axis conflict.
        if ((same_axis && !same_dim) || (!same_axis && same_dim)) {
          plan.stuck = StuckNode::Reason::kConflictingAxes;
          return plan;
        }
      }
    }
    plan.ok = true;
    return plan;
  }

  // Builds the per-member slice ops and the relocated consumer. Member
  // operands already yielded by `reuse_loop` (the extended loop) are fed the
  // yield value directly.
  void build_sliced_consumer(const Operation& X, const DimClass& C,
                             const std::string& index_var, int64_t axis_size,
                             const Operation* reuse_loop,
                             std::vector<Operation>& into,
                             Operation& consumer) {
    consumer = X;
    consumer.id = names.value();
    std::map<std::pair<std::string, int>, std::string> slice_cache;
    for (const DimClassMember& m : C.members) {
      const std::string& operand = X.operands[m.operand];
      if (reuse_loop != nullptr && operand == reuse_loop->id) {
        consumer.operands[m.operand] = reuse_loop->yield_id;
        continue;
      }
      auto key = std::make_pair(operand, m.dim);
      auto it = slice_cache.find(key);
      if (it == slice_cache.end()) {
        Operation slice;
        slice.id = names.value();
        slice.kind = OpKind::kSliceAxis;
        slice.operands = {operand};
        slice.dim = m.dim;
        slice.index_var = index_var;
        slice.result_type = type_of(operand);
        slice.result_type.shape[m.dim] /= axis_size;
        types[slice.id] = slice.result_type;
        it = slice_cache.emplace(key, slice.id).first;
        into.push_back(std::move(slice));
      }
      consumer.operands[m.operand] = it->second;
    }
  }

  // One forward rewrite in `region`; true if anything changed.
  bool forward_region(std::vector<Operation>& region) {
    for (size_t xi = 0; xi < region.size(); ++xi) {
      Operation& X = region[xi];
      if (X.has_region()) {
        if (forward_region(X.body)) return true;
        continue;
      }
      if (!is_base_kind(X.kind)) continue;
      PullPlan plan = plan_pull(region, X);
      if (!plan.ok) continue;

      const DimClass& C = *plan.driving_class;
      int64_t axis_size = p.mesh.axis_size(plan.axis);
      bool contracting = C.role == DimRole::kContracting;
      const Operation* L = plan.driving_loop;
      bool extend = !contracting && count_uses(p, L->id) == 1;

      if (extend) {
        // Grow the single-use loop: move it to X's slot, slice X's other
        // class operands inside, and yield X's per-iteration result.
        Operation loop = *L;
        Operation consumer;
        std::vector<Operation> extra;
        build_sliced_consumer(X, C, loop.index_var, axis_size, &loop, extra,
                              consumer);
        consumer.result_type = X.result_type;
        consumer.result_type.shape[*C.result_dim] /= axis_size;
        types[consumer.id] = consumer.result_type;
        loop.yield_id = consumer.id;
        for (Operation& e : extra) loop.body.push_back(std::move(e));
        loop.body.push_back(std::move(consumer));
        loop.dim = *C.result_dim;
        loop.result_type = X.result_type;
        std::string old_loop_id = loop.id;
        loop.id = X.id;
        types[loop.id] = loop.result_type;
        types.erase(old_loop_id);
        // Erase the old loop, then replace X (now one slot earlier).
        size_t li = 0;
        while (region[li].id != old_loop_id) ++li;
        region.erase(region.begin() + li);
        region[xi - 1] = std::move(loop);
      } else {
        // Fresh loop at X's slot consuming loop results via slice_axis
        // (free aliases after lowering).
        Operation loop;
        loop.kind = contracting ? OpKind::kSum : OpKind::kTile;
        loop.axis = plan.axis;
        loop.index_var = names.index();
        loop.id = X.id;
        loop.result_type = X.result_type;
        Operation consumer;
        build_sliced_consumer(X, C, loop.index_var, axis_size, nullptr,
                              loop.body, consumer);
        consumer.result_type = X.result_type;
        if (!contracting) {
          loop.dim = *C.result_dim;
          consumer.result_type.shape[*C.result_dim] /= axis_size;
        }
        types[consumer.id] = consumer.result_type;
        loop.yield_id = consumer.id;
        loop.body.push_back(std::move(consumer));
        types[loop.id] = loop.result_type;
        region[xi] = std::move(loop);
      }
      return true;
    }
    return false;
  }

  // ---- Backward: migrate producers of sliced values into loops. ----

  // Collects pointers to slice_axis ops (at any depth under `ops`) bound to
  // `index_var`.
  static void collect_slices(const std::vector<Operation>& ops,
                             const std::string& index_var,
                             std::vector<const Operation*>& out) {
    for (const Operation& op : ops) {
      if (op.kind == OpKind::kSliceAxis && op.index_var == index_var)
        out.push_back(&op);
      if (op.has_region()) collect_slices(op.body, index_var, out);
    }
  }

  static bool erase_slice_and_insert(std::vector<Operation>& ops,
                                     const std::string& slice_id,
                                     std::vector<Operation>& replacement) {
    for (size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].id == slice_id) {
        ops.erase(ops.begin() + i);
        for (size_t k = 0; k < replacement.size(); ++k)
          ops.insert(ops.begin() + i + k, std::move(replacement[k]));
        return true;
      }
      if (ops[i].has_region() &&
          erase_slice_and_insert(ops[i].body, slice_id, replacement))
        return true;
    }
    return false;
  }

  bool backward_region(std::vector<Operation>& region) {
    for (size_t li = 0; li < region.size(); ++li) {
      Operation& L = region[li];
      if (!L.has_region()) continue;
      if (backward_region(L.body)) return true;
      if (!is_loop_kind(L.kind)) continue;
      std::vector<const Operation*> slices;
      collect_slices(L.body, L.index_var, slices);
      for (const Operation* S : slices) {
        const std::string& v = S->operands[0];
        if (p.find_arg(v) != nullptr) continue;
        // Producer must be a base op at this region level, before the loop,
        // and `v` must have no other use.
        size_t pi = region.size();
        for (size_t i = 0; i < li; ++i)
          if (region[i].id == v) pi = i;
        if (pi == region.size()) continue;
        Operation& P = region[pi];
        if (!is_base_kind(P.kind)) continue;
        if (count_uses(p, v) != 1) continue;
        int64_t axis_size = p.mesh.axis_size(L.axis);

        std::vector<Operation> replacement;
        if (P.kind == OpKind::kConstant) {
          Operation c = P;
          c.id = S->id;
          c.result_type = S->result_type;
          c.scope = P.scope;
          types[c.id] = c.result_type;
          replacement.push_back(std::move(c));
        } else if (P.kind == OpKind::kBroadcastInDim &&
                   std::find(P.dims.begin(), P.dims.end(), S->dim) ==
                       P.dims.end()) {
          // Slicing a broadcast along a purely-new dim shrinks the
          // broadcast itself; the operand is untouched.
          Operation b = P;
          b.id = S->id;
          b.result_type = S->result_type;
          types[b.id] = b.result_type;
          replacement.push_back(std::move(b));
        } else {
          PropagationRule rule = rule_for(P, operand_types(P));
          const DimClass* C = rule.class_for_result(S->dim);
          if (C == nullptr) continue;  // blocked; surfaces in stuck analysis
          bool feasible = true;
          for (const DimClassMember& m : C->members) {
            const TensorType& t = type_of(P.operands[m.operand]);
            if (t.shape[m.dim] % axis_size != 0) feasible = false;
            if (const Operation* L2 =
                    find_tile_loop(region, P.operands[m.operand])) {
              bool same_axis = L2->axis == L.axis;
              bool same_dim = L2->dim == m.dim;
              if ((same_axis && !same_dim) || (!same_axis && same_dim))
                feasible = false;
            }
          }
          if (!feasible) continue;
          Operation local = P;
          local.id = S->id;
          local.result_type = S->result_type;
          types[local.id] = local.result_type;
          std::map<std::pair<std::string, int>, std::string> slice_cache;
          for (const DimClassMember& m : C->members) {
            const std::string& operand = P.operands[m.operand];
            auto key = std::make_pair(operand, m.dim);
            auto it = slice_cache.find(key);
            if (it == slice_cache.end()) {
              Operation slice;
              slice.id = names.value();
              slice.kind = OpKind::kSliceAxis;
              slice.operands = {operand};
              slice.dim = m.dim;
              slice.index_var = L.index_var;
              slice.result_type = type_of(operand);
              slice.result_type.shape[m.dim] /= axis_size;
              types[slice.id] = slice.result_type;
              it = slice_cache.emplace(key, slice.id).first;
              replacement.push_back(std::move(slice));
            }
            local.operands[m.operand] = it->second;
          }
          replacement.push_back(std::move(local));
        }
        types.erase(v);
        region.erase(region.begin() + pi);  // P gone; li shifts down by one
        if (!erase_slice_and_insert(region[li - 1].body, S->id, replacement))
          throw InternalError("propagate: lost slice during backward pull");
        return true;
      }
    }
    return false;
  }

  // ---- Atomic wrapping of replicated-in-loop arguments. ----

  void refresh_types() {
    walk(p, [&](const Operation& op, int) {
      types.emplace(op.id, op.result_type);
    });
  }

  bool wrap_replicated_args() {
    std::set<std::string> direct_in_loop, sliced, wrapped;
    walk(p, [&](const Operation& op, int depth) {
      if (op.kind == OpKind::kSliceAxis) {
        sliced.insert(op.operands[0]);
        return;
      }
      if (op.kind == OpKind::kAtomic) {
        wrapped.insert(op.yield_id);
        return;
      }
      if (depth > 0)
        for (const std::string& o : op.operands) direct_in_loop.insert(o);
      if (op.has_region() && depth > 0) direct_in_loop.insert(op.yield_id);
    });
    for (const Argument& a : p.args) {
      if (!direct_in_loop.count(a.id) || sliced.count(a.id) ||
          wrapped.count(a.id))
        continue;
      p = partir::wrap_atomic(p, a.id);
      return true;
    }
    return false;
  }

  // ---- Stuck analysis (no rewrites). ----

  void analyze_region(const std::vector<Operation>& region,
                      std::vector<StuckNode>& stuck) const {
    for (const Operation& X : region) {
      if (X.has_region()) {
        analyze_region(X.body, stuck);
        if (is_loop_kind(X.kind)) analyze_slices(region, X, stuck);
        continue;
      }
      if (!is_base_kind(X.kind)) continue;
      bool has_tiled = false;
      for (const std::string& o : X.operands)
        if (find_tile_loop(region, o) != nullptr) has_tiled = true;
      if (!has_tiled) continue;
      PullPlan plan = plan_pull(region, X);
      if (plan.ok)
        throw InternalError("propagate: pull available after fixpoint at %" +
                            X.id);
      if (plan.stuck) stuck.push_back({X.id, *plan.stuck});
    }
  }

  // Producers whose results are demanded in slices but cannot compute
  // chunk-wise (blocked result dims, e.g. reshape merges).
  void analyze_slices(const std::vector<Operation>& region, const Operation& L,
                      std::vector<StuckNode>& stuck) const {
    std::vector<const Operation*> slices;
    collect_slices(L.body, L.index_var, slices);
    for (const Operation* S : slices) {
      const std::string& v = S->operands[0];
      if (p.find_arg(v) != nullptr) continue;
      for (const Operation& P : region) {
        if (P.id != v || !is_base_kind(P.kind)) continue;
        if (P.kind == OpKind::kConstant) continue;
        if (count_uses(p, v) != 1) continue;  // replicated producer is fine
        if (P.kind == OpKind::kBroadcastInDim &&
            std::find(P.dims.begin(), P.dims.end(), S->dim) == P.dims.end())
          continue;
        PropagationRule rule = rule_for(P, operand_types(P));
        if (rule.class_for_result(S->dim) == nullptr)
          stuck.push_back({P.id, StuckNode::Reason::kBlockedDim});
      }
    }
  }
};

}  // namespace

PropagateResult propagate(const Program& p) {
  PropagateResult result;
  result.program = p;
  Propagator prop(result.program);
  bool changed = true;
  int rounds = 0;
  while (changed) {
    if (++rounds > kMaxRounds)
      throw InternalError("propagate: no fixpoint after " +
                          std::to_string(kMaxRounds) + " rounds");
    changed = prop.forward_region(result.program.ops) ||
              prop.backward_region(result.program.ops);
  }
  while (prop.wrap_replicated_args()) {
  }
  prop.refresh_types();
  std::vector<StuckNode> raw;
  prop.analyze_region(result.program.ops, raw);
  std::set<std::string> seen;
  for (StuckNode& s : raw)
    if (seen.insert(s.op_id).second) result.stuck.push_back(std::move(s));
  validate(result.program);
  return result;
}

Program infer_rest(const Program& p, const std::vector<std::string>& axes) {
  Program cur = propagate(p).program;
  std::vector<std::string> try_axes = axes;
  if (try_axes.empty())
    for (const MeshAxis& a : cur.mesh.axes) try_axes.push_back(a.name);

  auto arg_is_tiled = [](const Program& q, const std::string& id) {
    bool tiled = false;
    walk(q, [&](const Operation& op, int) {
      if (op.kind == OpKind::kSliceAxis && op.operands[0] == id) tiled = true;
    });
    return tiled;
  };
  auto arg_is_atomic = [](const Program& q, const std::string& id) {
    bool atomics = false;
    walk(q, [&](const Operation& op, int) {
      if (op.kind == OpKind::kAtomic && op.yield_id == id) atomics = true;
    });
    return atomics;
  };
  auto gather_bytes = [](const Program& q) {
    return collective_stats(lower_to_spmd(q)).all_gather_bytes();
  };

  bool any_tiled = false;
  for (const Argument& a : cur.args)
    if (arg_is_tiled(cur, a.id)) any_tiled = true;
  if (!any_tiled) return cur;

  bool progress = true;
  while (progress) {
    progress = false;
    int64_t baseline = gather_bytes(cur);
    for (const Argument& a : cur.args) {
      if (arg_is_tiled(cur, a.id) || arg_is_atomic(cur, a.id)) continue;
      std::vector<Program> consistent;
      for (int dim = 0; dim < a.type.rank(); ++dim) {
        for (const std::string& axis : try_axes) {
          int64_t size = cur.mesh.axis_size(axis);
          if (a.type.shape[dim] % size != 0) continue;
          try {
            Program cand =
                propagate(apply_tile_action(cur, a.id, dim, axis)).program;
            if (gather_bytes(cand) <= baseline)
              consistent.push_back(std::move(cand));
          } catch (const Error&) {
            // An assignment that cannot even lower is not consistent.
          }
          if (consistent.size() > 1) break;
        }
        if (consistent.size() > 1) break;
      }
      if (consistent.size() == 1) {
        cur = std::move(consistent[0]);
        progress = true;
        break;  // re-derive the baseline before the next argument
      }
    }
  }
  return cur;
}

}  // namespace partir
