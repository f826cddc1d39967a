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

#include "partir/spmd.h"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "partir/error.h"
#include "partir/registry.h"
#include "partir/validate.h"

namespace partir {

const DistType& SpmdProgram::type_of(const std::string& id) const {
  auto it = value_types.find(id);
  if (it == value_types.end())
    throw InternalError("spmd program has no type for %" + id);
  return it->second;
}

namespace {

// Lowering-time view of one tiled-IR value. `acq` records, per dimension,
// the loop depth at which the sharding was acquired: 0 means pure
// distribution (argument shards, loop results); >0 means the chunk index is
// bound to the loop at that depth, so the value is iteration-live there.
struct Lowered {
  std::string spmd_id;
  TensorType global;
  ShardingSpec spec;
  std::vector<int> acq;

  std::vector<int64_t> local(const Mesh& mesh) const {
    return local_shape(global, spec, mesh);
  }
};

struct LowerState {
  const Program& p;
  SpmdProgram out;
  NameGen names;
  std::map<std::string, Lowered> values;  // tiled-IR id -> lowered view
  std::vector<std::pair<std::string, int>> loop_stack;  // (axis, depth)
  std::map<std::string, std::string> index_axis;        // index var -> axis

  explicit LowerState(const Program& p) : p(p), names(p) {}

  int binding_depth(const std::string& axis) const {
    for (auto it = loop_stack.rbegin(); it != loop_stack.rend(); ++it)
      if (it->first == axis) return it->second;
    return 0;  // unbound
  }

  Lowered& lookup(const std::string& id) {
    auto it = values.find(id);
    if (it == values.end())
      throw InternalError("lowering: unresolved value %" + id);
    return it->second;
  }

  void register_type(const std::string& spmd_id, const Lowered& v) {
    DistType t;
    t.global = v.global;
    t.spec = v.spec;
    out.value_types[spmd_id] = std::move(t);
  }

  // Emits all_gather over `axis` on dim `dim`, updating the value record in
  // place so later consumers reuse the gathered buffer.
  void emit_gather(Lowered& v, int dim) {
    const std::string axis = v.spec.dim_axes[dim];
    Operation g;
    g.id = names.value();
    g.kind = OpKind::kAllGather;
    g.operands = {v.spmd_id};
    g.axis = axis;
    g.dim = dim;
    v.spec.dim_axes[dim].clear();
    v.acq[dim] = 0;
    g.result_type = TensorType{v.local(p.mesh)};
    v.spmd_id = g.id;
    register_type(g.id, v);
    out.ops.push_back(std::move(g));
  }

  // Emits all_reduce over `axis`, clearing one pending-sum axis.
  void emit_all_reduce(Lowered& v, const std::string& axis,
                       const std::string& result_id) {
    Operation r;
    r.id = result_id.empty() ? names.value() : result_id;
    r.kind = OpKind::kAllReduce;
    r.operands = {v.spmd_id};
    r.axis = axis;
    v.spec.clear_pending(axis);
    r.result_type = TensorType{v.local(p.mesh)};
    v.spmd_id = r.id;
    register_type(r.id, v);
    out.ops.push_back(std::move(r));
  }

  // Makes `v` safe for direct (whole-value, per-iteration) consumption at
  // the current context: every dim axis that is not iteration-live here is
  // gathered; stray pending sums are reduced.
  void materialize_for_direct_use(Lowered& v) {
    for (size_t d = 0; d < v.spec.dim_axes.size(); ++d) {
      const std::string& axis = v.spec.dim_axes[d];
      if (axis.empty()) continue;
      int bound = binding_depth(axis);
      bool iteration_live = bound >= 1 && v.acq[d] == bound;
      if (!iteration_live) emit_gather(v, static_cast<int>(d));
    }
    while (!v.spec.pending_sum.empty())
      emit_all_reduce(v, v.spec.pending_sum.front(), "");
  }

  void lower_region(const std::vector<Operation>& ops, int depth) {
    for (const Operation& op : ops) {
      switch (op.kind) {
        case OpKind::kTile:
        case OpKind::kSum:
          lower_loop(op, depth);
          break;
        case OpKind::kAtomic: {
          Lowered v = lookup(op.yield_id);
          if (!v.spec.is_replicated())
            throw InternalError("atomic over a non-replicated value %" +
                                op.yield_id);
          v.global = op.result_type;
          values[op.id] = std::move(v);
          break;
        }
        case OpKind::kSliceAxis:
          lower_slice_axis(op);
          break;
        default:
          lower_base(op);
          break;
      }
    }
  }

  void lower_loop(const Operation& loop, int depth) {
    index_axis[loop.index_var] = loop.axis;
    loop_stack.push_back({loop.axis, depth + 1});
    lower_region(loop.body, depth + 1);
    loop_stack.pop_back();

    Lowered yv = lookup(loop.yield_id);
    if (loop.kind == OpKind::kTile) {
      if (!yv.spec.pending_sum.empty())
        throw InternalError("tile loop %" + loop.id +
                            " yields a pending sum");
      Lowered r = yv;
      const std::string& have = r.spec.dim_axes[loop.dim];
      if (have == loop.axis) {
        r.acq[loop.dim] = 0;  // now pure distribution
      } else if (have.empty() && !r.spec.has_axis(loop.axis)) {
        r.spec.dim_axes[loop.dim] = loop.axis;
        r.acq[loop.dim] = 0;
      } else {
        throw InternalError("tile loop %" + loop.id +
                            " cannot re-tag its concat dim");
      }
      r.global = loop.result_type;
      if (r.local(p.mesh) != yv.local(p.mesh))
        throw InternalError("tile loop %" + loop.id +
                            " local shape mismatch at yield");
      // Any other entry acquired at the closing depth would be a same-axis
      // nesting violation; entries from enclosing loops stay valid.
      values[loop.id] = std::move(r);
      register_type(values[loop.id].spmd_id, values[loop.id]);
    } else {
      // Per-iteration results sum across the axis: local compute followed
      // by one all_reduce. Iteration-live dim entries on the loop's own
      // axis vanish (the reduce mixes the chunks into a chunk-shaped sum).
      Lowered v = yv;
      v.spec.add_pending(loop.axis);
      for (size_t d = 0; d < v.spec.dim_axes.size(); ++d) {
        if (v.spec.dim_axes[d] == loop.axis) {
          v.spec.dim_axes[d].clear();
          v.acq[d] = 0;
        }
      }
      v.global = loop.result_type;
      register_type(v.spmd_id, v);  // operand now typed with the pending sum
      emit_all_reduce(v, loop.axis, loop.id);
      values[loop.id] = std::move(v);
    }
  }

  void lower_slice_axis(const Operation& op) {
    auto ia = index_axis.find(op.index_var);
    if (ia == index_axis.end())
      throw InternalError("slice_axis with unbound index %" + op.index_var);
    const std::string& axis = ia->second;
    int bound = binding_depth(axis);
    Lowered& src = lookup(op.operands[0]);

    if (src.spec.dim_axes[op.dim] == axis) {
      // The local chunk already is the requested slice.
      Lowered r = src;
      r.acq[op.dim] = bound;  // iteration-live from here on
      values[op.id] = std::move(r);
      return;
    }
    // Conflicting distribution on the sliced dim: replicate it first.
    // Gathers update the stored record so later consumers reuse the buffer.
    if (!src.spec.dim_axes[op.dim].empty()) {
      int b2 = binding_depth(src.spec.dim_axes[op.dim]);
      if (b2 >= 1 && src.acq[op.dim] == b2)
        throw InternalError("slice_axis over an iteration-live dim of %" +
                            op.operands[0]);
      emit_gather(src, op.dim);
    }
    // The axis already shards another dim: only a distribution entry can be
    // gathered away; an iteration-live one is a nesting bug.
    for (size_t d = 0; d < src.spec.dim_axes.size(); ++d) {
      if (src.spec.dim_axes[d] != axis) continue;
      if (bound >= 1 && src.acq[d] == bound)
        throw InternalError("slice_axis re-slices axis \"" + axis +
                            "\" already live on %" + op.operands[0]);
      emit_gather(src, static_cast<int>(d));
    }

    Operation s;
    s.id = op.id;
    s.kind = OpKind::kSliceByCoord;
    s.operands = {src.spmd_id};
    s.axis = axis;
    s.dim = op.dim;
    Lowered r = src;
    r.spec.dim_axes[op.dim] = axis;
    r.acq[op.dim] = bound;
    r.spmd_id = op.id;
    s.result_type = TensorType{r.local(p.mesh)};
    register_type(op.id, r);
    out.ops.push_back(std::move(s));
    values[op.id] = std::move(r);
  }

  void lower_base(const Operation& op) {
    // Fix up operands so local execution matches per-iteration semantics.
    std::vector<Lowered*> ins;
    ins.reserve(op.operands.size());
    for (const std::string& o : op.operands) {
      Lowered& v = lookup(o);
      materialize_for_direct_use(v);
      ins.push_back(&v);
    }

    // Instantiate the registry on per-iteration shapes to map sharded dims
    // of the operands onto the result.
    std::vector<TensorType> per_iter_types;
    per_iter_types.reserve(ins.size());
    for (Lowered* v : ins) per_iter_types.push_back(v->global);

    Lowered r;
    r.spmd_id = op.id;
    r.global = op.result_type;
    r.spec = ShardingSpec::replicated(op.result_type.rank());
    r.acq.assign(op.result_type.rank(), 0);
    for (Lowered* v : ins)
      for (const std::string& a : v->spec.pending_sum) r.spec.add_pending(a);

    if (op.kind != OpKind::kConstant) {
      PropagationRule rule = rule_for(op, per_iter_types);
      for (size_t i = 0; i < ins.size(); ++i) {
        const Lowered& v = *ins[i];
        for (size_t d = 0; d < v.spec.dim_axes.size(); ++d) {
          const std::string& axis = v.spec.dim_axes[d];
          if (axis.empty()) continue;
          const DimClass* c =
              rule.class_of(static_cast<int>(i), static_cast<int>(d));
          if (c == nullptr)
            throw InternalError("lowering: sharded dim without a rule class");
          switch (c->role) {
            case DimRole::kPassThrough: {
              std::string& slot = r.spec.dim_axes[*c->result_dim];
              if (!slot.empty() && slot != axis)
                throw InternalError(
                    "lowering: conflicting axes reach one result dim of %" +
                    op.id);
              slot = axis;
              r.acq[*c->result_dim] = v.acq[d];
              break;
            }
            case DimRole::kContracting:
              // The sliced dim contracts away per iteration; the relation
              // to the enclosing sum materializes at the sum-loop exit.
              break;
            case DimRole::kBlocked:
              throw InternalError(
                  "lowering: sharded dim through a blocked class of %" +
                  op.id);
          }
        }
      }
    }

    Operation local = op;
    for (size_t i = 0; i < ins.size(); ++i) local.operands[i] = ins[i]->spmd_id;
    // Execute on local shapes; the per-iteration type divided by the
    // surviving dim shards.
    local.result_type = TensorType{r.local(p.mesh)};
    register_type(op.id, r);
    out.ops.push_back(std::move(local));
    values[op.id] = std::move(r);
  }
};

}  // namespace

SpmdProgram lower_to_spmd(const Program& p) {
  validate(p);
  LowerState state(p);
  state.out.name = p.name;
  state.out.mesh = p.mesh;
  state.out.result_id = p.result_id;

  // Argument sharding: an argument whose uses are all slice_axis with one
  // consistent (dim, axis) is stored sharded; anything else stays
  // replicated (mixed or whole-value uses need the full tensor somewhere).
  struct Demand {
    std::set<std::pair<int, std::string>> slices;
    bool direct = false;
  };
  std::map<std::string, Demand> demands;
  for (const Argument& a : p.args) demands[a.id];
  {
    std::map<std::string, std::string> index_axis;
    std::function<void(const std::vector<Operation>&)> scan =
        [&](const std::vector<Operation>& ops) {
          for (const Operation& op : ops) {
            if (is_loop_kind(op.kind)) index_axis[op.index_var] = op.axis;
            if (op.kind == OpKind::kSliceAxis) {
              auto it = demands.find(op.operands[0]);
              if (it != demands.end())
                it->second.slices.insert({op.dim, index_axis[op.index_var]});
            } else {
              for (const std::string& o : op.operands) {
                auto it = demands.find(o);
                if (it != demands.end()) it->second.direct = true;
              }
              if (op.has_region() && op.yield_id != "" ) {
                auto it = demands.find(op.yield_id);
                if (it != demands.end()) it->second.direct = true;
              }
            }
            if (op.has_region()) scan(op.body);
          }
        };
    scan(p.ops);
  }

  for (const Argument& a : p.args) {
    const Demand& d = demands[a.id];
    Lowered v;
    v.spmd_id = a.id;
    v.global = a.type;
    v.spec = ShardingSpec::replicated(a.type.rank());
    v.acq.assign(a.type.rank(), 0);
    if (!d.direct && d.slices.size() == 1) {
      auto [dim, axis] = *d.slices.begin();
      if (!axis.empty() &&
          a.type.shape[dim] % p.mesh.axis_size(axis) == 0) {
        v.spec.dim_axes[dim] = axis;
      }
    }
    SpmdArg arg;
    arg.id = a.id;
    arg.type = {a.type, v.spec};
    arg.scope = a.scope;
    state.out.args.push_back(std::move(arg));
    state.register_type(a.id, v);
    state.values[a.id] = std::move(v);
  }

  state.lower_region(p.ops, 0);

  // The returned value must not carry pending sums; sharded dims are fine
  // (the output sharding spec reports them).
  Lowered& res = state.lookup(p.result_id);
  while (!res.spec.pending_sum.empty())
    state.emit_all_reduce(res, res.spec.pending_sum.front(), "");
  state.out.result_id = res.spmd_id;

  return std::move(state.out);
}

CollectiveStats collective_stats(const SpmdProgram& sp) {
  CollectiveStats stats;
  for (const Operation& op : sp.ops) {
    switch (op.kind) {
      case OpKind::kAllReduce: {
        auto& e = stats.all_reduce[op.axis];
        e.count += 1;
        e.bytes += sp.type_of(op.operands[0]).global.byte_size();
        break;
      }
      case OpKind::kAllGather: {
        auto& e = stats.all_gather[op.axis];
        e.count += 1;
        int64_t local_bytes = 4;
        const DistType& t = sp.type_of(op.operands[0]);
        for (int64_t d : t.local(sp.mesh)) local_bytes *= d;
        e.bytes += local_bytes * (sp.mesh.axis_size(op.axis) - 1);
        break;
      }
      case OpKind::kSliceByCoord: {
        auto& e = stats.slice_by_coord[op.axis];
        e.count += 1;
        break;
      }
      default:
        break;
    }
  }
  return stats;
}

int64_t CollectiveStats::all_reduce_count() const {
  int64_t n = 0;
  for (auto& [axis, e] : all_reduce) n += e.count;
  return n;
}
int64_t CollectiveStats::all_gather_count() const {
  int64_t n = 0;
  for (auto& [axis, e] : all_gather) n += e.count;
  return n;
}
int64_t CollectiveStats::all_reduce_bytes() const {
  int64_t n = 0;
  for (auto& [axis, e] : all_reduce) n += e.bytes;
  return n;
}
int64_t CollectiveStats::all_gather_bytes() const {
  int64_t n = 0;
  for (auto& [axis, e] : all_gather) n += e.bytes;
  return n;
}

std::string to_string(const DistType& t) {
  std::string out = "f32[";
  for (size_t i = 0; i < t.global.shape.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(t.global.shape[i]);
    if (!t.spec.dim_axes[i].empty())
      out += "{\"" + t.spec.dim_axes[i] + "\"}";
  }
  out += ']';
  if (!t.spec.pending_sum.empty()) {
    out += " psum{";
    for (size_t i = 0; i < t.spec.pending_sum.size(); ++i) {
      if (i > 0) out += ',';
      out += "\"" + t.spec.pending_sum[i] + "\"";
    }
    out += '}';
  }
  return out;
}

std::string print_spmd(const SpmdProgram& sp) {
  std::string out;
  if (!sp.mesh.axes.empty()) {
    out += "mesh { ";
    for (size_t i = 0; i < sp.mesh.axes.size(); ++i) {
      if (i > 0) out += ", ";
      out += "\"" + sp.mesh.axes[i].name +
             "\" = " + std::to_string(sp.mesh.axes[i].size);
    }
    out += " }\n";
  }
  out += "spmd_func @" + sp.name + "(";
  for (size_t i = 0; i < sp.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += "%" + sp.args[i].id + ": " + to_string(sp.args[i].type);
  }
  out += ") -> " + to_string(sp.type_of(sp.result_id)) + " {\n";
  for (const Operation& op : sp.ops) {
    out += "  %" + op.id + " = " + std::string(kind_name(op.kind)) + "(";
    for (size_t i = 0; i < op.operands.size(); ++i) {
      if (i > 0) out += ", ";
      out += "%" + op.operands[i];
    }
    out += ")";
    switch (op.kind) {
      case OpKind::kAllReduce:
        out += " {axis=\"" + op.axis + "\"}";
        break;
      case OpKind::kAllGather:
      case OpKind::kSliceByCoord:
        out += " {axis=\"" + op.axis + "\", dim=" + std::to_string(op.dim) +
               "}";
        break;
      case OpKind::kConstant:
        out += " {value=" + std::to_string(op.value) + "}";
        break;
      default:
        break;
    }
    out += " : " + to_string(sp.type_of(op.id));
    out += "  // local " + to_string(op.result_type);
    out += "\n";
  }
  out += "  return %" + sp.result_id + "\n}\n";
  return out;
}

std::string format_stats(const CollectiveStats& stats) {
  std::string out;
  out += "collective      axis        count       bytes\n";
  auto row = [&](const char* kind, const std::string& axis, int64_t count,
                 int64_t bytes) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-15s %-10s %6lld %11lld\n", kind,
                  axis.c_str(), static_cast<long long>(count),
                  static_cast<long long>(bytes));
    out += buf;
  };
  for (auto& [axis, e] : stats.all_reduce)
    row("all_reduce", axis, e.count, e.bytes);
  for (auto& [axis, e] : stats.all_gather)
    row("all_gather", axis, e.count, e.bytes);
  for (auto& [axis, e] : stats.slice_by_coord)
    row("slice_by_coord", axis, e.count, e.bytes);
  if (stats.all_reduce.empty() && stats.all_gather.empty() &&
      stats.slice_by_coord.empty())
    out += "(none)\n";
  return out;
}

}  // namespace partir
