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

#include "partir/interp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "partir/error.h"

namespace partir {
namespace {

int64_t product(const std::vector<int64_t>& dims) {
  int64_t n = 1;
  for (int64_t d : dims) n *= d;
  return n;
}

// Row-major strides.
std::vector<int64_t> strides_of(const std::vector<int64_t>& shape) {
  std::vector<int64_t> s(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * shape[i + 1];
  return s;
}

// Advances a multi-index in row-major order; returns false on wrap-around.
bool next_index(std::vector<int64_t>& idx, const std::vector<int64_t>& shape) {
  for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
    if (++idx[i] < shape[i]) return true;
    idx[i] = 0;
  }
  return false;
}

}  // namespace

DenseTensor DenseTensor::zeros(const std::vector<int64_t>& shape) {
  DenseTensor t;
  t.shape = shape;
  t.data.assign(product(shape), 0.f);
  return t;
}

DenseTensor DenseTensor::splat(const std::vector<int64_t>& shape,
                               float value) {
  DenseTensor t;
  t.shape = shape;
  t.data.assign(product(shape), value);
  return t;
}

DenseTensor DenseTensor::random(const std::vector<int64_t>& shape,
                                uint64_t seed) {
  DenseTensor t;
  t.shape = shape;
  t.data.resize(product(shape));
  std::mt19937_64 rng(seed);
  for (float& v : t.data) {
    // 2^-63 scaling keeps the draw independent of float distribution
    // implementation differences across standard libraries.
    uint64_t bits = rng();
    v = static_cast<float>(static_cast<int64_t>(bits) * 1.0843e-19) ;
  }
  return t;
}

void write_tensor_file(const std::string& path, const DenseTensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  uint32_t rank = static_cast<uint32_t>(t.shape.size());
  out.write(reinterpret_cast<const char*>(&rank), 4);
  for (int64_t d : t.shape) {
    uint32_t u = static_cast<uint32_t>(d);
    out.write(reinterpret_cast<const char*>(&u), 4);
  }
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * 4));
}

DenseTensor read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  uint32_t rank = 0;
  in.read(reinterpret_cast<char*>(&rank), 4);
  if (!in || rank > 4) throw Error("malformed tensor file " + path);
  DenseTensor t;
  for (uint32_t i = 0; i < rank; ++i) {
    uint32_t d = 0;
    in.read(reinterpret_cast<char*>(&d), 4);
    if (!in || d == 0) throw Error("malformed tensor file " + path);
    t.shape.push_back(d);
  }
  t.data.resize(product(t.shape));
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * 4));
  if (!in) throw Error("truncated tensor file " + path);
  return t;
}

namespace {

[[noreturn]] void shape_error(const Operation& op, const std::string& msg) {
  throw ValidationError("eval %" + op.id + ": " + msg);
}

DenseTensor eval_pointwise(const Operation& op,
                           const std::vector<const DenseTensor*>& ins) {
  const DenseTensor& a = *ins[0];
  DenseTensor out = DenseTensor::zeros(a.shape);
  size_t n = a.data.size();
  switch (op.kind) {
    case OpKind::kNeg:
      for (size_t i = 0; i < n; ++i) out.data[i] = -a.data[i];
      break;
    case OpKind::kExp:
      for (size_t i = 0; i < n; ++i) out.data[i] = std::exp(a.data[i]);
      break;
    case OpKind::kTanh:
      for (size_t i = 0; i < n; ++i) out.data[i] = std::tanh(a.data[i]);
      break;
    case OpKind::kRsqrt:
      for (size_t i = 0; i < n; ++i)
        out.data[i] = 1.0f / std::sqrt(a.data[i]);
      break;
    default: {
      const DenseTensor& b = *ins[1];
      if (a.shape != b.shape) shape_error(op, "operand shape mismatch");
      switch (op.kind) {
        case OpKind::kAdd:
          for (size_t i = 0; i < n; ++i) out.data[i] = a.data[i] + b.data[i];
          break;
        case OpKind::kSub:
          for (size_t i = 0; i < n; ++i) out.data[i] = a.data[i] - b.data[i];
          break;
        case OpKind::kMul:
          for (size_t i = 0; i < n; ++i) out.data[i] = a.data[i] * b.data[i];
          break;
        case OpKind::kDiv:
          for (size_t i = 0; i < n; ++i) out.data[i] = a.data[i] / b.data[i];
          break;
        case OpKind::kMaximum:
          for (size_t i = 0; i < n; ++i)
            out.data[i] = std::max(a.data[i], b.data[i]);
          break;
        default:
          shape_error(op, "not pointwise");
      }
    }
  }
  return out;
}

DenseTensor eval_dot(const Operation& op, const DenseTensor& lhs,
                     const DenseTensor& rhs) {
  const DotDims& dd = op.dot;
  std::set<int> lhs_used(dd.lhs_batch.begin(), dd.lhs_batch.end());
  lhs_used.insert(dd.lhs_contract.begin(), dd.lhs_contract.end());
  std::set<int> rhs_used(dd.rhs_batch.begin(), dd.rhs_batch.end());
  rhs_used.insert(dd.rhs_contract.begin(), dd.rhs_contract.end());
  std::vector<int> lhs_free, rhs_free;
  for (int i = 0; i < static_cast<int>(lhs.shape.size()); ++i)
    if (!lhs_used.count(i)) lhs_free.push_back(i);
  for (int i = 0; i < static_cast<int>(rhs.shape.size()); ++i)
    if (!rhs_used.count(i)) rhs_free.push_back(i);

  std::vector<int64_t> batch_dims, lfree_dims, rfree_dims, contract_dims;
  for (int d : dd.lhs_batch) batch_dims.push_back(lhs.shape[d]);
  for (int d : lhs_free) lfree_dims.push_back(lhs.shape[d]);
  for (int d : rhs_free) rfree_dims.push_back(rhs.shape[d]);
  for (int d : dd.lhs_contract) contract_dims.push_back(lhs.shape[d]);

  DenseTensor out;
  out.shape = batch_dims;
  out.shape.insert(out.shape.end(), lfree_dims.begin(), lfree_dims.end());
  out.shape.insert(out.shape.end(), rfree_dims.begin(), rfree_dims.end());
  out.data.resize(product(out.shape));

  std::vector<int64_t> lstr = strides_of(lhs.shape);
  std::vector<int64_t> rstr = strides_of(rhs.shape);

  std::vector<int64_t> bidx(batch_dims.size(), 0);
  int64_t out_pos = 0;
  do {
    std::vector<int64_t> lidx(lfree_dims.size(), 0);
    do {
      std::vector<int64_t> ridx(rfree_dims.size(), 0);
      do {
        // Fixed ascending (row-major) contraction order.
        float acc = 0.f;
        std::vector<int64_t> cidx(contract_dims.size(), 0);
        do {
          int64_t lpos = 0, rpos = 0;
          for (size_t i = 0; i < bidx.size(); ++i) {
            lpos += bidx[i] * lstr[dd.lhs_batch[i]];
            rpos += bidx[i] * rstr[dd.rhs_batch[i]];
          }
          for (size_t i = 0; i < lidx.size(); ++i)
            lpos += lidx[i] * lstr[lhs_free[i]];
          for (size_t i = 0; i < ridx.size(); ++i)
            rpos += ridx[i] * rstr[rhs_free[i]];
          for (size_t i = 0; i < cidx.size(); ++i) {
            lpos += cidx[i] * lstr[dd.lhs_contract[i]];
            rpos += cidx[i] * rstr[dd.rhs_contract[i]];
          }
          acc += lhs.data[lpos] * rhs.data[rpos];
        } while (next_index(cidx, contract_dims));
        out.data[out_pos++] = acc;
      } while (next_index(ridx, rfree_dims));
    } while (next_index(lidx, lfree_dims));
  } while (next_index(bidx, batch_dims));
  return out;
}

DenseTensor eval_reduce(const Operation& op, const DenseTensor& in) {
  std::set<int> reduced(op.dims.begin(), op.dims.end());
  std::vector<int> kept, red;
  for (int i = 0; i < static_cast<int>(in.shape.size()); ++i)
    (reduced.count(i) ? red : kept).push_back(i);
  std::vector<int64_t> kept_dims, red_dims;
  for (int d : kept) kept_dims.push_back(in.shape[d]);
  for (int d : red) red_dims.push_back(in.shape[d]);
  DenseTensor out;
  out.shape = kept_dims;
  out.data.resize(product(kept_dims));
  std::vector<int64_t> istr = strides_of(in.shape);
  std::vector<int64_t> kidx(kept.size(), 0);
  int64_t out_pos = 0;
  do {
    bool first = true;
    float acc = 0.f;
    std::vector<int64_t> ridx(red.size(), 0);
    do {
      int64_t pos = 0;
      for (size_t i = 0; i < kidx.size(); ++i) pos += kidx[i] * istr[kept[i]];
      for (size_t i = 0; i < ridx.size(); ++i) pos += ridx[i] * istr[red[i]];
      float v = in.data[pos];
      if (op.kind == OpKind::kReduceSum) {
        acc += v;
      } else {
        acc = first ? v : std::max(acc, v);
      }
      first = false;
    } while (next_index(ridx, red_dims));
    out.data[out_pos++] = acc;
  } while (next_index(kidx, kept_dims));
  return out;
}

DenseTensor eval_transpose(const Operation& op, const DenseTensor& in) {
  DenseTensor out;
  for (int d : op.dims) out.shape.push_back(in.shape[d]);
  out.data.resize(in.data.size());
  std::vector<int64_t> istr = strides_of(in.shape);
  std::vector<int64_t> oidx(out.shape.size(), 0);
  int64_t out_pos = 0;
  if (in.data.empty()) return out;
  do {
    int64_t pos = 0;
    for (size_t i = 0; i < oidx.size(); ++i) pos += oidx[i] * istr[op.dims[i]];
    out.data[out_pos++] = in.data[pos];
  } while (next_index(oidx, out.shape));
  return out;
}

DenseTensor eval_broadcast(const Operation& op, const DenseTensor& in,
                           const std::vector<int64_t>& out_shape) {
  DenseTensor out = DenseTensor::zeros(out_shape);
  std::vector<int64_t> istr = strides_of(in.shape);
  std::vector<int64_t> oidx(out_shape.size(), 0);
  int64_t out_pos = 0;
  do {
    int64_t pos = 0;
    for (size_t i = 0; i < op.dims.size(); ++i)
      pos += oidx[op.dims[i]] * istr[i];
    out.data[out_pos++] = in.data[pos];
  } while (next_index(oidx, out_shape));
  return out;
}

DenseTensor eval_slice(const DenseTensor& in, const std::vector<int64_t>& start,
                       const std::vector<int64_t>& limit) {
  DenseTensor out;
  for (size_t i = 0; i < start.size(); ++i)
    out.shape.push_back(limit[i] - start[i]);
  out.data.resize(product(out.shape));
  std::vector<int64_t> istr = strides_of(in.shape);
  std::vector<int64_t> oidx(out.shape.size(), 0);
  int64_t out_pos = 0;
  do {
    int64_t pos = 0;
    for (size_t i = 0; i < oidx.size(); ++i)
      pos += (oidx[i] + start[i]) * istr[i];
    out.data[out_pos++] = in.data[pos];
  } while (next_index(oidx, out.shape));
  return out;
}

DenseTensor eval_concat(const Operation& op,
                        const std::vector<const DenseTensor*>& ins) {
  DenseTensor out;
  out.shape = ins[0]->shape;
  for (size_t i = 1; i < ins.size(); ++i)
    out.shape[op.dim] += ins[i]->shape[op.dim];
  out.data.resize(product(out.shape));
  std::vector<int64_t> ostr = strides_of(out.shape);
  int64_t offset = 0;
  for (const DenseTensor* t : ins) {
    std::vector<int64_t> idx(t->shape.size(), 0);
    std::vector<int64_t> tstr = strides_of(t->shape);
    if (t->data.empty()) continue;
    do {
      int64_t ipos = 0, opos = 0;
      for (size_t i = 0; i < idx.size(); ++i) {
        ipos += idx[i] * tstr[i];
        int64_t oi = idx[i] + (static_cast<int>(i) == op.dim ? offset : 0);
        opos += oi * ostr[i];
      }
      out.data[opos] = t->data[ipos];
    } while (next_index(idx, t->shape));
    offset += t->shape[op.dim];
  }
  return out;
}

// Chunk `index` of `dim` when split into `count` equal parts.
DenseTensor slice_chunk(const DenseTensor& in, int dim, int64_t index,
                        int64_t count) {
  std::vector<int64_t> start(in.shape.size(), 0);
  std::vector<int64_t> limit = in.shape;
  int64_t chunk = in.shape[dim] / count;
  start[dim] = index * chunk;
  limit[dim] = (index + 1) * chunk;
  return eval_slice(in, start, limit);
}

DenseTensor eval_base_op(const Operation& op,
                         const std::vector<const DenseTensor*>& ins) {
  switch (op.kind) {
    case OpKind::kConstant:
      return DenseTensor::splat(op.result_type.shape,
                                static_cast<float>(op.value));
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kDiv:
    case OpKind::kMaximum:
    case OpKind::kNeg:
    case OpKind::kExp:
    case OpKind::kTanh:
    case OpKind::kRsqrt:
      return eval_pointwise(op, ins);
    case OpKind::kDot:
      return eval_dot(op, *ins[0], *ins[1]);
    case OpKind::kReduceSum:
    case OpKind::kReduceMax:
      return eval_reduce(op, *ins[0]);
    case OpKind::kTranspose:
      return eval_transpose(op, *ins[0]);
    case OpKind::kReshape: {
      DenseTensor out = *ins[0];
      out.shape = op.result_type.shape;
      return out;
    }
    case OpKind::kBroadcastInDim:
      return eval_broadcast(op, *ins[0], op.result_type.shape);
    case OpKind::kSlice:
      return eval_slice(*ins[0], op.start, op.limit);
    case OpKind::kConcatenate:
      return eval_concat(op, ins);
    default:
      shape_error(op, "not a base op");
  }
}

// Elementwise in-place accumulation, ascending index order.
void accumulate(DenseTensor& acc, const DenseTensor& v) {
  for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += v.data[i];
}

struct BaseEvaluator {
  const Program& p;
  Env env;
  std::map<std::string, int64_t> index_bindings;

  const DenseTensor& value(const Operation& op, const std::string& id) {
    auto it = env.find(id);
    if (it == env.end()) shape_error(op, "undefined value %" + id);
    return it->second;
  }

  void run_ops(const std::vector<Operation>& ops) {
    for (const Operation& op : ops) {
      switch (op.kind) {
        case OpKind::kTile: {
          int64_t count = p.mesh.axis_size(op.axis);
          std::vector<DenseTensor> parts;
          parts.reserve(count);
          for (int64_t i = 0; i < count; ++i) {
            index_bindings[op.index_var] = i;
            run_ops(op.body);
            parts.push_back(env.at(op.yield_id));
          }
          index_bindings.erase(op.index_var);
          // Concatenate chunks in ascending iteration order.
          std::vector<const DenseTensor*> refs;
          for (const DenseTensor& t : parts) refs.push_back(&t);
          if (count == 1) {
            env[op.id] = parts[0];
          } else {
            Operation concat;
            concat.kind = OpKind::kConcatenate;
            concat.dim = op.dim;
            env[op.id] = eval_concat(concat, refs);
          }
          break;
        }
        case OpKind::kSum: {
          int64_t count = p.mesh.axis_size(op.axis);
          DenseTensor acc;
          for (int64_t i = 0; i < count; ++i) {
            index_bindings[op.index_var] = i;
            run_ops(op.body);
            if (i == 0) acc = env.at(op.yield_id);
            else accumulate(acc, env.at(op.yield_id));
          }
          index_bindings.erase(op.index_var);
          env[op.id] = std::move(acc);
          break;
        }
        case OpKind::kAtomic: {
          env[op.id] = value(op, op.yield_id);
          break;
        }
        case OpKind::kSliceAxis: {
          auto it = index_bindings.find(op.index_var);
          if (it == index_bindings.end())
            shape_error(op, "unbound index %" + op.index_var);
          const DenseTensor& in = value(op, op.operands[0]);
          int64_t chunk = op.result_type.shape[op.dim];
          int64_t count = in.shape[op.dim] / chunk;
          env[op.id] = slice_chunk(in, op.dim, it->second, count);
          break;
        }
        default: {
          std::vector<const DenseTensor*> ins;
          ins.reserve(op.operands.size());
          for (const std::string& o : op.operands)
            ins.push_back(&value(op, o));
          env[op.id] = eval_base_op(op, ins);
          break;
        }
      }
    }
  }
};

}  // namespace

Env eval_base_env(const Program& p, const std::vector<DenseTensor>& inputs) {
  if (inputs.size() != p.args.size())
    throw ValidationError("expected " + std::to_string(p.args.size()) +
                          " inputs, got " + std::to_string(inputs.size()));
  BaseEvaluator ev{p, {}, {}};
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].shape != p.args[i].type.shape)
      throw ValidationError("input " + std::to_string(i) +
                            " shape does not match argument %" + p.args[i].id);
    ev.env[p.args[i].id] = inputs[i];
  }
  ev.run_ops(p.ops);
  return std::move(ev.env);
}

DenseTensor eval_base(const Program& p,
                      const std::vector<DenseTensor>& inputs) {
  Env env = eval_base_env(p, inputs);
  return env.at(p.result_id);
}

DenseTensor eval_spmd(const SpmdProgram& sp,
                      const std::vector<DenseTensor>& inputs) {
  const Mesh& mesh = sp.mesh;
  std::vector<DeviceCoord> coords = all_device_coords(mesh);
  size_t n_dev = coords.size();
  if (inputs.size() != sp.args.size())
    throw ValidationError("expected " + std::to_string(sp.args.size()) +
                          " inputs, got " + std::to_string(inputs.size()));

  // Shard the global inputs.
  std::vector<Env> envs(n_dev);
  for (size_t a = 0; a < sp.args.size(); ++a) {
    const SpmdArg& arg = sp.args[a];
    if (inputs[a].shape != arg.type.global.shape)
      throw ValidationError("input " + std::to_string(a) +
                            " does not match global shape of %" + arg.id);
    for (size_t d = 0; d < n_dev; ++d) {
      DenseTensor local = inputs[a];
      for (size_t dim = 0; dim < arg.type.spec.dim_axes.size(); ++dim) {
        const std::string& axis = arg.type.spec.dim_axes[dim];
        if (axis.empty()) continue;
        int ai = mesh.axis_index(axis);
        local = slice_chunk(local, static_cast<int>(dim),
                            coords[d].index[ai], mesh.axes[ai].size);
      }
      envs[d][arg.id] = std::move(local);
    }
  }

  // Lockstep execution: each op runs on every device before the next op;
  // collectives read operand buffers across the group, then write.
  for (const Operation& op : sp.ops) {
    switch (op.kind) {
      case OpKind::kAllReduce:
      case OpKind::kAllGather: {
        int ai = mesh.axis_index(op.axis);
        int64_t group = mesh.axes[ai].size;
        std::vector<DenseTensor> results(n_dev);
        for (size_t d = 0; d < n_dev; ++d) {
          // Peers share every coordinate except the collective's axis.
          // Ascending coordinate order fixes the reduction order.
          std::vector<size_t> peers;
          for (int64_t m = 0; m < group; ++m) {
            DeviceCoord c = coords[d];
            c.index[ai] = m;
            for (size_t e = 0; e < n_dev; ++e)
              if (coords[e] == c) peers.push_back(e);
          }
          const DenseTensor& mine = envs[d].at(op.operands[0]);
          if (op.kind == OpKind::kAllReduce) {
            DenseTensor acc = envs[peers[0]].at(op.operands[0]);
            for (size_t i = 1; i < peers.size(); ++i)
              accumulate(acc, envs[peers[i]].at(op.operands[0]));
            results[d] = std::move(acc);
          } else {
            std::vector<const DenseTensor*> refs;
            for (size_t peer : peers)
              refs.push_back(&envs[peer].at(op.operands[0]));
            Operation concat;
            concat.kind = OpKind::kConcatenate;
            concat.dim = op.dim;
            results[d] = group == 1 ? mine : eval_concat(concat, refs);
          }
        }
        for (size_t d = 0; d < n_dev; ++d)
          envs[d][op.id] = std::move(results[d]);
        break;
      }
      case OpKind::kSliceByCoord: {
        int ai = mesh.axis_index(op.axis);
        for (size_t d = 0; d < n_dev; ++d) {
          const DenseTensor& in = envs[d].at(op.operands[0]);
          envs[d][op.id] = slice_chunk(in, op.dim, coords[d].index[ai],
                                       mesh.axes[ai].size);
        }
        break;
      }
      default: {
        for (size_t d = 0; d < n_dev; ++d) {
          std::vector<const DenseTensor*> ins;
          for (const std::string& o : op.operands) {
            auto it = envs[d].find(o);
            if (it == envs[d].end())
              throw InternalError("spmd eval: undefined value %" + o);
            ins.push_back(&it->second);
          }
          DenseTensor r = eval_base_op(op, ins);
          if (r.shape != op.result_type.shape)
            throw InternalError("spmd eval divergence: op %" + op.id +
                                " produced " +
                                to_string(TensorType{r.shape}) +
                                ", expected local " +
                                to_string(op.result_type));
          envs[d][op.id] = std::move(r);
        }
        break;
      }
    }
  }

  // Reassemble the sharded result; check replica agreement.
  const DistType& rt = sp.type_of(sp.result_id);
  if (!rt.spec.pending_sum.empty())
    throw InternalError("result carries pending sums after lowering");
  DenseTensor out = DenseTensor::zeros(rt.global.shape);
  std::vector<int64_t> ostr = strides_of(out.shape);
  std::vector<bool> written(out.data.size(), false);
  std::vector<int64_t> chunk = rt.local(mesh);
  for (size_t d = 0; d < n_dev; ++d) {
    const DenseTensor& local = envs[d].at(sp.result_id);
    if (local.shape != chunk)
      throw InternalError("result local shape mismatch on a device");
    // Offset of this device's chunk in the global tensor.
    std::vector<int64_t> offset(out.shape.size(), 0);
    for (size_t dim = 0; dim < rt.spec.dim_axes.size(); ++dim) {
      const std::string& axis = rt.spec.dim_axes[dim];
      if (axis.empty()) continue;
      int ai = mesh.axis_index(axis);
      offset[dim] = coords[d].index[ai] * chunk[dim];
    }
    std::vector<int64_t> idx(local.shape.size(), 0);
    int64_t lpos = 0;
    bool more = !local.data.empty();
    while (more) {
      int64_t opos = 0;
      for (size_t i = 0; i < idx.size(); ++i)
        opos += (idx[i] + offset[i]) * ostr[i];
      float mine = local.data[lpos];
      if (written[opos] &&
          std::memcmp(&out.data[opos], &mine, 4) != 0)
        throw InternalError("replica divergence in result %" + sp.result_id +
                            ": devices disagree on a shared element");
      out.data[opos] = mine;
      written[opos] = true;
      ++lpos;
      more = next_index(idx, local.shape);
    }
  }
  return out;
}

EquivalenceReport check_equivalence(const Program& p, const SpmdProgram& sp,
                                    int trials, uint64_t seed) {
  EquivalenceReport report;
  report.trials = trials;
  report.order_preserving = true;
  for (const Operation& op : sp.ops)
    if (op.kind == OpKind::kAllReduce) report.order_preserving = false;
  report.exact_pass = true;
  report.tol_pass = true;
  for (int t = 0; t < trials; ++t) {
    std::vector<DenseTensor> inputs;
    for (size_t a = 0; a < p.args.size(); ++a)
      inputs.push_back(DenseTensor::random(
          p.args[a].type.shape, seed * 1000003ull + t * 131ull + a));
    DenseTensor base = eval_base(p, inputs);
    DenseTensor dist = eval_spmd(sp, inputs);
    if (base.shape != dist.shape)
      throw InternalError("result shapes diverge between base and spmd");
    for (size_t i = 0; i < base.data.size(); ++i) {
      float a = base.data[i], b = dist.data[i];
      double diff = std::abs(static_cast<double>(a) - b);
      report.max_abs_diff = std::max(report.max_abs_diff, diff);
      if (std::memcmp(&a, &b, 4) != 0) {
        if (report.exact_pass) {
          report.first_divergence = "trial " + std::to_string(t) +
                                    ", element " + std::to_string(i);
        }
        report.exact_pass = false;
        double tol =
            1e-5 * std::max(std::abs(static_cast<double>(a)),
                            std::abs(static_cast<double>(b))) +
            1e-6;
        if (diff > tol) report.tol_pass = false;
      }
    }
  }
  report.pass = report.order_preserving ? report.exact_pass : report.tol_pass;
  return report;
}

}  // namespace partir
