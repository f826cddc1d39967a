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

#include "partir/printer.h"

#include <charconv>
#include <string>

namespace partir {

std::string format_f64(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

template <typename T>
std::string int_list(const std::vector<T>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  return out + "]";
}

std::string dot_attrs(const DotDims& d) {
  return "{contract=[" + int_list(d.lhs_contract) + "," +
         int_list(d.rhs_contract) + "], batch=[" + int_list(d.lhs_batch) +
         "," + int_list(d.rhs_batch) + "]}";
}

// Attribute braces for a base op, or "" when the op carries none.
std::string base_attrs(const Operation& op) {
  std::string inner;
  switch (op.kind) {
    case OpKind::kConstant:
      inner = "value=" + format_f64(op.value);
      break;
    case OpKind::kDot: {
      std::string d = dot_attrs(op.dot);
      inner = d.substr(1, d.size() - 2);  // strip outer braces
      break;
    }
    case OpKind::kReduceSum:
    case OpKind::kReduceMax:
      inner = "dims=" + int_list(op.dims);
      break;
    case OpKind::kTranspose:
      inner = "perm=" + int_list(op.dims);
      break;
    case OpKind::kBroadcastInDim:
      inner = "map=" + int_list(op.dims);
      break;
    case OpKind::kSlice:
      inner = "start=" + int_list(op.start) + ", limit=" + int_list(op.limit);
      break;
    case OpKind::kConcatenate:
      inner = "dim=" + std::to_string(op.dim);
      break;
    default:
      break;
  }
  if (!op.scope.empty()) {
    if (!inner.empty()) inner += ", ";
    inner += "scope=\"" + op.scope + "\"";
  }
  if (inner.empty()) return "";
  return "{" + inner + "}";
}

void print_ops(const std::vector<Operation>& ops, int indent,
               std::string& out) {
  std::string pad(indent, ' ');
  for (const Operation& op : ops) {
    switch (op.kind) {
      case OpKind::kTile: {
        out += pad + "%" + op.id + " = tile \"" + op.axis + "\" dim " +
               std::to_string(op.dim) + " (%" + op.index_var + ") {\n";
        print_ops(op.body, indent + 2, out);
        out += pad + "  yield %" + op.yield_id + "\n";
        out += pad + "} : " + to_string(op.result_type) + "\n";
        break;
      }
      case OpKind::kSum: {
        out += pad + "%" + op.id + " = sum \"" + op.axis + "\" (%" +
               op.index_var + ") {\n";
        print_ops(op.body, indent + 2, out);
        out += pad + "  yield %" + op.yield_id + "\n";
        out += pad + "} : " + to_string(op.result_type) + "\n";
        break;
      }
      case OpKind::kAtomic: {
        out += pad + "%" + op.id + " = atomic { yield %" + op.yield_id +
               " }\n";
        break;
      }
      case OpKind::kSliceAxis: {
        out += pad + "%" + op.id + " = slice_axis(%" + op.operands[0] +
               ", dim=" + std::to_string(op.dim) + ", %" + op.index_var +
               ") : " + to_string(op.result_type) + "\n";
        break;
      }
      default: {
        out += pad + "%" + op.id + " = " + std::string(kind_name(op.kind)) +
               "(";
        for (size_t i = 0; i < op.operands.size(); ++i) {
          if (i > 0) out += ", ";
          out += "%" + op.operands[i];
        }
        out += ")";
        std::string attrs = base_attrs(op);
        if (!attrs.empty()) out += " " + attrs;
        out += " : " + to_string(op.result_type) + "\n";
        break;
      }
    }
  }
}

}  // namespace

std::string print_program(const Program& p) {
  std::string out;
  if (!p.mesh.axes.empty()) {
    out += "mesh { ";
    for (size_t i = 0; i < p.mesh.axes.size(); ++i) {
      if (i > 0) out += ", ";
      out += "\"" + p.mesh.axes[i].name +
             "\" = " + std::to_string(p.mesh.axes[i].size);
    }
    out += " }\n";
  }
  out += "func @" + p.name + "(";
  for (size_t i = 0; i < p.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += "%" + p.args[i].id + ": " + to_string(p.args[i].type);
    if (!p.args[i].scope.empty())
      out += " {scope=\"" + p.args[i].scope + "\"}";
  }
  // Result type of the function is the type of the returned value.
  TensorType result_type;
  if (const Argument* a = p.find_arg(p.result_id)) {
    result_type = a->type;
  } else {
    for (const Operation& op : p.ops)
      if (op.id == p.result_id) result_type = op.result_type;
  }
  out += ") -> " + to_string(result_type) + " {\n";
  print_ops(p.ops, 2, out);
  out += "  return %" + p.result_id + "\n";
  out += "}\n";
  return out;
}

}  // namespace partir
