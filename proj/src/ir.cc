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

#include "partir/ir.h"

#include <array>
#include <charconv>
#include <utility>

namespace partir {
namespace {

struct KindName {
  OpKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 25> kKindNames = {{
    {OpKind::kConstant, "constant"},
    {OpKind::kAdd, "add"},
    {OpKind::kSub, "sub"},
    {OpKind::kMul, "mul"},
    {OpKind::kDiv, "div"},
    {OpKind::kNeg, "neg"},
    {OpKind::kExp, "exp"},
    {OpKind::kTanh, "tanh"},
    {OpKind::kRsqrt, "rsqrt"},
    {OpKind::kMaximum, "maximum"},
    {OpKind::kDot, "dot"},
    {OpKind::kReduceSum, "reduce_sum"},
    {OpKind::kReduceMax, "reduce_max"},
    {OpKind::kTranspose, "transpose"},
    {OpKind::kReshape, "reshape"},
    {OpKind::kBroadcastInDim, "broadcast_in_dim"},
    {OpKind::kSlice, "slice"},
    {OpKind::kConcatenate, "concatenate"},
    {OpKind::kTile, "tile"},
    {OpKind::kSum, "sum"},
    {OpKind::kAtomic, "atomic"},
    {OpKind::kSliceAxis, "slice_axis"},
    {OpKind::kAllReduce, "all_reduce"},
    {OpKind::kAllGather, "all_gather"},
    {OpKind::kSliceByCoord, "slice_by_coord"},
}};

}  // namespace

bool is_base_kind(OpKind kind) {
  return static_cast<int>(kind) < kNumBaseKinds;
}

bool is_pointwise_binary(OpKind kind) {
  switch (kind) {
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kDiv:
    case OpKind::kMaximum:
      return true;
    default:
      return false;
  }
}

bool is_pointwise_unary(OpKind kind) {
  switch (kind) {
    case OpKind::kNeg:
    case OpKind::kExp:
    case OpKind::kTanh:
    case OpKind::kRsqrt:
      return true;
    default:
      return false;
  }
}

bool is_loop_kind(OpKind kind) {
  return kind == OpKind::kTile || kind == OpKind::kSum;
}

std::string_view kind_name(OpKind kind) {
  for (const KindName& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "<unknown>";
}

std::optional<OpKind> kind_from_name(std::string_view name) {
  for (const KindName& k : kKindNames)
    if (k.name == name) return k.kind;
  return std::nullopt;
}

const Argument* Program::find_arg(std::string_view id) const {
  for (const Argument& a : args)
    if (a.id == id) return &a;
  return nullptr;
}

void walk(const std::vector<Operation>& ops,
          const std::function<void(const Operation&, int)>& visit,
          int depth) {
  for (const Operation& op : ops) {
    visit(op, depth);
    if (!op.body.empty()) walk(op.body, visit, depth + 1);
  }
}

void walk(const Program& p,
          const std::function<void(const Operation&, int)>& visit) {
  walk(p.ops, visit, 0);
}

int count_uses(const Program& p, std::string_view id) {
  int n = 0;
  walk(p, [&](const Operation& op, int) {
    for (const std::string& o : op.operands)
      if (o == id) ++n;
    if (op.has_region() && op.yield_id == id) ++n;
  });
  if (p.result_id == id) ++n;
  return n;
}

namespace {

// Largest N over ids matching <stem><N>, or -1.
int max_suffix(const Program& p, std::string_view stem) {
  int max_n = -1;
  auto consider = [&](const std::string& id) {
    if (id.size() <= stem.size() || id.compare(0, stem.size(), stem) != 0)
      return;
    int n = 0;
    auto first = id.data() + stem.size();
    auto last = id.data() + id.size();
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec == std::errc() && ptr == last && n > max_n) max_n = n;
  };
  for (const Argument& a : p.args) consider(a.id);
  walk(p, [&](const Operation& op, int) {
    consider(op.id);
    consider(op.index_var);
  });
  return max_n;
}

}  // namespace

NameGen::NameGen(const Program& p)
    : next_value_(max_suffix(p, "t") + 1), next_index_(max_suffix(p, "i") + 1) {}

}  // namespace partir
