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

#include "partir/registry.h"

#include <algorithm>
#include <set>

#include "partir/error.h"

namespace partir {

const DimClass* PropagationRule::class_of(int operand, int dim) const {
  for (const DimClass& c : classes)
    for (const DimClassMember& m : c.members)
      if (m.operand == operand && m.dim == dim) return &c;
  return nullptr;
}

const DimClass* PropagationRule::class_for_result(int dim) const {
  for (const DimClass& c : classes)
    if (c.role == DimRole::kPassThrough && c.result_dim == dim) return &c;
  return nullptr;
}

namespace {

DimClass pass_class(int result_dim, std::vector<DimClassMember> members) {
  DimClass c;
  c.role = DimRole::kPassThrough;
  c.result_dim = result_dim;
  c.members = std::move(members);
  return c;
}

DimClass contract_class(std::vector<DimClassMember> members) {
  DimClass c;
  c.role = DimRole::kContracting;
  c.members = std::move(members);
  return c;
}

DimClass blocked_class(std::vector<DimClassMember> members) {
  DimClass c;
  c.role = DimRole::kBlocked;
  c.members = std::move(members);
  return c;
}

PropagationRule dot_rule(const Operation& op, const TensorType& lhs,
                         const TensorType& rhs) {
  PropagationRule rule;
  rule.kind = op.kind;
  const DotDims& d = op.dot;
  std::set<int> lhs_used(d.lhs_batch.begin(), d.lhs_batch.end());
  lhs_used.insert(d.lhs_contract.begin(), d.lhs_contract.end());
  std::set<int> rhs_used(d.rhs_batch.begin(), d.rhs_batch.end());
  rhs_used.insert(d.rhs_contract.begin(), d.rhs_contract.end());
  int out = 0;
  for (size_t i = 0; i < d.lhs_batch.size(); ++i)
    rule.classes.push_back(
        pass_class(out++, {{0, d.lhs_batch[i]}, {1, d.rhs_batch[i]}}));
  for (int i = 0; i < lhs.rank(); ++i)
    if (!lhs_used.count(i)) rule.classes.push_back(pass_class(out++, {{0, i}}));
  for (int i = 0; i < rhs.rank(); ++i)
    if (!rhs_used.count(i)) rule.classes.push_back(pass_class(out++, {{1, i}}));
  for (size_t i = 0; i < d.lhs_contract.size(); ++i)
    rule.classes.push_back(
        contract_class({{0, d.lhs_contract[i]}, {1, d.rhs_contract[i]}}));
  return rule;
}

// Greedy factorization of a reshape into dim groups whose element products
// match. Dims in 1:1 groups pass through; grouped (split or merged) dims
// block tiling.
PropagationRule reshape_rule(const Operation& op, const TensorType& in) {
  PropagationRule rule;
  rule.kind = op.kind;
  const std::vector<int64_t>& a = in.shape;
  const std::vector<int64_t>& b = op.result_type.shape;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    size_t i0 = i, j0 = j;
    int64_t pa = i < a.size() ? a[i++] : 1;
    int64_t pb = j < b.size() ? b[j++] : 1;
    while (pa != pb) {
      if (pa < pb && i < a.size()) pa *= a[i++];
      else if (pb < pa && j < b.size()) pb *= b[j++];
      else break;
    }
    // Trailing 1-dims fold into the last group.
    while (i < a.size() && a[i] == 1 && j >= b.size()) ++i;
    while (j < b.size() && b[j] == 1 && i >= a.size()) ++j;
    if (pa != pb)
      throw InternalError("reshape factorization failed for op %" + op.id);
    if (i - i0 == 1 && j - j0 == 1 && a[i0] == b[j0]) {
      rule.classes.push_back(
          pass_class(static_cast<int>(j0), {{0, static_cast<int>(i0)}}));
    } else {
      std::vector<DimClassMember> members;
      for (size_t k = i0; k < i; ++k)
        members.push_back({0, static_cast<int>(k)});
      if (!members.empty()) rule.classes.push_back(blocked_class(members));
    }
  }
  return rule;
}

}  // namespace

PropagationRule rule_for(const Operation& op,
                         const std::vector<TensorType>& operand_types) {
  PropagationRule rule;
  rule.kind = op.kind;
  switch (op.kind) {
    case OpKind::kConstant:
      return rule;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kDiv:
    case OpKind::kMaximum: {
      for (int d = 0; d < operand_types[0].rank(); ++d)
        rule.classes.push_back(pass_class(d, {{0, d}, {1, d}}));
      return rule;
    }
    case OpKind::kNeg:
    case OpKind::kExp:
    case OpKind::kTanh:
    case OpKind::kRsqrt: {
      for (int d = 0; d < operand_types[0].rank(); ++d)
        rule.classes.push_back(pass_class(d, {{0, d}}));
      return rule;
    }
    case OpKind::kDot:
      return dot_rule(op, operand_types[0], operand_types[1]);
    case OpKind::kReduceSum:
    case OpKind::kReduceMax: {
      std::set<int> reduced(op.dims.begin(), op.dims.end());
      int out = 0;
      for (int d = 0; d < operand_types[0].rank(); ++d) {
        if (reduced.count(d)) {
          // Per-chunk sums of a sum-reduced dim are partial results; there
          // is no chunk-wise combining loop for max, so it blocks.
          if (op.kind == OpKind::kReduceSum)
            rule.classes.push_back(contract_class({{0, d}}));
          else
            rule.classes.push_back(blocked_class({{0, d}}));
        } else {
          rule.classes.push_back(pass_class(out++, {{0, d}}));
        }
      }
      return rule;
    }
    case OpKind::kTranspose: {
      for (int i = 0; i < static_cast<int>(op.dims.size()); ++i)
        rule.classes.push_back(pass_class(i, {{0, op.dims[i]}}));
      return rule;
    }
    case OpKind::kReshape:
      return reshape_rule(op, operand_types[0]);
    case OpKind::kBroadcastInDim: {
      for (int d = 0; d < static_cast<int>(op.dims.size()); ++d)
        rule.classes.push_back(pass_class(op.dims[d], {{0, d}}));
      return rule;
    }
    case OpKind::kSlice: {
      for (int d = 0; d < operand_types[0].rank(); ++d) {
        bool full = op.start[d] == 0 && op.limit[d] == operand_types[0].shape[d];
        if (full)
          rule.classes.push_back(pass_class(d, {{0, d}}));
        else
          rule.classes.push_back(blocked_class({{0, d}}));
      }
      return rule;
    }
    case OpKind::kConcatenate: {
      int rank = operand_types[0].rank();
      int n = static_cast<int>(operand_types.size());
      for (int d = 0; d < rank; ++d) {
        std::vector<DimClassMember> members;
        for (int i = 0; i < n; ++i) members.push_back({i, d});
        if (d == op.dim)
          rule.classes.push_back(blocked_class(std::move(members)));
        else
          rule.classes.push_back(pass_class(d, std::move(members)));
      }
      return rule;
    }
    default:
      throw ValidationError("no propagation rule for op kind '" +
                            std::string(kind_name(op.kind)) + "'");
  }
}

PropagationRule lookup_rule(OpKind kind, const Operation& op,
                            const std::vector<TensorType>& operand_types) {
  if (!is_base_kind(kind))
    throw ValidationError("no propagation rule for op kind '" +
                          std::string(kind_name(kind)) + "'");
  return rule_for(op, operand_types);
}

}  // namespace partir
