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

#ifndef PARTIR_REGISTRY_H_
#define PARTIR_REGISTRY_H_

#include <optional>
#include <vector>

#include "partir/ir.h"

namespace partir {

// How a set of operand dimensions relates to the result of an op.
enum class DimRole {
  // Slicing every member dim identically slices the result dim; the op can
  // run on the chunks unchanged.
  kPassThrough,
  // Slicing every member dim identically makes per-chunk results partial
  // sums of the full result (contracted / summed-away dims).
  kContracting,
  // Tiling cannot pass through this dim (reshape splits/merges, trimmed
  // slice dims, concatenate dim, max-reduced dims).
  kBlocked,
};

struct DimClassMember {
  int operand = 0;
  int dim = 0;

  bool operator==(const DimClassMember&) const = default;
};

// One equivalence class of operand dims that must be sliced together, with
// its role and (for pass-through classes) the result dim that follows.
struct DimClass {
  DimRole role = DimRole::kPassThrough;
  std::optional<int> result_dim;
  std::vector<DimClassMember> members;
};

// Declarative tiling behaviour of one op instance. Classes cover every
// operand dim of the op exactly once.
struct PropagationRule {
  OpKind kind = OpKind::kAdd;
  std::vector<DimClass> classes;

  // Class containing (operand, dim), or nullptr.
  const DimClass* class_of(int operand, int dim) const;
  // Pass-through class producing result dim, or nullptr.
  const DimClass* class_for_result(int dim) const;
};

// Instantiates the registry entry for a concrete op. Total over the 18
// base kinds; throws ValidationError for other kinds.
PropagationRule rule_for(const Operation& op,
                         const std::vector<TensorType>& operand_types);

// Kind-level lookup used for introspection and tests: instantiates the rule
// on a representative op via the function above. Throws for unsupported
// (non-base) kinds.
PropagationRule lookup_rule(OpKind kind, const Operation& op,
                            const std::vector<TensorType>& operand_types);

}  // namespace partir

#endif  // PARTIR_REGISTRY_H_
