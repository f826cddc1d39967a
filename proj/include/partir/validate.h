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

#ifndef PARTIR_VALIDATE_H_
#define PARTIR_VALIDATE_H_

#include <vector>

#include "partir/ir.h"

namespace partir {

// Result type of a base-dialect op given operand types and attributes.
// Checks attribute well-formedness (permutation bijective, contracting dims
// within rank, element count preserved by reshape, ...). Throws
// ValidationError naming the op id.
TensorType infer_result_type(const Operation& op,
                             const std::vector<TensorType>& operand_types);

// Full structural validation: unique ids, SSA dominance (region bodies see
// enclosing definitions), declared result types equal to inferred types
// (slice_axis and loop yields checked against the per-iteration contract),
// mesh well-formed, loop axes declared, and no same-axis loop nesting.
// Returns the program unchanged on success; throws ValidationError.
const Program& validate(const Program& p);

// The tiling-dialect subset of validation: loop invariants only (axes
// declared, no same-axis nesting, atomic bodies pass-through, slice_axis
// divisibility and index binding). Cheaper than validate(); used by passes
// that already know base types are sound.
void validate_tiled(const Program& p);

}  // namespace partir

#endif  // PARTIR_VALIDATE_H_
