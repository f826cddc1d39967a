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

#ifndef PARTIR_REWRITE_H_
#define PARTIR_REWRITE_H_

#include <string>

#include "partir/ir.h"

namespace partir {

// Expresses a tiling decision for `value` as program structure: the value's
// uses are redirected through a fresh tile loop over `axis`, concatenating
// on `dim`, whose body reconstructs the value from per-index slices.
// Semantics are unchanged; propagation later grows the loop. Throws
// IllegalActionError when the value does not exist, the dim is out of range
// or not divisible by the axis size, the axis is undeclared, or the value
// already carries tiling (slice_axis uses, an atomic wrap, or it is itself
// a loop over `axis`).
Program apply_tile_action(const Program& p, const std::string& value, int dim,
                          const std::string& axis);

// Marks a value as replicated by routing its uses through an atomic region.
// Throws IllegalActionError if the value carries tiling already.
Program wrap_atomic(const Program& p, const std::string& value);

// True when the value is consumed by any slice_axis, is atomic-wrapped, or
// is the result of a tile/sum loop; such values already carry a
// distribution decision.
bool carries_tiling(const Program& p, const std::string& value);

// Type of a value visible at top level (argument or top-level op result).
// Throws IllegalActionError when no such value exists.
TensorType top_level_type(const Program& p, const std::string& value);

}  // namespace partir

#endif  // PARTIR_REWRITE_H_
