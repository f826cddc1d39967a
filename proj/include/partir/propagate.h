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

#ifndef PARTIR_PROPAGATE_H_
#define PARTIR_PROPAGATE_H_

#include <string>
#include <vector>

#include "partir/ir.h"

namespace partir {

// An op where propagation lacked information or faced a conflict; these
// resurface on the search worklist for explicit decisions.
struct StuckNode {
  enum class Reason {
    kInsufficientOperands,
    kBlockedDim,
    kConflictingAxes,
  };
  std::string op_id;  // the op's result value id
  Reason reason = Reason::kInsufficientOperands;

  bool operator==(const StuckNode&) const = default;
};

std::string_view reason_name(StuckNode::Reason r);

struct PropagateResult {
  Program program;
  std::vector<StuckNode> stuck;
};

// Pushes tiling decisions through the program to a fixpoint: consumers of
// tile-loop results are pulled inside loops (extending single-use loops in
// place), contracted dims introduce sum loops, producers of sliced values
// migrate into the consuming loop, and arguments that end up consumed
// replicated inside loops are wrapped atomic. Conflicts never pick a
// winner; they are reported as stuck nodes. Deterministic: sweeps run in
// program order, forward then backward, repeated to fixpoint.
PropagateResult propagate(const Program& p);

// For every untiled argument, applies the unique (dim, axis) assignment
// consistent with all uses (consistent = propagating it introduces no new
// all_gather traffic), then re-propagates; iterates to fixpoint. Ambiguous
// arguments are left untouched. No-op when no argument is tiled yet.
// `axes` empty means all mesh axes.
Program infer_rest(const Program& p, const std::vector<std::string>& axes = {});

}  // namespace partir

#endif  // PARTIR_PROPAGATE_H_
