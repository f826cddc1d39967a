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

#ifndef PARTIR_TENSOR_H_
#define PARTIR_TENSOR_H_

#include <cstdint>
#include <string>
#include <vector>

namespace partir {

// Statically shaped f32 tensor type. Rank 0 through 4, every dim >= 1.
// The element kind is fixed to f32 in v1 but kept explicit in the textual
// form ("f32[8,16]") so other kinds can be added without a format break.
struct TensorType {
  std::vector<int64_t> shape;

  int rank() const { return static_cast<int>(shape.size()); }
  int64_t num_elements() const {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
  }
  int64_t byte_size() const { return num_elements() * 4; }

  bool operator==(const TensorType&) const = default;
};

// "f32[8,16]"; rank 0 prints as "f32[]".
std::string to_string(const TensorType& type);

// Shared upper bound used by the validator and generators.
inline constexpr int kMaxRank = 4;

}  // namespace partir

#endif  // PARTIR_TENSOR_H_
