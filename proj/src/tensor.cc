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

#include "partir/tensor.h"

namespace partir {

std::string to_string(const TensorType& type) {
  std::string out = "f32[";
  for (size_t i = 0; i < type.shape.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(type.shape[i]);
  }
  out += ']';
  return out;
}

}  // namespace partir
