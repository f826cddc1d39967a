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

#ifndef PARTIR_MESH_H_
#define PARTIR_MESH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partir/tensor.h"

namespace partir {

struct MeshAxis {
  std::string name;
  int64_t size = 1;

  bool operator==(const MeshAxis&) const = default;
};

// Named logical device-mesh axes. The total device count is the product of
// the axis sizes; an empty mesh describes a single device.
struct Mesh {
  std::vector<MeshAxis> axes;

  int64_t device_count() const;
  bool has_axis(std::string_view name) const;
  // Throws ValidationError for an undeclared axis.
  int64_t axis_size(std::string_view name) const;
  int axis_index(std::string_view name) const;

  bool operator==(const Mesh&) const = default;
};

// Throws ValidationError on duplicate names or sizes < 1.
void validate_mesh(const Mesh& mesh);

// Per-dimension axis assignment for a tensor value plus the set of axes over
// which the value is an unreduced partial sum. An empty string means the
// dimension is not sharded. At most one axis per dimension, and an axis name
// appears at most once across dim_axes.
struct ShardingSpec {
  std::vector<std::string> dim_axes;
  std::vector<std::string> pending_sum;  // kept sorted

  bool is_replicated() const;
  bool has_axis(std::string_view name) const;
  void add_pending(const std::string& axis);
  void clear_pending(std::string_view axis);

  static ShardingSpec replicated(int rank) {
    ShardingSpec s;
    s.dim_axes.assign(rank, "");
    return s;
  }

  bool operator==(const ShardingSpec&) const = default;
};

// Throws ValidationError when the spec violates its invariants against the
// given mesh (undeclared axis, repeated axis, pending/dim overlap).
void validate_spec(const ShardingSpec& spec, int rank, const Mesh& mesh);

// Shape of the per-device chunk. Throws ValidationError when a sharded dim
// is not divisible by its axis size, naming dim and axis.
std::vector<int64_t> local_shape(const TensorType& type,
                                 const ShardingSpec& spec, const Mesh& mesh);

// One index per mesh axis, in mesh axis order.
struct DeviceCoord {
  std::vector<int64_t> index;

  bool operator==(const DeviceCoord&) const = default;
};

// All device coordinates in lexicographic order (first axis slowest).
// Reduction orders throughout the system follow this enumeration.
std::vector<DeviceCoord> all_device_coords(const Mesh& mesh);

}  // namespace partir

#endif  // PARTIR_MESH_H_
