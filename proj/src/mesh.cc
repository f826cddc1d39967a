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

#include "partir/mesh.h"

#include <algorithm>
#include <set>

#include "partir/error.h"

namespace partir {

int64_t Mesh::device_count() const {
  int64_t n = 1;
  for (const MeshAxis& a : axes) n *= a.size;
  return n;
}

bool Mesh::has_axis(std::string_view name) const {
  return std::any_of(axes.begin(), axes.end(),
                     [&](const MeshAxis& a) { return a.name == name; });
}

int64_t Mesh::axis_size(std::string_view name) const {
  for (const MeshAxis& a : axes)
    if (a.name == name) return a.size;
  throw ValidationError("undeclared mesh axis \"" + std::string(name) + "\"");
}

int Mesh::axis_index(std::string_view name) const {
  for (size_t i = 0; i < axes.size(); ++i)
    if (axes[i].name == name) return static_cast<int>(i);
  throw ValidationError("undeclared mesh axis \"" + std::string(name) + "\"");
}

void validate_mesh(const Mesh& mesh) {
  std::set<std::string> seen;
  for (const MeshAxis& a : mesh.axes) {
    if (a.name.empty())
      throw ValidationError("mesh axis with empty name");
    if (a.size < 1)
      throw ValidationError("mesh axis \"" + a.name + "\" has size " +
                            std::to_string(a.size) + " < 1");
    if (!seen.insert(a.name).second)
      throw ValidationError("duplicate mesh axis \"" + a.name + "\"");
  }
}

bool ShardingSpec::is_replicated() const {
  if (!pending_sum.empty()) return false;
  return std::all_of(dim_axes.begin(), dim_axes.end(),
                     [](const std::string& a) { return a.empty(); });
}

bool ShardingSpec::has_axis(std::string_view name) const {
  for (const std::string& a : dim_axes)
    if (a == name) return true;
  return std::find(pending_sum.begin(), pending_sum.end(), name) !=
         pending_sum.end();
}

void ShardingSpec::add_pending(const std::string& axis) {
  auto it = std::lower_bound(pending_sum.begin(), pending_sum.end(), axis);
  if (it == pending_sum.end() || *it != axis) pending_sum.insert(it, axis);
}

void ShardingSpec::clear_pending(std::string_view axis) {
  auto it = std::find(pending_sum.begin(), pending_sum.end(), axis);
  if (it != pending_sum.end()) pending_sum.erase(it);
}

void validate_spec(const ShardingSpec& spec, int rank, const Mesh& mesh) {
  if (static_cast<int>(spec.dim_axes.size()) != rank)
    throw ValidationError("sharding spec rank " +
                          std::to_string(spec.dim_axes.size()) +
                          " does not match tensor rank " +
                          std::to_string(rank));
  std::set<std::string> used;
  for (const std::string& a : spec.dim_axes) {
    if (a.empty()) continue;
    if (!mesh.has_axis(a))
      throw ValidationError("sharding spec uses undeclared axis \"" + a +
                            "\"");
    if (!used.insert(a).second)
      throw ValidationError("axis \"" + a +
                            "\" appears on more than one dimension");
  }
  for (const std::string& a : spec.pending_sum) {
    if (!mesh.has_axis(a))
      throw ValidationError("pending_sum uses undeclared axis \"" + a + "\"");
    if (used.count(a))
      throw ValidationError("axis \"" + a +
                            "\" is both a dim axis and a pending sum");
  }
}

std::vector<int64_t> local_shape(const TensorType& type,
                                 const ShardingSpec& spec, const Mesh& mesh) {
  if (spec.dim_axes.size() != type.shape.size())
    throw ValidationError("sharding spec rank mismatch");
  std::vector<int64_t> shape = type.shape;
  for (size_t d = 0; d < shape.size(); ++d) {
    const std::string& axis = spec.dim_axes[d];
    if (axis.empty()) continue;
    int64_t size = mesh.axis_size(axis);
    if (shape[d] % size != 0)
      throw ValidationError(
          "dimension " + std::to_string(d) + " of size " +
          std::to_string(shape[d]) + " is not divisible by axis \"" + axis +
          "\" of size " + std::to_string(size));
    shape[d] /= size;
  }
  return shape;
}

std::vector<DeviceCoord> all_device_coords(const Mesh& mesh) {
  std::vector<DeviceCoord> coords;
  int64_t total = mesh.device_count();
  coords.reserve(total);
  for (int64_t flat = 0; flat < total; ++flat) {
    DeviceCoord c;
    c.index.assign(mesh.axes.size(), 0);
    int64_t rem = flat;
    for (int i = static_cast<int>(mesh.axes.size()) - 1; i >= 0; --i) {
      c.index[i] = rem % mesh.axes[i].size;
      rem /= mesh.axes[i].size;
    }
    coords.push_back(std::move(c));
  }
  return coords;
}

}  // namespace partir
