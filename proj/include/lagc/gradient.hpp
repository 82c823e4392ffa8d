// Copyright 2026 The lagc-sim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

#include <span>

#include "lagc/dataset.hpp"

namespace lagc {

// Model parameter θ. Construction rejects NaN and infinite entries.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(Vector values);
  static ParamVector zeros(int dimension) { return ParamVector(Vector::Zero(dimension)); }

  const Vector& values() const { return values_; }
  operator const Vector&() const { return values_; }  // NOLINT(google-explicit-constructor)
  int size() const { return static_cast<int>(values_.size()); }

 private:
  Vector values_;
};

// 2 Xᵀ(Xθ − y), the gradient of ‖Xθ − y‖².
Vector partial_gradient(const Matrix& X, const Vector& y, const Vector& theta);
Vector partial_gradient(const Partition& p, const Vector& theta);

// Sum of partial gradients over the listed partition indices (0-based).
Vector partitions_gradient(const Dataset& data, std::span<const int> partitions,
                           const Vector& theta);

double partition_loss(const Partition& p, const Vector& theta);
double total_loss(const Dataset& data, const Vector& theta);
Vector total_gradient(const Dataset& data, const Vector& theta);

// L(θ) − L(θ*).
double optimality_gap(const Dataset& data, const Vector& theta);

}  // namespace lagc
