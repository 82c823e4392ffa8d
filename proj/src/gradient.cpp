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

#include "lagc/gradient.hpp"

#include <cmath>
#include <string>

#include "lagc/error.hpp"

namespace lagc {

namespace {

void check_dims(const Matrix& X, const Vector& y, const Vector& theta) {
  if (X.cols() != theta.size() || X.rows() != y.size()) {
    throw DimensionError("dimension mismatch: X is " + std::to_string(X.rows()) + "x" +
                         std::to_string(X.cols()) + ", y has " + std::to_string(y.size()) +
                         ", theta has " + std::to_string(theta.size()));
  }
}

// Sum of squares with a long double accumulator.
double squared_norm(const Vector& v) {
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += static_cast<long double>(v(i)) * v(i);
  return static_cast<double>(acc);
}

}  // namespace

ParamVector::ParamVector(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw DomainError("parameter vector has non-finite entries");
}

Vector partial_gradient(const Matrix& X, const Vector& y, const Vector& theta) {
  check_dims(X, y, theta);
  const Vector residual = X * theta - y;
  return 2.0 * (X.transpose() * residual);
}

Vector partial_gradient(const Partition& p, const Vector& theta) {
  return partial_gradient(p.X, p.y, theta);
}

Vector partitions_gradient(const Dataset& data, std::span<const int> partitions,
                           const Vector& theta) {
  Vector g = Vector::Zero(data.dimension());
  for (int s : partitions) g += partial_gradient(data.partitions.at(s), theta);
  return g;
}

double partition_loss(const Partition& p, const Vector& theta) {
  check_dims(p.X, p.y, theta);
  return squared_norm(p.X * theta - p.y);
}

double total_loss(const Dataset& data, const Vector& theta) {
  long double acc = 0.0L;
  for (const auto& p : data.partitions) acc += partition_loss(p, theta);
  return static_cast<double>(acc);
}

Vector total_gradient(const Dataset& data, const Vector& theta) {
  if (theta.size() != data.dimension()) {
    throw DimensionError("total_gradient: theta has " + std::to_string(theta.size()) +
                         " entries, dataset dimension is " +
                         std::to_string(data.dimension()));
  }
  Vector g = Vector::Zero(data.dimension());
  for (const auto& p : data.partitions) g += partial_gradient(p, theta);
  return g;
}

double optimality_gap(const Dataset& data, const Vector& theta) {
  return total_loss(data, theta) - data.optimal_loss;
}

}  // namespace lagc
