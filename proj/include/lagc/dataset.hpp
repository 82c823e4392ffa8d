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

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lagc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One data partition D_s of the least-squares loss L_s(θ) = ‖X_s θ − y_s‖².
struct Partition {
  int index = 0;  // 1-based, matches the partition numbering of the smoothness law
  Matrix X;
  Vector y;
  double smoothness = 0.0;  // L_s = 2 λ_max(X_sᵀ X_s)

  int rows() const { return static_cast<int>(X.rows()); }
};

struct Dataset {
  std::vector<Partition> partitions;
  Vector theta_star;
  double smoothness = 0.0;    // global L
  double pl_constant = 0.0;   // μ = 2 λ_min(Σ X_sᵀ X_s)
  double optimal_loss = 0.0;  // L(θ*); zero because targets are noiseless

  int dimension() const { return static_cast<int>(theta_star.size()); }
  int size() const { return static_cast<int>(partitions.size()); }
  double condition_number() const { return smoothness / pl_constant; }
  std::vector<double> partition_smoothness() const;
};

struct DatasetSpec {
  int dimension = 784;
  int rows_per_partition = 3000;
  int partitions = 20;
  std::vector<double> smoothness;  // empty means the geometric law below
  std::uint64_t seed = 1;
};

// L_s = (1.3^{s-1} + 1)^2 for s = 1..count.
std::vector<double> geometric_smoothness_law(int count);

// Dominant eigenvalue of a symmetric positive semidefinite matrix by power
// iteration on the Rayleigh quotient. Stops when the relative change drops
// below 1e-10 or after 10^4 iterations; the start vector is drawn from `seed`.
double dominant_eigenvalue(const Matrix& symmetric, std::uint64_t seed = 0x5eed);

// Returns c·X with c chosen so that 2 λ_max((cX)ᵀ(cX)) == target.
Matrix rescale_to_smoothness(const Matrix& X, double target);

// Gaussian design matrices rescaled to the requested per-partition smoothness,
// θ* ~ N(0, I) and y_s = X_s θ*. Retries up to five times with a derived seed
// when the stacked design is numerically rank deficient.
Dataset generate_dataset(int dimension, int rows_per_partition, int partitions,
                         std::span<const double> smoothness, std::uint64_t seed);
Dataset generate_dataset(const DatasetSpec& spec);

// Key-value dataset description. Recognized keys: dimension,
// rows_per_partition, partitions, smoothness ("geometric" or a comma-separated
// list), seed. Unknown keys raise ConfigError.
DatasetSpec parse_dataset_spec(const std::map<std::string, std::string>& kv);
DatasetSpec read_dataset_spec(const std::filesystem::path& file);

// Writes partition_<s>.csv per partition: n_s rows, d feature columns and the
// target in the last column.
void export_partitions_csv(const Dataset& data, const std::filesystem::path& dir);

// Worker-to-batch storage map for M workers split into G = M / M_G groups.
// Group g owns partition D_g, split into M_G batches; worker m of the group
// stores batches [m + i] mod M_G for i = 0..r_G-1, with r_G = min(r, M_G).
// Workers, groups and batches are 0-based.
class Assignment {
 public:
  Assignment(int workers, int group_size, int redundancy);

  int workers() const { return workers_; }
  int group_size() const { return group_size_; }
  int groups() const { return workers_ / group_size_; }
  int redundancy() const { return redundancy_; }
  int group_redundancy() const { return group_redundancy_; }

  int group_of(int worker) const { return worker / group_size_; }
  int position_in_group(int worker) const { return worker % group_size_; }
  int first_worker(int group) const { return group * group_size_; }

  // Local batch indices (0..M_G-1) held by `worker`, in storage order.
  std::span<const int> stored_batches(int worker) const;
  // Number of workers in `group` that store local batch `batch`.
  int replication(int group, int batch) const;

 private:
  int workers_;
  int group_size_;
  int redundancy_;
  int group_redundancy_;
  std::vector<std::vector<int>> storage_;
};

Assignment build_assignment(int workers, int group_size, int redundancy);

}  // namespace lagc
