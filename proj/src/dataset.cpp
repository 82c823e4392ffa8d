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

#include "lagc/dataset.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "config_io.hpp"
#include "lagc/error.hpp"

namespace lagc {

namespace {

constexpr double kEigenTolerance = 1e-10;
constexpr int kEigenMaxIterations = 10000;
constexpr int kGenerationRetries = 5;
constexpr double kRankTolerance = 1e-12;

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X(rows, cols);
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) X(i, j) = normal(rng);
  return X;
}

}  // namespace

std::vector<double> Dataset::partition_smoothness() const {
  std::vector<double> out;
  out.reserve(partitions.size());
  for (const auto& p : partitions) out.push_back(p.smoothness);
  return out;
}

std::vector<double> geometric_smoothness_law(int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int s = 1; s <= count; ++s) {
    const double root = std::pow(1.3, s - 1) + 1.0;
    out.push_back(root * root);
  }
  return out;
}

double dominant_eigenvalue(const Matrix& symmetric, std::uint64_t seed) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) {
    throw DimensionError("dominant_eigenvalue: matrix must be square and non-empty");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(symmetric.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  v.normalize();

  double lambda = v.dot(symmetric * v);
  for (int it = 0; it < kEigenMaxIterations; ++it) {
    Vector w = symmetric * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(symmetric * v);
    const bool converged = std::abs(next - lambda) <= kEigenTolerance * std::abs(next);
    lambda = next;
    if (converged) break;
  }
  return lambda;
}

Matrix rescale_to_smoothness(const Matrix& X, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw ConfigError("rescale_to_smoothness: target smoothness must be positive");
  }
  if (X.size() == 0 || X.isZero(0.0)) {
    throw DomainError("rescale_to_smoothness: zero matrix has no defined scale");
  }
  const Matrix gram = X.transpose() * X;
  const double lambda = dominant_eigenvalue(gram);
  return X * std::sqrt(target / (2.0 * lambda));
}

Dataset generate_dataset(int dimension, int rows_per_partition, int partitions,
                         std::span<const double> smoothness, std::uint64_t seed) {
  if (dimension < 1 || rows_per_partition < 1 || partitions < 1) {
    throw ConfigError("generate_dataset: dimension, rows and partitions must be positive");
  }
  if (static_cast<int>(smoothness.size()) != partitions) {
    throw ConfigError("generate_dataset: need one smoothness target per partition (" +
                      std::to_string(partitions) + "), got " +
                      std::to_string(smoothness.size()));
  }
  if (static_cast<long long>(rows_per_partition) * partitions <= dimension) {
    throw ConfigError("generate_dataset: total rows must exceed the dimension");
  }

  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    Dataset data;
    data.partitions.reserve(partitions);
    Matrix gram = Matrix::Zero(dimension, dimension);
    for (int s = 0; s < partitions; ++s) {
      Partition p;
      p.index = s + 1;
      p.X = rescale_to_smoothness(gaussian_matrix(rows_per_partition, dimension, rng),
                                  smoothness[s]);
      p.smoothness = smoothness[s];
      gram.noalias() += p.X.transpose() * p.X;
      data.partitions.push_back(std::move(p));
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    data.theta_star.resize(dimension);
    for (int j = 0; j < dimension; ++j) data.theta_star(j) = normal(rng);
    for (auto& p : data.partitions) p.y = p.X * data.theta_star;

    data.smoothness = 2.0 * dominant_eigenvalue(gram, seed ^ 0xa5a5a5a5ULL);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    data.pl_constant = 2.0 * eig.eigenvalues().minCoeff();
    data.optimal_loss = 0.0;
    if (data.pl_constant > kRankTolerance * data.smoothness) return data;
  }
  throw GenerationError("generate_dataset: design stayed rank deficient after " +
                        std::to_string(kGenerationRetries) + " attempts");
}

Dataset generate_dataset(const DatasetSpec& spec) {
  const std::vector<double> law = spec.smoothness.empty()
                                      ? geometric_smoothness_law(spec.partitions)
                                      : spec.smoothness;
  return generate_dataset(spec.dimension, spec.rows_per_partition, spec.partitions, law,
                          spec.seed);
}

DatasetSpec parse_dataset_spec(const std::map<std::string, std::string>& kv) {
  DatasetSpec spec;
  for (const auto& [key, value] : kv) {
    if (key == "dimension") {
      spec.dimension = detail::parse_int(key, value);
    } else if (key == "rows_per_partition") {
      spec.rows_per_partition = detail::parse_int(key, value);
    } else if (key == "partitions") {
      spec.partitions = detail::parse_int(key, value);
    } else if (key == "seed") {
      spec.seed = detail::parse_u64(key, value);
    } else if (key == "smoothness") {
      spec.smoothness.clear();
      if (value != "geometric") {
        for (const auto& item : detail::split_list(value))
          spec.smoothness.push_back(detail::parse_double(key, item));
      }
    } else {
      throw ConfigError("unknown dataset key '" + key + "'");
    }
  }
  if (spec.dimension < 1) throw ConfigError("dataset: dimension must be >= 1");
  if (spec.rows_per_partition < 1) throw ConfigError("dataset: rows_per_partition must be >= 1");
  if (spec.partitions < 1) throw ConfigError("dataset: partitions must be >= 1");
  if (!spec.smoothness.empty()) {
    if (static_cast<int>(spec.smoothness.size()) != spec.partitions) {
      throw ConfigError("dataset: smoothness list length must equal partitions");
    }
    for (double L : spec.smoothness)
      if (!(L > 0.0)) throw ConfigError("dataset: smoothness constants must be positive");
  }
  if (static_cast<long long>(spec.rows_per_partition) * spec.partitions <= spec.dimension) {
    throw ConfigError("dataset: partitions * rows_per_partition must exceed dimension");
  }
  return spec;
}

DatasetSpec read_dataset_spec(const std::filesystem::path& file) {
  const auto sections = detail::read_ini(file);
  for (const auto& sec : sections) {
    if (sec.name.empty() || sec.name == "dataset") return parse_dataset_spec(sec.as_map());
  }
  throw ConfigError(file.string() + ": no dataset keys found");
}

void export_partitions_csv(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& p : data.partitions) {
    const auto path = dir / ("partition_" + std::to_string(p.index) + ".csv");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17);
    for (int i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.X.cols(); ++j) out << p.X(i, j) << ',';
      out << p.y(i) << '\n';
    }
  }
}

Assignment::Assignment(int workers, int group_size, int redundancy)
    : workers_(workers), group_size_(group_size), redundancy_(redundancy) {
  if (workers < 1) throw ConfigError("assignment: M must be >= 1");
  if (group_size < 1 || workers % group_size != 0) {
    throw ConfigError("assignment: M_G = " + std::to_string(group_size) +
                      " is not an integer divisor of M = " + std::to_string(workers));
  }
  if (redundancy < 1 || redundancy > workers) {
    throw ConfigError("assignment: redundancy r must satisfy 1 <= r <= M");
  }
  group_redundancy_ = std::min(redundancy, group_size);
  storage_.resize(workers);
  for (int w = 0; w < workers; ++w) {
    const int m = position_in_group(w);
    for (int i = 0; i < group_redundancy_; ++i) storage_[w].push_back((m + i) % group_size);
  }
}

std::span<const int> Assignment::stored_batches(int worker) const {
  return storage_.at(worker);
}

int Assignment::replication(int group, int batch) const {
  int count = 0;
  for (int m = 0; m < group_size_; ++m) {
    for (int b : storage_.at(first_worker(group) + m)) count += (b == batch);
  }
  return count;
}

Assignment build_assignment(int workers, int group_size, int redundancy) {
  return Assignment(workers, group_size, redundancy);
}

}  // namespace lagc
