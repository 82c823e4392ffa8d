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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lagc/dataset.hpp"

namespace lagc {

// Gradient-coding matrix B for one group of M_G workers with per-group
// redundancy r_G. Row m holds worker m's coefficients over the group's M_G
// batch gradients and is supported on columns [m + i] mod M_G, i < r_G.
// Any F >= M_G - r_G + 1 rows have the all-ones vector in their span.
class EncodingMatrix {
 public:
  // Takes explicit coefficients; throws ConfigError when an entry outside the
  // cyclic support is nonzero.
  EncodingMatrix(Matrix coefficients, int redundancy);

  int group_size() const { return static_cast<int>(coefficients_.rows()); }
  int redundancy() const { return redundancy_; }
  // Minimum number of workers needed to decode, M_G - r_G + 1.
  int threshold() const { return group_size() - redundancy_ + 1; }
  // Full replication: every worker can send the group gradient itself.
  bool trivial() const { return redundancy_ == group_size(); }

  const Matrix& coefficients() const { return coefficients_; }
  double operator()(int worker, int batch) const { return coefficients_(worker, batch); }

 private:
  Matrix coefficients_;
  int redundancy_;
};

// Random cyclic-support code. Rows are drawn from the null space of a random
// (r_G - 1) x M_G matrix whose rows sum to zero, so every row is orthogonal to
// the same subspace that excludes the all-ones vector. Decodability is checked
// over every F-subset when M_G <= 12 and over sampled subsets otherwise; a
// failed check retries with a derived seed.
EncodingMatrix build_encoding_matrix(int group_size, int redundancy, std::uint64_t seed);

// f_m = Σ_j B[m, j] g_j over worker m's stored batches. `stored` holds the
// batch gradients in storage order ([m + i] mod M_G, i = 0..r_G-1).
Vector encode(const EncodingMatrix& code, int worker, std::span<const Vector> stored);

// Coefficients a with aᵀ B_U = 1ᵀ (minimum norm). Throws DecodeError when the
// subset cannot recover the all-ones combination.
Vector decoding_coefficients(const EncodingMatrix& code, std::span<const int> workers);

// Σ a_k f_k: the group gradient Σ_j g_j recovered from the received encodings.
Vector decode(const EncodingMatrix& code, std::span<const int> workers,
              std::span<const Vector> encoded);

// Checks decodability over every subset of size `received`.
bool verify_decodable(const EncodingMatrix& code, int received);

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k);

void write_encoding_csv(const EncodingMatrix& code, const std::filesystem::path& file);

}  // namespace lagc
