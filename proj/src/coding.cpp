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

#include "lagc/coding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "lagc/error.hpp"

namespace lagc {

namespace {

constexpr int kBuildRetries = 16;
constexpr int kExhaustiveLimit = 12;
constexpr int kSampledSubsets = 500;
constexpr double kMinCoefficient = 1e-3;
constexpr double kSpanTolerance = 1e-10;
// Decoding coefficients larger than this make the recovered gradient lose
// too many digits to meet the 1e-9 recovery check.
constexpr double kMaxDecodingCoefficient = 1e5;

bool on_support(int row, int col, int n, int r) {
  return ((col - row) % n + n) % n < r;
}

std::string subset_string(std::span<const int> workers) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < workers.size(); ++i) os << (i ? "," : "") << workers[i];
  os << '}';
  return os.str();
}

// Returns the residual ‖B_Uᵀa − 1‖∞ alongside the coefficients.
std::pair<Vector, double> solve_subset(const Matrix& B, std::span<const int> workers) {
  const int n = static_cast<int>(B.cols());
  Matrix BUt(n, static_cast<Eigen::Index>(workers.size()));
  for (std::size_t k = 0; k < workers.size(); ++k) BUt.col(k) = B.row(workers[k]).transpose();
  const Vector ones = Vector::Ones(n);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(BUt);
  Vector a = cod.solve(ones);
  const double residual = (BUt * a - ones).lpNorm<Eigen::Infinity>();
  return {std::move(a), residual};
}

bool subset_ok(const Matrix& B, std::span<const int> workers) {
  auto [a, residual] = solve_subset(B, workers);
  return residual <= kSpanTolerance && a.lpNorm<Eigen::Infinity>() <= kMaxDecodingCoefficient;
}

Matrix cyclic_nullspace_code(int n, int r, std::mt19937_64& rng) {
  const int s = r - 1;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix H(s, n);
  for (int i = 0; i < s; ++i) {
    double sum = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
      H(i, j) = unif(rng);
      sum += H(i, j);
    }
    H(i, n - 1) = -sum;
  }
  Matrix B = Matrix::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    B(m, m) = 1.0;
    if (s == 0) continue;
    Matrix A(s, s);
    for (int i = 1; i <= s; ++i) A.col(i - 1) = H.col((m + i) % n);
    const Vector x = A.partialPivLu().solve(-H.col(m));
    for (int i = 1; i <= s; ++i) B(m, (m + i) % n) = x(i - 1);
  }
  return B;
}

}  // namespace

EncodingMatrix::EncodingMatrix(Matrix coefficients, int redundancy)
    : coefficients_(std::move(coefficients)), redundancy_(redundancy) {
  const int n = static_cast<int>(coefficients_.rows());
  if (n < 1 || coefficients_.cols() != n) {
    throw ConfigError("encoding matrix must be square and non-empty");
  }
  if (redundancy < 1 || redundancy > n) {
    throw ConfigError("encoding matrix: need 1 <= r_G <= M_G");
  }
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n; ++j) {
      if (!on_support(m, j, n, redundancy) && coefficients_(m, j) != 0.0) {
        throw ConfigError("encoding matrix: row " + std::to_string(m) +
                          " has a coefficient outside its stored batches (column " +
                          std::to_string(j) + ")");
      }
    }
  }
}

EncodingMatrix build_encoding_matrix(int group_size, int redundancy, std::uint64_t seed) {
  if (group_size < 1 || redundancy < 1 || redundancy > group_size) {
    throw ConfigError("build_encoding_matrix: need 1 <= r_G <= M_G");
  }
  if (redundancy == group_size) {
    return EncodingMatrix(Matrix::Ones(group_size, group_size), redundancy);
  }
  for (int attempt = 0; attempt < kBuildRetries; ++attempt) {
    std::mt19937_64 rng(seed + 0x2545f4914f6cdd1dULL * static_cast<std::uint64_t>(attempt));
    Matrix B = cyclic_nullspace_code(group_size, redundancy, rng);
    bool ok = B.allFinite();
    for (int m = 0; ok && m < group_size; ++m)
      for (int i = 0; i < redundancy; ++i)
        ok = ok && std::abs(B(m, (m + i) % group_size)) >= kMinCoefficient;
    if (!ok) continue;
    EncodingMatrix code(std::move(B), redundancy);
    const int F = code.threshold();
    if (group_size <= kExhaustiveLimit) {
      if (verify_decodable(code, F)) return code;
      continue;
    }
    std::vector<int> workers(group_size);
    std::iota(workers.begin(), workers.end(), 0);
    bool sampled_ok = true;
    for (int t = 0; sampled_ok && t < kSampledSubsets; ++t) {
      std::shuffle(workers.begin(), workers.end(), rng);
      std::vector<int> subset(workers.begin(), workers.begin() + F);
      std::sort(subset.begin(), subset.end());
      sampled_ok = subset_ok(code.coefficients(), subset);
    }
    if (sampled_ok) return code;
  }
  throw DecodeError("build_encoding_matrix: no decodable code found for M_G=" +
                    std::to_string(group_size) + ", r_G=" + std::to_string(redundancy));
}

Vector encode(const EncodingMatrix& code, int worker, std::span<const Vector> stored) {
  const int n = code.group_size();
  if (worker < 0 || worker >= n) throw ConfigError("encode: worker index out of range");
  if (static_cast<int>(stored.size()) != code.redundancy()) {
    throw ConfigError("encode: worker " + std::to_string(worker) + " needs " +
                      std::to_string(code.redundancy()) + " batch gradients, got " +
                      std::to_string(stored.size()));
  }
  Vector f = Vector::Zero(stored.front().size());
  for (int i = 0; i < code.redundancy(); ++i) {
    if (stored[i].size() != f.size()) throw DimensionError("encode: gradient sizes differ");
    f += code(worker, (worker + i) % n) * stored[i];
  }
  return f;
}

Vector decoding_coefficients(const EncodingMatrix& code, std::span<const int> workers) {
  const int n = code.group_size();
  if (static_cast<int>(workers.size()) < code.threshold()) {
    throw DecodeError("decode: subset " + subset_string(workers) + " has fewer than F = " +
                      std::to_string(code.threshold()) + " workers");
  }
  for (std::size_t k = 0; k < workers.size(); ++k) {
    if (workers[k] < 0 || workers[k] >= n) {
      throw DecodeError("decode: worker index out of range in " + subset_string(workers));
    }
    for (std::size_t j = 0; j < k; ++j)
      if (workers[j] == workers[k])
        throw DecodeError("decode: repeated worker in " + subset_string(workers));
  }
  auto [a, residual] = solve_subset(code.coefficients(), workers);
  if (!(residual <= kSpanTolerance)) {
    throw DecodeError("decode: subset " + subset_string(workers) +
                      " cannot recover the group gradient");
  }
  return a;
}

Vector decode(const EncodingMatrix& code, std::span<const int> workers,
              std::span<const Vector> encoded) {
  if (encoded.size() != workers.size()) {
    throw DecodeError("decode: " + std::to_string(encoded.size()) + " encodings for " +
                      std::to_string(workers.size()) + " workers");
  }
  if (encoded.empty()) throw DecodeError("decode: no encodings received");
  if (code.trivial() && workers.size() == 1) {
    if (workers[0] < 0 || workers[0] >= code.group_size())
      throw DecodeError("decode: worker index out of range in " + subset_string(workers));
    return encoded[0];
  }
  const Vector a = decoding_coefficients(code, workers);
  Vector out = Vector::Zero(encoded.front().size());
  for (std::size_t k = 0; k < encoded.size(); ++k) out += a(k) * encoded[k];
  return out;
}

bool verify_decodable(const EncodingMatrix& code, int received) {
  for (const auto& subset : combinations(code.group_size(), received)) {
    if (!subset_ok(code.coefficients(), subset)) return false;
  }
  return true;
}

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

void write_encoding_csv(const EncodingMatrix& code, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << std::setprecision(17);
  const Matrix& B = code.coefficients();
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.cols(); ++j) out << (j ? "," : "") << B(i, j);
    out << '\n';
  }
}

}  // namespace lagc
