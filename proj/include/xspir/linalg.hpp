// Copyright 2026 The xsetspir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xspir/field.hpp"

namespace xspir {

/// Dense row-major matrix over a single finite field.
class FieldMatrix {
 public:
  FieldMatrix(const GaloisField& field, std::size_t rows, std::size_t cols);
  FieldMatrix(const GaloisField& field, std::size_t rows, std::size_t cols,
              std::vector<FieldElement> entries);

  static FieldMatrix identity(const GaloisField& field, std::size_t n);
  static FieldMatrix diag(std::span<const FieldElement> d);
  /// Builds from small integers, reduced into the prime subfield.
  static FieldMatrix from_ints(const GaloisField& field,
                               const std::vector<std::vector<long>>& rows);

  const GaloisField& field() const { return *field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const FieldElement& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const FieldElement> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  FieldMatrix transpose() const;
  FieldMatrix columns(std::size_t first, std::size_t count) const;
  FieldMatrix select_rows(std::span<const std::size_t> idx) const;
  bool is_zero() const;

  FieldMatrix operator+(const FieldMatrix& o) const;
  FieldMatrix operator-(const FieldMatrix& o) const;
  friend bool operator==(const FieldMatrix& a, const FieldMatrix& b);

  std::string to_string() const;

 private:
  const GaloisField* field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<FieldElement> data_;
};

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b);
FieldVector mat_vec(const FieldMatrix& a, std::span<const FieldElement> x);

/// Rank by Gaussian elimination, first nonzero pivot in column order.
std::size_t rank(const FieldMatrix& a);
/// Throws SingularMatrixError carrying the rank deficiency.
FieldMatrix invert(const FieldMatrix& a);
FieldVector solve(const FieldMatrix& a, std::span<const FieldElement> y);
/// Rows spanning {w : w^T a = 0}.
FieldMatrix left_null_space(const FieldMatrix& a);

FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix block_diag(const FieldMatrix& a, const FieldMatrix& b);

/// Globally known evaluation constants: alpha_1..alpha_N and f_1..f_L.
class EvalPoints {
 public:
  /// Throws ConfigError unless the alphas are distinct, the f's are distinct
  /// and no f coincides with an alpha.
  EvalPoints(FieldVector alpha, FieldVector f);

  /// alpha = first N nonzero elements in enumeration order, f = the next L
  /// nonzero ones; zero is used for the last f only when nonzero elements run
  /// out. Needs q >= N + L.
  static EvalPoints defaults(const GaloisField& field, std::size_t n, std::size_t l);

  const GaloisField& field() const { return alpha_.front().field(); }
  std::size_t n() const { return alpha_.size(); }
  std::size_t l() const { return f_.size(); }
  const FieldVector& alpha() const { return alpha_; }
  const FieldVector& f() const { return f_; }

  /// gamma_n = prod_i (f_i - alpha_n).
  FieldVector gamma() const;

 private:
  FieldVector alpha_;
  FieldVector f_;
};

/// N x N decoding matrix: row n is gamma_n * [1/(f_1-a_n) .. 1/(f_L-a_n),
/// 1, a_n, .., a_n^(N-L-1)].
FieldMatrix build_B(const EvalPoints& points);

/// Cauchy-Vandermonde matrix with row scaling beta:
/// [i,j] = beta_i/(f_j - a_i) for j < L, beta_i * a_i^(j-L) otherwise.
FieldMatrix build_D(const EvalPoints& points, std::span<const FieldElement> beta,
                    std::size_t l);

}  // namespace xspir
