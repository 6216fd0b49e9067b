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
#include <optional>
#include <vector>

#include "xspir/field.hpp"
#include "xspir/linalg.hpp"
#include "xspir/rational.hpp"
#include "xspir/rng.hpp"

namespace xspir {

/// One protocol instance. For the classical scheme L = N - X - M exactly; the
/// quantum scheme may pad (L < N - X - M) after dropping databases, in which
/// case the extra interference columns carry only common randomness.
class SchemeParams {
 public:
  static SchemeParams classical(const GaloisField& field, std::size_t n, std::size_t k,
                                std::size_t x, std::size_t t, std::size_t e,
                                std::optional<EvalPoints> points = std::nullopt);
  /// General form with an explicit message length (1 <= L <= N - X - M).
  static SchemeParams with_length(const GaloisField& field, std::size_t n, std::size_t k,
                                  std::size_t x, std::size_t t, std::size_t e, std::size_t l,
                                  std::optional<EvalPoints> points = std::nullopt);

  const GaloisField& field() const { return *field_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t x() const { return x_; }
  std::size_t t() const { return t_; }
  std::size_t e() const { return e_; }
  std::size_t m() const { return t_ > e_ ? t_ : e_; }
  std::size_t l() const { return l_; }
  /// Width of the interference block, N - L (equals X + M when unpadded).
  std::size_t noise_dim() const { return n_ - l_; }
  const EvalPoints& points() const { return points_; }
  const FieldVector& gamma() const { return gamma_; }

 private:
  SchemeParams(const GaloisField& field, std::size_t n, std::size_t k, std::size_t x,
               std::size_t t, std::size_t e, std::size_t l, EvalPoints points);

  const GaloisField* field_;
  std::size_t n_, k_, x_, t_, e_, l_;
  EvalPoints points_;
  FieldVector gamma_;
};

/// K x len grid; symbol (k, j) is the j-th symbol of message k (0-based).
class MessageSet {
 public:
  MessageSet(std::size_t k, std::size_t len, FieldVector data);
  static MessageSet random(const GaloisField& field, std::size_t k, std::size_t len,
                           RandomStream& rng);
  static MessageSet zeros(const GaloisField& field, std::size_t k, std::size_t len);

  std::size_t k() const { return k_; }
  std::size_t len() const { return len_; }
  const FieldElement& at(std::size_t msg, std::size_t j) const { return data_[msg * len_ + j]; }
  FieldElement& at(std::size_t msg, std::size_t j) { return data_[msg * len_ + j]; }
  /// Column j: the j-th symbol of every message.
  FieldVector column(std::size_t j) const;
  /// Message `theta` (1-based).
  FieldVector message(std::size_t theta) const;
  /// Symbols [first, first + count) of every message.
  MessageSet slice(std::size_t first, std::size_t count) const;
  const FieldVector& data() const { return data_; }

 private:
  std::size_t k_;
  std::size_t len_;
  FieldVector data_;
};

/// Blocked length-K vectors indexed by (j, i): R_{j,i} for storage noise
/// (i < X) or Z_{j,i} for query noise (i < M).
struct NoiseBlocks {
  std::size_t blocks = 0;  // L
  std::size_t degree = 0;  // X or M
  std::vector<FieldVector> vectors;  // blocks * degree entries, each length K

  const FieldVector& at(std::size_t j, std::size_t i) const { return vectors[j * degree + i]; }
  static NoiseBlocks zeros(const GaloisField& field, std::size_t blocks, std::size_t degree,
                           std::size_t k);
  static NoiseBlocks random(const GaloisField& field, std::size_t blocks, std::size_t degree,
                            std::size_t k, RandomStream& rng);
};

struct StorageShare {
  std::size_t db = 0;
  std::vector<FieldVector> blocks;  // L blocks of length K
};

struct QueryVector {
  std::size_t db = 0;
  std::vector<FieldVector> blocks;  // L blocks of length K
};

/// Symbols Z'_0 .. Z'_{D-1} shared by the databases, D = noise_dim.
struct CommonRandomness {
  FieldVector symbols;
};

struct AnswerSymbol {
  std::size_t db = 0;
  FieldElement value;
};

struct QueryBundle {
  std::vector<QueryVector> queries;
  NoiseBlocks noise;  // retained by the user
};

std::vector<StorageShare> encode_storage(const SchemeParams& params, const MessageSet& messages,
                                         const NoiseBlocks& noise);
std::vector<StorageShare> encode_storage(const SchemeParams& params, const MessageSet& messages,
                                         RandomStream& rng);

/// theta is 1-based.
std::vector<QueryVector> gen_queries(const SchemeParams& params, std::size_t theta,
                                     const NoiseBlocks& noise);
QueryBundle gen_queries(const SchemeParams& params, std::size_t theta, RandomStream& rng);

CommonRandomness gen_common_randomness(const SchemeParams& params, RandomStream& rng);

/// <S_n, Q_n> + gamma_n * sum_i alpha_n^i Z'_i.
AnswerSymbol answer(const StorageShare& share, const QueryVector& query,
                    const CommonRandomness& cr, const SchemeParams& params);

/// All N coordinates of B^{-1} A: the L message symbols followed by the
/// noise-contaminated interference.
FieldVector decode_all(std::span<const AnswerSymbol> answers, const SchemeParams& params);
FieldVector decode(std::span<const AnswerSymbol> answers, const SchemeParams& params);

/// L / N; throws if it disagrees with 1 - (X + M)/N.
Rational classical_rate(const SchemeParams& params);

}  // namespace xspir
