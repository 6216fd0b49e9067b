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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "xspir/csa_classical.hpp"
#include "xspir/nsum_box.hpp"

namespace xspir {

struct QuantumOverrides {
  std::optional<FieldVector> alpha;
  std::optional<FieldVector> f;
  std::optional<FieldVector> u;
  /// Replaces the derived dual; the pair is then not checked for duality.
  std::optional<FieldVector> v;
};

/// Quantum instance after the database-dropping rule: N' databases, each
/// retrieval half carries L <= floor(N'/2) symbols.
class QuantumParams {
 public:
  const SchemeParams& scheme() const { return scheme_; }
  std::size_t n_original() const { return n_original_; }
  std::size_t n_effective() const { return scheme_.n(); }
  std::size_t l() const { return scheme_.l(); }
  std::size_t nu() const { return (scheme_.n() + 1) / 2; }
  std::size_t mu() const { return scheme_.n() / 2; }
  const DualPair& pair() const { return transfer_.pair(); }
  const TransferMatrix& transfer() const { return transfer_; }
  /// D(alpha, 1, f) for the effective instance.
  const FieldMatrix& qcsa() const { return qcsa_; }

 private:
  friend QuantumParams effective_params(const GaloisField&, std::size_t, std::size_t,
                                        std::size_t, std::size_t, std::size_t,
                                        const QuantumOverrides&);
  QuantumParams(SchemeParams scheme, std::size_t n_original, TransferMatrix transfer,
                FieldMatrix qcsa);

  SchemeParams scheme_;
  std::size_t n_original_;
  TransferMatrix transfer_;
  FieldMatrix qcsa_;
};

/// N' = N when N - X - M <= floor(N/2), otherwise min(N, 2(X+M)) (at least 2);
/// L = min(N' - X - M, floor(N'/2)). Default u_j is the j-th nonzero element.
QuantumParams effective_params(const GaloisField& field, std::size_t n, std::size_t k,
                               std::size_t x, std::size_t t, std::size_t e,
                               const QuantumOverrides& overrides = {});

struct QuantumShare {
  std::size_t db = 0;
  std::array<StorageShare, 2> half;
};

/// Messages are K x 2L; symbols [0, L) go to the first half and [L, 2L) to the
/// second, each with its own storage noise.
std::vector<QuantumShare> encode_storage_double(const QuantumParams& params,
                                                const MessageSet& messages,
                                                const std::array<NoiseBlocks, 2>& noise);
std::vector<QuantumShare> encode_storage_double(const QuantumParams& params,
                                                const MessageSet& messages, RandomStream& rng);

/// What database n receives: Lambda_n(1), Lambda_n(2).
struct MaskShare {
  std::size_t db = 0;
  std::array<FieldElement, 2> value;
};

struct MaskingVector {
  std::array<FieldVector, 2> lambda;  // user-private, N' each
  std::array<FieldVector, 2> big_lambda;  // Lambda(k) = diag(gamma) D lambda(k)

  MaskShare share_for(std::size_t db) const;
};

MaskingVector masks_from_lambda(const QuantumParams& params, std::array<FieldVector, 2> lambda);
MaskingVector gen_masks(const QuantumParams& params, RandomStream& rng);

struct AnswerInstancePair {
  std::size_t db = 0;
  std::array<FieldElement, 2> raw;     // A_n(1), A_n(2)
  std::array<FieldElement, 2> scaled;  // u_n A_n(1)/gamma_n, v_n A_n(2)/gamma_n
};

AnswerInstancePair gen_answer_instances(const QuantumShare& share, const QueryVector& query,
                                        const CommonRandomness& cr1, const CommonRandomness& cr2,
                                        const MaskShare& mask, const QuantumParams& params);

struct QuantumUserState {
  std::size_t theta = 1;
  std::array<FieldVector, 2> lambda;
};

/// The 2N' channel inputs [scaled(1); scaled(2)] ordered by database.
FieldVector channel_input(std::span<const AnswerInstancePair> pairs, const QuantumParams& params);
/// y = G(u,v) * channel_input.
FieldVector over_the_air(std::span<const AnswerInstancePair> pairs, const QuantumParams& params);
/// Unmasks the message coordinates of y and returns the 2L symbols.
FieldVector transmit_and_decode(std::span<const AnswerInstancePair> pairs,
                                const QuantumParams& params, const QuantumUserState& user);

/// 2L / N'; throws if it disagrees with min{1, 2(1 - (X+M)/N)}.
Rational quantum_rate(const QuantumParams& params);

}  // namespace xspir
