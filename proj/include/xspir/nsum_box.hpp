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

#include "xspir/field.hpp"
#include "xspir/linalg.hpp"

namespace xspir {

/// Scaling pair (u, v) that makes D(alpha, u, f) and D(alpha, v, f) dual.
struct DualPair {
  FieldVector u;
  FieldVector v;

  /// Builds v from u; see derive_dual_v.
  static DualPair from_u(FieldVector u, std::span<const FieldElement> alpha);
  /// True when u is nonzero and distinct and v matches the closed form.
  bool is_dual(std::span<const FieldElement> alpha) const;
};

/// v_j = (u_j * prod_{i != j} (alpha_j - alpha_i))^{-1}.
FieldVector derive_dual_v(std::span<const FieldElement> u, std::span<const FieldElement> alpha);

/// N x 2N zero-one selector. Row blocks (heights L, mu-L, L, nu-L) pick
/// the first L and the last mu-L coordinates of the first half of the input
/// and the first L and last nu-L of the second half; nu = ceil(N/2),
/// mu = floor(N/2).
FieldMatrix build_GN(const GaloisField& field, std::size_t n, std::size_t l);

class TransferMatrix {
 public:
  TransferMatrix(FieldMatrix g, DualPair pair, EvalPoints points, std::size_t l);

  const FieldMatrix& matrix() const { return g_; }
  FieldMatrix gx() const { return g_.columns(0, g_.rows()); }
  FieldMatrix gz() const { return g_.columns(g_.rows(), g_.rows()); }
  const DualPair& pair() const { return pair_; }
  const EvalPoints& points() const { return points_; }
  std::size_t l() const { return l_; }
  std::size_t n() const { return g_.rows(); }

 private:
  FieldMatrix g_;
  DualPair pair_;
  EvalPoints points_;
  std::size_t l_;
};

/// G(u,v) = G_N * blkdiag(D(alpha,u,f), D(alpha,v,f))^{-1}. The pair is not
/// required to be dual here; check_feasibility reports whether it is usable.
TransferMatrix build_transfer(const EvalPoints& points, const DualPair& pair, std::size_t l);

enum class Feasibility { kFeasible, kRankDeficient, kNotSelfOrthogonal };
std::string to_string(Feasibility f);

/// Feasible iff rank(G) = N and Gx * Gz^T is symmetric.
Feasibility check_feasibility(const FieldMatrix& g);

/// y = G * x.
FieldVector apply_channel(const TransferMatrix& g, std::span<const FieldElement> x);

}  // namespace xspir
