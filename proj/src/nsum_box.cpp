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

#include "xspir/nsum_box.hpp"

#include "xspir/errors.hpp"

namespace xspir {

FieldVector derive_dual_v(std::span<const FieldElement> u, std::span<const FieldElement> alpha) {
  const std::size_t n = u.size();
  if (alpha.size() != n) throw Error("u and alpha lengths differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i].is_zero()) throw ConfigError("dual.u-nonzero", "u_" + std::to_string(i + 1) + " = 0");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u[i] == u[j]) throw ConfigError("dual.u-distinct", "repeated u entry " + u[i].to_string());
      if (alpha[i] == alpha[j]) {
        throw ConfigError("points.alpha-distinct", "repeated alpha " + alpha[i].to_string());
      }
    }
  }
  FieldVector v;
  v.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    FieldElement prod = u[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) prod *= alpha[j] - alpha[i];
    }
    v.push_back(prod.inv());
  }
  return v;
}

DualPair DualPair::from_u(FieldVector u, std::span<const FieldElement> alpha) {
  auto v = derive_dual_v(u, alpha);
  return {std::move(u), std::move(v)};
}

bool DualPair::is_dual(std::span<const FieldElement> alpha) const {
  if (u.size() != alpha.size() || v.size() != alpha.size()) return false;
  try {
    return derive_dual_v(u, alpha) == v;
  } catch (const ConfigError&) {
    return false;
  }
}

FieldMatrix build_GN(const GaloisField& field, std::size_t n, std::size_t l) {
  const std::size_t nu = (n + 1) / 2;
  const std::size_t mu = n / 2;
  if (l > mu) {
    throw ConfigError("nsum.L-floor-half",
                      "L = " + std::to_string(l) + " exceeds floor(N/2) = " + std::to_string(mu));
  }
  FieldMatrix g(field, n, 2 * n);
  std::size_t row = 0;
  for (std::size_t i = 0; i < l; ++i) g(row++, i) = field.one();
  for (std::size_t i = 0; i < mu - l; ++i) g(row++, l + nu + i) = field.one();
  for (std::size_t i = 0; i < l; ++i) g(row++, n + i) = field.one();
  for (std::size_t i = 0; i < nu - l; ++i) g(row++, n + l + mu + i) = field.one();
  return g;
}

TransferMatrix::TransferMatrix(FieldMatrix g, DualPair pair, EvalPoints points, std::size_t l)
    : g_(std::move(g)), pair_(std::move(pair)), points_(std::move(points)), l_(l) {}

TransferMatrix build_transfer(const EvalPoints& points, const DualPair& pair, std::size_t l) {
  const auto& field = points.field();
  const std::size_t n = points.n();
  const auto hu = build_D(points, pair.u, l);
  const auto hv = build_D(points, pair.v, l);
  const auto h_inv = block_diag(invert(hu), invert(hv));
  auto g = mat_mul(build_GN(field, n, l), h_inv);
  return TransferMatrix(std::move(g), pair, points, l);
}

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::kFeasible:
      return "feasible";
    case Feasibility::kRankDeficient:
      return "rank-deficient";
    case Feasibility::kNotSelfOrthogonal:
      return "not-self-orthogonal";
  }
  return "unknown";
}

Feasibility check_feasibility(const FieldMatrix& g) {
  const std::size_t n = g.rows();
  if (g.cols() != 2 * n) {
    throw Error("transfer matrix must be N x 2N, got " + std::to_string(g.rows()) + "x" +
                std::to_string(g.cols()));
  }
  if (rank(g) != n) return Feasibility::kRankDeficient;
  const auto gx = g.columns(0, n);
  const auto gz = g.columns(n, n);
  if (!(mat_mul(gx, gz.transpose()) == mat_mul(gz, gx.transpose()))) {
    return Feasibility::kNotSelfOrthogonal;
  }
  return Feasibility::kFeasible;
}

FieldVector apply_channel(const TransferMatrix& g, std::span<const FieldElement> x) {
  if (x.size() != 2 * g.n()) {
    throw Error("channel input must have 2N = " + std::to_string(2 * g.n()) + " symbols");
  }
  return mat_vec(g.matrix(), x);
}

}  // namespace xspir
