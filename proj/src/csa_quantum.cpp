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

#include "xspir/csa_quantum.hpp"

#include <algorithm>
#include <string>

#include "xspir/errors.hpp"

namespace xspir {

QuantumParams::QuantumParams(SchemeParams scheme, std::size_t n_original, TransferMatrix transfer,
                             FieldMatrix qcsa)
    : scheme_(std::move(scheme)),
      n_original_(n_original),
      transfer_(std::move(transfer)),
      qcsa_(std::move(qcsa)) {}

QuantumParams effective_params(const GaloisField& field, std::size_t n, std::size_t k,
                               std::size_t x, std::size_t t, std::size_t e,
                               const QuantumOverrides& overrides) {
  const std::size_t m = std::max(t, e);
  if (x + m >= n) {
    throw ConfigError("params.L-positive", "N - X - max(T,E) must be >= 1");
  }
  std::size_t n_eff = n;
  if (n - x - m > n / 2) n_eff = std::min(n, std::max<std::size_t>(2 * (x + m), 2));
  const std::size_t l = std::min(n_eff - x - m, n_eff / 2);
  if (l < 1) {
    throw ConfigError("quantum.L-floor-half", "no admissible L <= floor(N'/2) for N' = " +
                                                  std::to_string(n_eff));
  }

  std::optional<EvalPoints> points;
  if (overrides.alpha || overrides.f) {
    auto defaults = EvalPoints::defaults(field, n_eff, l);
    points.emplace(overrides.alpha.value_or(defaults.alpha()), overrides.f.value_or(defaults.f()));
  }
  auto scheme = SchemeParams::with_length(field, n_eff, k, x, t, e, l, std::move(points));

  FieldVector u;
  if (overrides.u) {
    u = *overrides.u;
    if (u.size() != n_eff) {
      throw ConfigError("dual.u-length", "u needs N' = " + std::to_string(n_eff) + " entries");
    }
  } else {
    if (field.order() <= n_eff) {
      throw ConfigError("field.order-sufficient", "not enough nonzero elements for u");
    }
    for (std::size_t j = 0; j < n_eff; ++j) u.push_back(field.element(static_cast<std::uint32_t>(j + 1)));
  }
  DualPair pair;
  if (overrides.v) {
    if (overrides.v->size() != n_eff) {
      throw ConfigError("dual.v-length", "v needs N' = " + std::to_string(n_eff) + " entries");
    }
    pair = {std::move(u), *overrides.v};
  } else {
    pair = DualPair::from_u(std::move(u), scheme.points().alpha());
  }
  auto transfer = build_transfer(scheme.points(), pair, l);
  const FieldVector ones(n_eff, field.one());
  auto qcsa = build_D(scheme.points(), ones, l);
  return QuantumParams(std::move(scheme), n, std::move(transfer), std::move(qcsa));
}

std::vector<QuantumShare> encode_storage_double(const QuantumParams& params,
                                                const MessageSet& messages,
                                                const std::array<NoiseBlocks, 2>& noise) {
  const std::size_t l = params.l();
  if (messages.len() != 2 * l) {
    throw Error("quantum messages need length 2L = " + std::to_string(2 * l) + ", got " +
                std::to_string(messages.len()));
  }
  const auto first = encode_storage(params.scheme(), messages.slice(0, l), noise[0]);
  const auto second = encode_storage(params.scheme(), messages.slice(l, l), noise[1]);
  std::vector<QuantumShare> out(params.n_effective());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = {n, {first[n], second[n]}};
  return out;
}

std::vector<QuantumShare> encode_storage_double(const QuantumParams& params,
                                                const MessageSet& messages, RandomStream& rng) {
  const auto& s = params.scheme();
  std::array<NoiseBlocks, 2> noise{NoiseBlocks::random(s.field(), s.l(), s.x(), s.k(), rng),
                                   NoiseBlocks::random(s.field(), s.l(), s.x(), s.k(), rng)};
  return encode_storage_double(params, messages, noise);
}

MaskShare MaskingVector::share_for(std::size_t db) const {
  if (db >= big_lambda[0].size()) throw Error("mask index out of range");
  return {db, {big_lambda[0][db], big_lambda[1][db]}};
}

MaskingVector masks_from_lambda(const QuantumParams& params, std::array<FieldVector, 2> lambda) {
  const auto& gamma = params.scheme().gamma();
  MaskingVector out;
  for (std::size_t kappa = 0; kappa < 2; ++kappa) {
    if (lambda[kappa].size() != params.n_effective()) throw Error("lambda must have N' entries");
    auto big = mat_vec(params.qcsa(), lambda[kappa]);
    for (std::size_t n = 0; n < big.size(); ++n) big[n] *= gamma[n];
    out.big_lambda[kappa] = std::move(big);
  }
  out.lambda = std::move(lambda);
  return out;
}

MaskingVector gen_masks(const QuantumParams& params, RandomStream& rng) {
  const auto& field = params.scheme().field();
  return masks_from_lambda(params, {rng.uniform_vector(field, params.n_effective()),
                                    rng.uniform_vector(field, params.n_effective())});
}

AnswerInstancePair gen_answer_instances(const QuantumShare& share, const QueryVector& query,
                                        const CommonRandomness& cr1, const CommonRandomness& cr2,
                                        const MaskShare& mask, const QuantumParams& params) {
  if (share.db != query.db || share.db != mask.db) {
    throw Error("index mismatch between share, query and mask");
  }
  const auto& scheme = params.scheme();
  const std::size_t n = share.db;
  AnswerInstancePair out;
  out.db = n;
  out.raw[0] = answer(share.half[0], query, cr1, scheme).value + mask.value[0];
  out.raw[1] = answer(share.half[1], query, cr2, scheme).value + mask.value[1];
  const FieldElement inv_gamma = scheme.gamma()[n].inv();
  out.scaled[0] = params.pair().u[n] * out.raw[0] * inv_gamma;
  out.scaled[1] = params.pair().v[n] * out.raw[1] * inv_gamma;
  return out;
}

FieldVector channel_input(std::span<const AnswerInstancePair> pairs, const QuantumParams& params) {
  const std::size_t n_eff = params.n_effective();
  if (pairs.size() != n_eff) {
    throw Error("need " + std::to_string(n_eff) + " answer pairs, got " +
                std::to_string(pairs.size()));
  }
  FieldVector x(2 * n_eff);
  std::vector<bool> seen(n_eff, false);
  for (const auto& p : pairs) {
    if (p.db >= n_eff || seen[p.db]) throw Error("missing or duplicate answer pair");
    seen[p.db] = true;
    x[p.db] = p.scaled[0];
    x[n_eff + p.db] = p.scaled[1];
  }
  return x;
}

FieldVector over_the_air(std::span<const AnswerInstancePair> pairs, const QuantumParams& params) {
  return apply_channel(params.transfer(), channel_input(pairs, params));
}

FieldVector transmit_and_decode(std::span<const AnswerInstancePair> pairs,
                                const QuantumParams& params, const QuantumUserState& user) {
  const std::size_t l = params.l();
  const auto y = over_the_air(pairs, params);
  for (const auto& lam : user.lambda) {
    if (lam.size() != params.n_effective()) throw Error("user lambda must have N' entries");
  }
  FieldVector out;
  out.reserve(2 * l);
  for (std::size_t j = 0; j < l; ++j) out.push_back(y[j] - user.lambda[0][j]);
  for (std::size_t j = 0; j < l; ++j) out.push_back(y[params.mu() + j] - user.lambda[1][j]);
  return out;
}

Rational quantum_rate(const QuantumParams& params) {
  const auto& s = params.scheme();
  const Rational rate(static_cast<std::int64_t>(2 * s.l()),
                      static_cast<std::int64_t>(params.n_effective()));
  const auto n = static_cast<std::int64_t>(params.n_original());
  const Rational theorem =
      min(Rational(1), Rational(2) * (Rational(1) - Rational(static_cast<std::int64_t>(s.x() + s.m()), n)));
  if (!(rate == theorem)) {
    throw Error("achieved quantum rate " + rate.to_string() + " differs from " + theorem.to_string());
  }
  return rate;
}

}  // namespace xspir
