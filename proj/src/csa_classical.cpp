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

#include "xspir/csa_classical.hpp"

#include <algorithm>
#include <string>

#include "xspir/errors.hpp"

namespace xspir {
namespace {

void check_theta(std::size_t theta, std::size_t k) {
  if (theta < 1 || theta > k) {
    throw ConfigError("theta-range",
                      "theta = " + std::to_string(theta) + " not in [1.." + std::to_string(k) + "]");
  }
}

}  // namespace

SchemeParams::SchemeParams(const GaloisField& field, std::size_t n, std::size_t k, std::size_t x,
                           std::size_t t, std::size_t e, std::size_t l, EvalPoints points)
    : field_(&field), n_(n), k_(k), x_(x), t_(t), e_(e), l_(l), points_(std::move(points)) {
  gamma_ = points_.gamma();
}

SchemeParams SchemeParams::with_length(const GaloisField& field, std::size_t n, std::size_t k,
                                       std::size_t x, std::size_t t, std::size_t e,
                                       std::size_t l, std::optional<EvalPoints> points) {
  if (k < 1) throw ConfigError("params.K-positive", "need at least one message");
  const std::size_t m = std::max(t, e);
  if (x + m >= n) {
    throw ConfigError("params.L-positive", "L = N - X - max(T,E) must be >= 1 (N=" +
                                               std::to_string(n) + ", X=" + std::to_string(x) +
                                               ", M=" + std::to_string(m) + ")");
  }
  if (l < 1 || l > n - x - m) {
    throw ConfigError("params.L-range", "L = " + std::to_string(l) + " not in [1..N-X-M]");
  }
  if (n + l > field.order()) {
    throw ConfigError("field.order-sufficient", "q = " + std::to_string(field.order()) +
                                                    " < N + L = " + std::to_string(n + l));
  }
  EvalPoints pts = points ? std::move(*points) : EvalPoints::defaults(field, n, l);
  if (&pts.field() != &field) throw ConfigError("points.field", "points from a different field");
  if (pts.n() != n || pts.l() != l) {
    throw ConfigError("points.dimensions", "need " + std::to_string(n) + " alphas and " +
                                               std::to_string(l) + " f values");
  }
  return SchemeParams(field, n, k, x, t, e, l, std::move(pts));
}

SchemeParams SchemeParams::classical(const GaloisField& field, std::size_t n, std::size_t k,
                                     std::size_t x, std::size_t t, std::size_t e,
                                     std::optional<EvalPoints> points) {
  const std::size_t m = std::max(t, e);
  if (x + m >= n) {
    throw ConfigError("params.L-positive", "L = N - X - max(T,E) must be >= 1 (N=" +
                                               std::to_string(n) + ", X=" + std::to_string(x) +
                                               ", M=" + std::to_string(m) + ")");
  }
  return with_length(field, n, k, x, t, e, n - x - m, std::move(points));
}

MessageSet::MessageSet(std::size_t k, std::size_t len, FieldVector data)
    : k_(k), len_(len), data_(std::move(data)) {
  if (data_.size() != k * len) throw Error("message set must be K x L");
}

MessageSet MessageSet::random(const GaloisField& field, std::size_t k, std::size_t len,
                              RandomStream& rng) {
  return MessageSet(k, len, rng.uniform_vector(field, k * len));
}

MessageSet MessageSet::zeros(const GaloisField& field, std::size_t k, std::size_t len) {
  return MessageSet(k, len, FieldVector(k * len, field.zero()));
}

FieldVector MessageSet::column(std::size_t j) const {
  FieldVector out;
  out.reserve(k_);
  for (std::size_t m = 0; m < k_; ++m) out.push_back(at(m, j));
  return out;
}

FieldVector MessageSet::message(std::size_t theta) const {
  check_theta(theta, k_);
  return FieldVector(data_.begin() + static_cast<std::ptrdiff_t>((theta - 1) * len_),
                     data_.begin() + static_cast<std::ptrdiff_t>(theta * len_));
}

MessageSet MessageSet::slice(std::size_t first, std::size_t count) const {
  if (first + count > len_) throw Error("message slice out of range");
  FieldVector out;
  out.reserve(k_ * count);
  for (std::size_t m = 0; m < k_; ++m)
    for (std::size_t j = 0; j < count; ++j) out.push_back(at(m, first + j));
  return MessageSet(k_, count, std::move(out));
}

NoiseBlocks NoiseBlocks::zeros(const GaloisField& field, std::size_t blocks, std::size_t degree,
                               std::size_t k) {
  return {blocks, degree, std::vector<FieldVector>(blocks * degree, FieldVector(k, field.zero()))};
}

NoiseBlocks NoiseBlocks::random(const GaloisField& field, std::size_t blocks, std::size_t degree,
                                std::size_t k, RandomStream& rng) {
  NoiseBlocks out{blocks, degree, {}};
  out.vectors.reserve(blocks * degree);
  for (std::size_t i = 0; i < blocks * degree; ++i) out.vectors.push_back(rng.uniform_vector(field, k));
  return out;
}

std::vector<StorageShare> encode_storage(const SchemeParams& params, const MessageSet& messages,
                                         const NoiseBlocks& noise) {
  const std::size_t l = params.l();
  const std::size_t k = params.k();
  if (messages.k() != k || messages.len() != l) {
    throw Error("message set is " + std::to_string(messages.k()) + "x" +
                std::to_string(messages.len()) + ", expected " + std::to_string(k) + "x" +
                std::to_string(l));
  }
  if (noise.blocks != l || noise.degree != params.x()) throw Error("storage noise shape mismatch");
  const auto& pts = params.points();
  std::vector<StorageShare> shares(params.n());
  for (std::size_t n = 0; n < params.n(); ++n) {
    shares[n].db = n;
    shares[n].blocks.reserve(l);
    for (std::size_t j = 0; j < l; ++j) {
      FieldVector block = messages.column(j);
      const FieldElement base = pts.f()[j] - pts.alpha()[n];
      FieldElement power = base;
      for (std::size_t i = 0; i < params.x(); ++i) {
        const auto& r = noise.at(j, i);
        for (std::size_t m = 0; m < k; ++m) block[m] += power * r[m];
        power *= base;
      }
      shares[n].blocks.push_back(std::move(block));
    }
  }
  return shares;
}

std::vector<StorageShare> encode_storage(const SchemeParams& params, const MessageSet& messages,
                                         RandomStream& rng) {
  const auto noise = NoiseBlocks::random(params.field(), params.l(), params.x(), params.k(), rng);
  return encode_storage(params, messages, noise);
}

std::vector<QueryVector> gen_queries(const SchemeParams& params, std::size_t theta,
                                     const NoiseBlocks& noise) {
  check_theta(theta, params.k());
  const std::size_t l = params.l();
  if (noise.blocks != l || noise.degree != params.m()) throw Error("query noise shape mismatch");
  const auto& field = params.field();
  const auto& pts = params.points();
  std::vector<QueryVector> queries(params.n());
  for (std::size_t n = 0; n < params.n(); ++n) {
    queries[n].db = n;
    for (std::size_t j = 0; j < l; ++j) {
      FieldVector block(params.k(), field.zero());
      block[theta - 1] = field.one();
      const FieldElement base = pts.f()[j] - pts.alpha()[n];
      FieldElement power = base;
      for (std::size_t i = 0; i < params.m(); ++i) {
        const auto& z = noise.at(j, i);
        for (std::size_t m = 0; m < params.k(); ++m) block[m] += power * z[m];
        power *= base;
      }
      const FieldElement scale = params.gamma()[n] / base;
      for (auto& v : block) v *= scale;
      queries[n].blocks.push_back(std::move(block));
    }
  }
  return queries;
}

QueryBundle gen_queries(const SchemeParams& params, std::size_t theta, RandomStream& rng) {
  check_theta(theta, params.k());
  auto noise = NoiseBlocks::random(params.field(), params.l(), params.m(), params.k(), rng);
  auto queries = gen_queries(params, theta, noise);
  return {std::move(queries), std::move(noise)};
}

CommonRandomness gen_common_randomness(const SchemeParams& params, RandomStream& rng) {
  return {rng.uniform_vector(params.field(), params.noise_dim())};
}

AnswerSymbol answer(const StorageShare& share, const QueryVector& query,
                    const CommonRandomness& cr, const SchemeParams& params) {
  if (share.db != query.db) {
    throw Error("index mismatch: share for database " + std::to_string(share.db) +
                ", query for database " + std::to_string(query.db));
  }
  if (share.db >= params.n()) throw Error("database index out of range");
  if (share.blocks.size() != params.l() || query.blocks.size() != params.l()) {
    throw Error("share/query block count mismatch");
  }
  if (cr.symbols.size() != params.noise_dim()) throw Error("common randomness length mismatch");
  const auto& field = params.field();
  std::uint32_t acc = 0;
  for (std::size_t j = 0; j < params.l(); ++j) {
    const auto& s = share.blocks[j];
    const auto& q = query.blocks[j];
    if (s.size() != params.k() || q.size() != params.k()) throw Error("block length mismatch");
    for (std::size_t m = 0; m < params.k(); ++m) {
      acc = field.add(acc, field.mul(s[m].index(), q[m].index()));
    }
  }
  const FieldElement& alpha = params.points().alpha()[share.db];
  std::uint32_t mask = 0;
  std::uint32_t power = 1;
  for (const auto& z : cr.symbols) {
    mask = field.add(mask, field.mul(power, z.index()));
    power = field.mul(power, alpha.index());
  }
  acc = field.add(acc, field.mul(params.gamma()[share.db].index(), mask));
  return {share.db, FieldElement(field, acc)};
}

FieldVector decode_all(std::span<const AnswerSymbol> answers, const SchemeParams& params) {
  if (answers.size() != params.n()) {
    throw Error("need " + std::to_string(params.n()) + " answers, got " +
                std::to_string(answers.size()));
  }
  FieldVector a(params.n());
  std::vector<bool> seen(params.n(), false);
  for (const auto& ans : answers) {
    if (ans.db >= params.n() || seen[ans.db]) throw Error("duplicate or out-of-range answer");
    seen[ans.db] = true;
    a[ans.db] = ans.value;
  }
  return mat_vec(invert(build_B(params.points())), a);
}

FieldVector decode(std::span<const AnswerSymbol> answers, const SchemeParams& params) {
  auto all = decode_all(answers, params);
  all.resize(params.l());
  return all;
}

Rational classical_rate(const SchemeParams& params) {
  const auto n = static_cast<std::int64_t>(params.n());
  const Rational rate(static_cast<std::int64_t>(params.l()), n);
  const Rational theorem =
      Rational(1) - Rational(static_cast<std::int64_t>(params.x() + params.m()), n);
  if (!(rate == theorem)) {
    throw Error("achieved rate " + rate.to_string() + " differs from " + theorem.to_string());
  }
  return rate;
}

}  // namespace xspir
