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

#include "xspir/protocol.hpp"

#include "xspir/errors.hpp"

namespace xspir {

std::string to_string(Mode m) { return m == Mode::kClassical ? "classical" : "quantum"; }

Instance Instance::classical(SchemeParams params) {
  return Instance(Mode::kClassical, std::move(params));
}

Instance Instance::quantum(QuantumParams params) {
  return Instance(Mode::kQuantum, std::move(params));
}

const SchemeParams& Instance::scheme() const {
  if (const auto* q = std::get_if<QuantumParams>(&params_)) return q->scheme();
  return std::get<SchemeParams>(params_);
}

const QuantumParams& Instance::quantum() const {
  if (const auto* q = std::get_if<QuantumParams>(&params_)) return *q;
  throw Error("instance is classical");
}

Randomness Randomness::zeros(const Instance& inst) {
  const auto& s = inst.scheme();
  const auto& f = s.field();
  Randomness r{MessageSet::zeros(f, s.k(), inst.message_len()),
               {},
               NoiseBlocks::zeros(f, s.l(), s.m(), s.k()),
               {},
               {}};
  for (std::size_t h = 0; h < inst.halves(); ++h) {
    r.storage_noise.push_back(NoiseBlocks::zeros(f, s.l(), s.x(), s.k()));
    r.common.push_back({FieldVector(s.noise_dim(), f.zero())});
  }
  if (inst.is_quantum()) {
    r.lambda = {FieldVector(s.n(), f.zero()), FieldVector(s.n(), f.zero())};
  }
  return r;
}

Randomness draw_randomness(const Instance& inst, std::uint64_t seed) {
  const auto& s = inst.scheme();
  const auto& f = s.field();
  RandomStream msg_rng(seed, "messages");
  RandomStream storage_rng(seed, "storage-noise");
  RandomStream query_rng(seed, "user-query");
  Randomness r{MessageSet::random(f, s.k(), inst.message_len(), msg_rng),
               {},
               NoiseBlocks::random(f, s.l(), s.m(), s.k(), query_rng),
               {},
               {}};
  for (std::size_t h = 0; h < inst.halves(); ++h) {
    r.storage_noise.push_back(NoiseBlocks::random(f, s.l(), s.x(), s.k(), storage_rng));
    RandomStream cr_rng(seed, "common-randomness-" + std::to_string(h + 1));
    r.common.push_back(gen_common_randomness(s, cr_rng));
  }
  if (inst.is_quantum()) {
    RandomStream mask_rng(seed, "masks");
    r.lambda = {mask_rng.uniform_vector(f, s.n()), mask_rng.uniform_vector(f, s.n())};
  }
  return r;
}

Transcript execute(const Instance& inst, std::size_t theta, const Randomness& rnd) {
  const auto& s = inst.scheme();
  Transcript t;
  t.theta = theta;
  t.queries = gen_queries(s, theta, rnd.query_noise);
  if (!inst.is_quantum()) {
    t.storage = encode_storage(s, rnd.messages, rnd.storage_noise.at(0));
    t.answers.reserve(s.n());
    for (std::size_t n = 0; n < s.n(); ++n) {
      t.answers.push_back(answer(t.storage[n], t.queries[n], rnd.common.at(0), s));
    }
    t.decoded = decode(t.answers, s);
    return t;
  }
  const auto& qp = inst.quantum();
  t.quantum_storage =
      encode_storage_double(qp, rnd.messages, {rnd.storage_noise.at(0), rnd.storage_noise.at(1)});
  const auto masks = masks_from_lambda(qp, rnd.lambda);
  t.answer_pairs.reserve(s.n());
  for (std::size_t n = 0; n < s.n(); ++n) {
    t.masks.push_back(masks.share_for(n));
    t.answer_pairs.push_back(gen_answer_instances(t.quantum_storage[n], t.queries[n],
                                                  rnd.common.at(0), rnd.common.at(1),
                                                  t.masks[n], qp));
  }
  t.channel_output = over_the_air(t.answer_pairs, qp);
  t.decoded = transmit_and_decode(t.answer_pairs, qp, {theta, rnd.lambda});
  return t;
}

const StorageShare& storage_half(const Transcript& t, std::size_t n, std::size_t h) {
  if (!t.quantum_storage.empty()) return t.quantum_storage.at(n).half.at(h);
  if (h != 0) throw Error("classical storage has a single half");
  return t.storage.at(n);
}

}  // namespace xspir
