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
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "xspir/csa_classical.hpp"
#include "xspir/csa_quantum.hpp"

namespace xspir {

enum class Mode { kClassical, kQuantum };
std::string to_string(Mode m);

/// A classical or quantum protocol instance.
class Instance {
 public:
  static Instance classical(SchemeParams params);
  static Instance quantum(QuantumParams params);

  Mode mode() const { return mode_; }
  bool is_quantum() const { return mode_ == Mode::kQuantum; }
  const SchemeParams& scheme() const;
  /// Throws for classical instances.
  const QuantumParams& quantum() const;
  /// Storage halves / answer instances per database: 1 or 2.
  std::size_t halves() const { return is_quantum() ? 2 : 1; }
  /// Symbols per message: L or 2L.
  std::size_t message_len() const { return halves() * scheme().l(); }

 private:
  Instance(Mode mode, std::variant<SchemeParams, QuantumParams> params)
      : mode_(mode), params_(std::move(params)) {}

  Mode mode_;
  std::variant<SchemeParams, QuantumParams> params_;
};

/// Every random input of one retrieval, explicit so that audits can enumerate
/// it. Vectors sized by `halves()` hold one entry per storage half / answer
/// instance.
struct Randomness {
  MessageSet messages;
  std::vector<NoiseBlocks> storage_noise;
  NoiseBlocks query_noise;
  std::vector<CommonRandomness> common;
  std::array<FieldVector, 2> lambda;  // quantum only

  static Randomness zeros(const Instance& inst);
};

/// Draws from the labeled substreams "messages", "storage-noise",
/// "user-query", "common-randomness-1", "common-randomness-2" and "masks".
Randomness draw_randomness(const Instance& inst, std::uint64_t seed);

/// All artifacts of one retrieval.
struct Transcript {
  std::size_t theta = 1;
  std::vector<StorageShare> storage;           // classical
  std::vector<QuantumShare> quantum_storage;   // quantum
  std::vector<QueryVector> queries;
  std::vector<MaskShare> masks;                // quantum
  std::vector<AnswerSymbol> answers;           // classical
  std::vector<AnswerInstancePair> answer_pairs;  // quantum
  FieldVector channel_output;                  // quantum: y
  FieldVector decoded;
};

Transcript execute(const Instance& inst, std::size_t theta, const Randomness& rnd);

/// Stored symbols of database n for storage half h.
const StorageShare& storage_half(const Transcript& t, std::size_t n, std::size_t h);

}  // namespace xspir
