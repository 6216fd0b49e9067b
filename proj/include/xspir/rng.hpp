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

#include <cstdint>
#include <string_view>

#include "xspir/field.hpp"

namespace xspir {

/// Counter-based generator: output i is a SplitMix64 finalizer applied to
/// key + i * golden-gamma, with key derived from (seed, label). Equal seeds
/// and labels replay exactly.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64();
  /// Uniform on [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);
  FieldElement uniform(const GaloisField& field);
  FieldVector uniform_vector(const GaloisField& field, std::size_t n);
  /// Nonzero uniform element.
  FieldElement uniform_nonzero(const GaloisField& field);

  RandomStream substream(std::string_view label) const;
  std::uint64_t key() const { return key_; }

 private:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace xspir
