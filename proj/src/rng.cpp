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

#include "xspir/rng.hpp"

namespace xspir {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view label)
    : key_(splitmix64(splitmix64(seed) ^ fnv1a(label))) {}

std::uint64_t RandomStream::next_u64() { return splitmix64(key_ + kGolden * ++counter_); }

std::uint64_t RandomStream::below(std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

FieldElement RandomStream::uniform(const GaloisField& field) {
  return field.element(static_cast<std::uint32_t>(below(field.order())));
}

FieldVector RandomStream::uniform_vector(const GaloisField& field, std::size_t n) {
  FieldVector v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(uniform(field));
  return v;
}

FieldElement RandomStream::uniform_nonzero(const GaloisField& field) {
  return field.element(static_cast<std::uint32_t>(1 + below(field.order() - 1)));
}

RandomStream RandomStream::substream(std::string_view label) const {
  return RandomStream(splitmix64(key_ ^ fnv1a(label)));
}

}  // namespace xspir
