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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace xspir {

/// Describes F_q with q = p^r. For r > 1 `modulus` holds the r+1 coefficients
/// (lowest degree first) of a monic irreducible polynomial over F_p.
struct FieldSpec {
  std::uint32_t p = 2;
  std::uint32_t r = 1;
  std::vector<std::uint32_t> modulus;

  static FieldSpec prime(std::uint32_t p);
  /// Extension field with the first monic irreducible of degree r in
  /// lexicographic coefficient order.
  static FieldSpec extension(std::uint32_t p, std::uint32_t r);

  std::uint64_t order() const;
  std::string to_string() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

bool is_prime(std::uint64_t n);

/// Irreducibility over F_p by trial division against every monic polynomial
/// of degree 1..deg/2. Coefficients are lowest degree first.
bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> poly);

class FieldElement;

/// Immutable arithmetic context. Instances are interned per spec and live for
/// the whole process, so elements can hold a plain pointer to their field.
class GaloisField {
 public:
  /// Validates `spec` and returns the shared instance; throws ConfigError.
  static const GaloisField& get(const FieldSpec& spec);

  const FieldSpec& spec() const { return spec_; }
  std::uint32_t characteristic() const { return spec_.p; }
  std::uint32_t degree() const { return spec_.r; }
  std::uint32_t order() const { return q_; }

  FieldElement zero() const;
  FieldElement one() const;
  /// Element with canonical index `index` (base-p digits are the coefficients).
  FieldElement element(std::uint32_t index) const;
  /// Image of an integer in the prime subfield.
  FieldElement from_int(std::int64_t n) const;
  FieldElement from_coeffs(std::span<const std::uint32_t> coeffs) const;
  /// All q elements: index order, so 0 then 1 come first.
  std::vector<FieldElement> enumerate() const;

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t neg(std::uint32_t a) const;
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inv(std::uint32_t a) const;

 private:
  explicit GaloisField(FieldSpec spec);
  std::uint32_t poly_mul(std::uint32_t a, std::uint32_t b) const;

  FieldSpec spec_;
  std::uint32_t q_;
  std::vector<std::uint32_t> pow_p_;
  // extension fields only
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint16_t> add_table_;
};

/// Element of F_q in canonical coefficient form.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(const GaloisField& field, std::uint32_t index);

  const GaloisField& field() const;
  bool has_field() const { return field_ != nullptr; }
  std::uint32_t index() const { return value_; }
  std::vector<std::uint32_t> coeffs() const;
  bool is_zero() const { return value_ == 0; }
  bool is_one() const { return value_ == 1; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  /// Throws Error("division by zero in field") for zero.
  FieldElement inv() const;
  FieldElement pow(std::uint64_t e) const;

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.field_ == b.field_ && a.value_ == b.value_;
  }

  std::string to_string() const;

 private:
  const GaloisField* check(const FieldElement& o) const;

  const GaloisField* field_ = nullptr;
  std::uint32_t value_ = 0;
};

std::ostream& operator<<(std::ostream& os, const FieldElement& e);

// Free-function spellings of the arithmetic.
inline FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement inv(const FieldElement& a) { return a.inv(); }
std::vector<FieldElement> enumerate(const FieldSpec& spec);

using FieldVector = std::vector<FieldElement>;

}  // namespace xspir

template <>
struct std::hash<xspir::FieldElement> {
  std::size_t operator()(const xspir::FieldElement& e) const noexcept {
    return std::hash<std::uint32_t>{}(e.index());
  }
};
