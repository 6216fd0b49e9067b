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

#include "xspir/field.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <utility>

#include "xspir/errors.hpp"

namespace xspir {
namespace {

constexpr std::uint64_t kMaxExtensionOrder = 1u << 16;

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo b over F_p; b must be nonzero.
Poly poly_mod(Poly a, const Poly& b, std::uint32_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  const std::uint64_t lead_inv = [&] {
    std::uint64_t x = 1, base = b.back(), e = p - 2;
    while (e) {
      if (e & 1) x = x * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return x;
  }();
  while (a.size() >= b.size()) {
    const std::uint64_t factor = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) {
      const std::uint64_t t = factor * b[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - t) % p);
    }
    trim(a);
  }
  return a;
}

// Enumerates monic polynomials of exactly degree `deg` over F_p in
// lexicographic order of the lower coefficients.
bool next_monic(Poly& poly, std::uint32_t p) {
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    if (++poly[i] < p) return true;
    poly[i] = 0;
  }
  return false;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> poly) {
  Poly f(poly.begin(), poly.end());
  trim(f);
  if (f.size() < 2) return false;
  const std::size_t deg = f.size() - 1;
  for (std::size_t d = 1; d <= deg / 2; ++d) {
    Poly g(d + 1, 0);
    g[d] = 1;
    do {
      if (poly_mod(f, g, p).empty()) return false;
    } while (next_monic(g, p));
  }
  return true;
}

FieldSpec FieldSpec::prime(std::uint32_t p) { return FieldSpec{p, 1, {}}; }

FieldSpec FieldSpec::extension(std::uint32_t p, std::uint32_t r) {
  if (r == 1) return prime(p);
  if (!is_prime(p)) throw ConfigError("field.p-prime", std::to_string(p) + " is not prime");
  Poly m(r + 1, 0);
  m[r] = 1;
  do {
    if (m[0] != 0 && is_irreducible(p, m)) return FieldSpec{p, r, m};
  } while (next_monic(m, p));
  throw ConfigError("field.modulus", "no irreducible polynomial found");
}

std::uint64_t FieldSpec::order() const {
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < r; ++i) q *= p;
  return q;
}

std::string FieldSpec::to_string() const {
  std::ostringstream os;
  os << "GF(" << p;
  if (r > 1) os << "^" << r;
  os << ")";
  return os.str();
}

const GaloisField& GaloisField::get(const FieldSpec& spec) {
  static std::mutex mu;
  static std::vector<std::unique_ptr<GaloisField>> registry;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& f : registry) {
    if (f->spec_ == spec) return *f;
  }
  registry.push_back(std::unique_ptr<GaloisField>(new GaloisField(spec)));
  return *registry.back();
}

GaloisField::GaloisField(FieldSpec spec) : spec_(std::move(spec)) {
  const auto p = spec_.p;
  const auto r = spec_.r;
  if (!is_prime(p) || p >= (1u << 31)) {
    throw ConfigError("field.p-prime", std::to_string(p) + " is not a supported prime");
  }
  if (r < 1) throw ConfigError("field.r-positive", "extension degree must be >= 1");
  if (r == 1) {
    spec_.modulus.clear();
    q_ = p;
    pow_p_ = {1};
    return;
  }
  if (p != 2 && p != 3 && p != 5) {
    throw ConfigError("field.extension-prime",
                      "extension fields are supported for p in {2, 3, 5}");
  }
  if (spec_.order() > kMaxExtensionOrder) {
    throw ConfigError("field.order", "extension field order exceeds 65536");
  }
  if (spec_.modulus.size() != r + 1 || spec_.modulus.back() != 1) {
    throw ConfigError("field.modulus", "modulus must be monic of degree r");
  }
  for (auto c : spec_.modulus) {
    if (c >= p) throw ConfigError("field.modulus", "coefficient out of range");
  }
  if (!is_irreducible(p, spec_.modulus)) {
    throw ConfigError("field.modulus-irreducible", "modulus is reducible over F_p");
  }
  q_ = static_cast<std::uint32_t>(spec_.order());
  pow_p_.resize(r);
  pow_p_[0] = 1;
  for (std::uint32_t i = 1; i < r; ++i) pow_p_[i] = pow_p_[i - 1] * p;

  if (q_ <= 1024) {
    add_table_.resize(std::size_t{q_} * q_);
    for (std::uint32_t a = 0; a < q_; ++a) {
      for (std::uint32_t b = 0; b < q_; ++b) {
        std::uint32_t out = 0;
        for (std::uint32_t i = 0; i < r; ++i) {
          const std::uint32_t da = a / pow_p_[i] % p;
          const std::uint32_t db = b / pow_p_[i] % p;
          out += (da + db) % p * pow_p_[i];
        }
        add_table_[std::size_t{a} * q_ + b] = static_cast<std::uint16_t>(out);
      }
    }
  }

  // Log tables from the first primitive element.
  exp_.assign(2 * (q_ - 1), 0);
  log_.assign(q_, 0);
  for (std::uint32_t gen = 2; gen < q_; ++gen) {
    std::uint32_t x = 1;
    std::uint32_t k = 0;
    do {
      exp_[k] = x;
      x = poly_mul(x, gen);
      ++k;
    } while (x != 1 && k < q_ - 1);
    if (x == 1 && k == q_ - 1) break;
  }
  for (std::uint32_t k = 0; k < q_ - 1; ++k) {
    exp_[k + q_ - 1] = exp_[k];
    log_[exp_[k]] = k;
  }
}

std::uint32_t GaloisField::poly_mul(std::uint32_t a, std::uint32_t b) const {
  const auto p = spec_.p;
  const auto r = spec_.r;
  Poly pa(r), pb(r), prod(2 * r - 1, 0);
  for (std::uint32_t i = 0; i < r; ++i) {
    pa[i] = a / pow_p_[i] % p;
    pb[i] = b / pow_p_[i] % p;
  }
  for (std::uint32_t i = 0; i < r; ++i) {
    for (std::uint32_t j = 0; j < r; ++j) {
      prod[i + j] = (prod[i + j] + pa[i] * pb[j]) % p;
    }
  }
  Poly rem = poly_mod(prod, spec_.modulus, p);
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < rem.size(); ++i) out += rem[i] * pow_p_[i];
  return out;
}

std::uint32_t GaloisField::add(std::uint32_t a, std::uint32_t b) const {
  if (spec_.r == 1) {
    const std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<std::uint32_t>(s >= q_ ? s - q_ : s);
  }
  if (!add_table_.empty()) return add_table_[std::size_t{a} * q_ + b];
  std::uint32_t out = 0;
  for (std::uint32_t i = 0; i < spec_.r; ++i) {
    out += (a / pow_p_[i] % spec_.p + b / pow_p_[i] % spec_.p) % spec_.p * pow_p_[i];
  }
  return out;
}

std::uint32_t GaloisField::neg(std::uint32_t a) const {
  if (spec_.r == 1) return a == 0 ? 0 : q_ - a;
  std::uint32_t out = 0;
  for (std::uint32_t i = 0; i < spec_.r; ++i) {
    out += (spec_.p - a / pow_p_[i] % spec_.p) % spec_.p * pow_p_[i];
  }
  return out;
}

std::uint32_t GaloisField::sub(std::uint32_t a, std::uint32_t b) const {
  if (spec_.r == 1) return a >= b ? a - b : a + (q_ - b);
  return add(a, neg(b));
}

std::uint32_t GaloisField::mul(std::uint32_t a, std::uint32_t b) const {
  if (spec_.r == 1) {
    return static_cast<std::uint32_t>(std::uint64_t{a} * b % q_);
  }
  if (a == 0 || b == 0) return 0;
  return exp_[log_[a] + log_[b]];
}

std::uint32_t GaloisField::inv(std::uint32_t a) const {
  if (a == 0) throw Error("division by zero in field");
  if (spec_.r == 1) {
    // Extended Euclid on (a, p).
    std::int64_t t = 0, new_t = 1, r = q_, new_r = a;
    while (new_r != 0) {
      const std::int64_t k = r / new_r;
      t = std::exchange(new_t, t - k * new_t);
      r = std::exchange(new_r, r - k * new_r);
    }
    return static_cast<std::uint32_t>(t < 0 ? t + q_ : t);
  }
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

FieldElement GaloisField::zero() const { return FieldElement(*this, 0); }
FieldElement GaloisField::one() const { return FieldElement(*this, 1); }

FieldElement GaloisField::element(std::uint32_t index) const {
  if (index >= q_) throw Error("element index out of range for " + spec_.to_string());
  return FieldElement(*this, index);
}

FieldElement GaloisField::from_int(std::int64_t n) const {
  const std::int64_t p = spec_.p;
  std::int64_t m = n % p;
  if (m < 0) m += p;
  return FieldElement(*this, static_cast<std::uint32_t>(m));
}

FieldElement GaloisField::from_coeffs(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() > spec_.r) throw Error("too many coefficients for " + spec_.to_string());
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] >= spec_.p) throw Error("coefficient out of range");
    out += coeffs[i] * pow_p_[i];
  }
  return FieldElement(*this, out);
}

std::vector<FieldElement> GaloisField::enumerate() const {
  std::vector<FieldElement> out;
  out.reserve(q_);
  for (std::uint32_t i = 0; i < q_; ++i) out.emplace_back(*this, i);
  return out;
}

std::vector<FieldElement> enumerate(const FieldSpec& spec) {
  return GaloisField::get(spec).enumerate();
}

FieldElement::FieldElement(const GaloisField& field, std::uint32_t index)
    : field_(&field), value_(index) {}

const GaloisField& FieldElement::field() const {
  if (field_ == nullptr) throw Error("field element has no field");
  return *field_;
}

std::vector<std::uint32_t> FieldElement::coeffs() const {
  const auto& f = field();
  std::vector<std::uint32_t> out(f.degree());
  std::uint32_t v = value_;
  for (auto& c : out) {
    c = v % f.characteristic();
    v /= f.characteristic();
  }
  return out;
}

const GaloisField* FieldElement::check(const FieldElement& o) const {
  if (field_ != o.field_ || field_ == nullptr) throw Error("mixed-field operands");
  return field_;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  const auto* f = check(o);
  return FieldElement(*f, f->add(value_, o.value_));
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  const auto* f = check(o);
  return FieldElement(*f, f->sub(value_, o.value_));
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  const auto* f = check(o);
  return FieldElement(*f, f->mul(value_, o.value_));
}

FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inv(); }

FieldElement FieldElement::operator-() const {
  const auto& f = field();
  return FieldElement(f, f.neg(value_));
}

FieldElement FieldElement::inv() const {
  const auto& f = field();
  return FieldElement(f, f.inv(value_));
}

FieldElement FieldElement::pow(std::uint64_t e) const {
  const auto& f = field();
  FieldElement result = f.one();
  FieldElement base = *this;
  while (e) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

std::string FieldElement::to_string() const {
  if (field_ == nullptr || field_->degree() == 1) return std::to_string(value_);
  // Extension elements print as their coefficient tuple, e.g. "(1,0)".
  std::string s = "(";
  const auto c = coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + ")";
}

std::ostream& operator<<(std::ostream& os, const FieldElement& e) { return os << e.to_string(); }

}  // namespace xspir
