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

#include <gtest/gtest.h>

#include <set>

#include "xspir/errors.hpp"

namespace xspir {
namespace {

const GaloisField& F(std::uint32_t p) { return GaloisField::get(FieldSpec::prime(p)); }

const GaloisField& Gf4() { return GaloisField::get(FieldSpec{2, 2, {1, 1, 1}}); }

// x in GF(4) is the element with coefficient tuple (0, 1).
FieldElement X4() { return Gf4().from_coeffs(std::vector<std::uint32_t>{0, 1}); }

std::vector<FieldSpec> SmallFields() {
  std::vector<FieldSpec> out;
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u}) out.push_back(FieldSpec::prime(p));
  out.push_back(FieldSpec::extension(2, 2));
  out.push_back(FieldSpec::extension(2, 3));
  out.push_back(FieldSpec::extension(2, 4));
  out.push_back(FieldSpec::extension(3, 2));
  return out;
}

TEST(FieldTest, PrimeAddition) {
  const auto& f = F(7);
  EXPECT_EQ(f.from_int(3) + f.from_int(5), f.from_int(1));
  for (const auto& x : f.enumerate()) EXPECT_EQ(f.zero() + x, x);
}

TEST(FieldTest, Gf4CharacteristicTwoCancellation) {
  const auto x = X4();
  EXPECT_EQ(x + (x + Gf4().one()), Gf4().one());
}

TEST(FieldTest, PrimeMultiplicationTable) {
  const auto& f = F(7);
  // Table from plain integer arithmetic.
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) EXPECT_EQ(f.from_int(a) * f.from_int(b), f.from_int(a * b % 7));
  EXPECT_EQ(f.from_int(3) * f.from_int(5), f.one());
}

TEST(FieldTest, Gf4SquareReducesByModulus) {
  const auto x = X4();
  EXPECT_EQ(x * x, x + Gf4().one());
}

TEST(FieldTest, Inverses) {
  EXPECT_EQ(F(7).from_int(3).inv(), F(7).from_int(5));
  EXPECT_EQ(F(5).from_int(4).inv(), F(5).from_int(4));
  for (const auto& spec : SmallFields()) {
    const auto& f = GaloisField::get(spec);
    EXPECT_EQ(f.one().inv(), f.one());
  }
}

TEST(FieldTest, InverseOfZeroThrows) {
  try {
    F(7).zero().inv();
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "division by zero in field");
  }
}

TEST(FieldTest, MixedFieldOperandsRejected) {
  EXPECT_THROW(F(7).one() + F(5).one(), Error);
  EXPECT_THROW(F(7).one() * Gf4().one(), Error);
}

TEST(FieldTest, Enumerate) {
  const auto f3 = enumerate(FieldSpec::prime(3));
  ASSERT_EQ(f3.size(), 3u);
  EXPECT_EQ(f3[0].index(), 0u);
  EXPECT_EQ(f3[1].index(), 1u);
  EXPECT_EQ(f3[2].index(), 2u);
  for (const auto& spec : SmallFields()) {
    const auto all = enumerate(spec);
    ASSERT_EQ(all.size(), spec.order());
    EXPECT_TRUE(all[0].is_zero());
    EXPECT_TRUE(all[1].is_one());
    std::set<std::uint32_t> distinct;
    for (const auto& e : all) distinct.insert(e.index());
    EXPECT_EQ(distinct.size(), spec.order());
  }
}

TEST(FieldTest, AxiomsHoldExhaustively) {
  for (const auto& spec : SmallFields()) {
    const auto& f = GaloisField::get(spec);
    const auto all = f.enumerate();
    std::set<std::uint32_t> ids;
    for (const auto& e : all) ids.insert(e.index());
    for (const auto& a : all) {
      if (!a.is_zero()) {
        int inverses = 0;
        for (const auto& b : all) inverses += (a * b).is_one();
        EXPECT_EQ(inverses, 1) << spec.to_string();
        EXPECT_TRUE((a * a.inv()).is_one());
      }
      EXPECT_TRUE((a + (-a)).is_zero());
      for (const auto& b : all) {
        EXPECT_TRUE(ids.count((a + b).index()) && ids.count((a * b).index()));
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        for (const auto& c : all) {
          EXPECT_EQ((a + b) + c, a + (b + c));
          EXPECT_EQ((a * b) * c, a * (b * c));
          EXPECT_EQ(a * (b + c), a * b + a * c);
        }
      }
    }
  }
}

TEST(FieldTest, Frobenius) {
  for (const auto& spec : SmallFields()) {
    if (spec.p > 7) continue;
    const auto& f = GaloisField::get(spec);
    for (const auto& a : f.enumerate())
      for (const auto& b : f.enumerate()) EXPECT_EQ((a + b).pow(spec.p), a.pow(spec.p) + b.pow(spec.p));
  }
}

TEST(FieldTest, CoefficientsRoundTrip) {
  const auto& f = GaloisField::get(FieldSpec::extension(3, 2));
  for (const auto& e : f.enumerate()) EXPECT_EQ(f.from_coeffs(e.coeffs()), e);
}

TEST(FieldTest, Irreducibility) {
  const std::vector<std::uint32_t> x2_x_1{1, 1, 1};
  const std::vector<std::uint32_t> x2_1{1, 0, 1};  // (x+1)^2 over F_2
  EXPECT_TRUE(is_irreducible(2, x2_x_1));
  EXPECT_FALSE(is_irreducible(2, x2_1));
  EXPECT_TRUE(is_irreducible(3, std::vector<std::uint32_t>{1, 0, 1}));  // x^2+1 over F_3
  EXPECT_EQ(FieldSpec::extension(2, 2).modulus, x2_x_1);
}

TEST(FieldTest, InvalidSpecsRejected) {
  EXPECT_THROW(GaloisField::get(FieldSpec::prime(9)), ConfigError);
  EXPECT_THROW(GaloisField::get(FieldSpec{2, 2, {1, 0, 1}}), ConfigError);
  EXPECT_THROW(GaloisField::get(FieldSpec{7, 2, {3, 0, 1}}), ConfigError);  // p outside {2,3,5}
  EXPECT_THROW(GaloisField::get(FieldSpec{2, 0, {}}), ConfigError);
}

TEST(FieldTest, InternedPerSpec) {
  EXPECT_EQ(&F(11), &F(11));
  EXPECT_EQ(&GaloisField::get(FieldSpec::extension(2, 2)), &Gf4());
}

}  // namespace
}  // namespace xspir
