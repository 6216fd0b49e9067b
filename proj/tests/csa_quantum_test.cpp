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

#include <gtest/gtest.h>

#include "xspir/errors.hpp"

namespace xspir {
namespace {

const GaloisField& F(std::uint32_t p) { return GaloisField::get(FieldSpec::prime(p)); }

FieldVector Ints(const GaloisField& f, std::initializer_list<long> xs) {
  FieldVector v;
  for (long x : xs) v.push_back(f.from_int(x));
  return v;
}

TEST(CsaQuantumTest, EffectiveParamsExamples) {
  const auto& f = F(11);
  const auto a = effective_params(f, 4, 2, 1, 1, 1);
  EXPECT_EQ(a.n_effective(), 4u);
  EXPECT_EQ(a.l(), 2u);
  const auto b = effective_params(f, 6, 2, 1, 1, 1);
  EXPECT_EQ(b.n_original(), 6u);
  EXPECT_EQ(b.n_effective(), 4u);
  EXPECT_EQ(b.l(), 2u);
  EXPECT_EQ(quantum_rate(b), Rational(1));
  const auto c = effective_params(f, 5, 2, 1, 2, 1);
  EXPECT_EQ(c.n_effective(), 5u);
  EXPECT_EQ(c.l(), 2u);
  EXPECT_TRUE(c.pair().is_dual(c.scheme().points().alpha()));
  EXPECT_EQ(check_feasibility(c.transfer().matrix()), Feasibility::kFeasible);
}

TEST(CsaQuantumTest, EffectiveParamsErrors) {
  EXPECT_THROW(effective_params(F(11), 3, 2, 2, 1, 1), ConfigError);
  EXPECT_THROW(effective_params(F(5), 6, 2, 1, 2, 1), ConfigError);
}

TEST(CsaQuantumTest, RateExamples) {
  const auto& f = F(13);
  EXPECT_EQ(quantum_rate(effective_params(f, 4, 2, 1, 1, 1)), Rational(1));
  EXPECT_EQ(quantum_rate(effective_params(f, 5, 2, 1, 1, 2)), Rational(4, 5));
  EXPECT_EQ(quantum_rate(effective_params(f, 6, 2, 1, 1, 1)), Rational(1));
}

TEST(CsaQuantumTest, MasksFollowQcsaMatrix) {
  const auto& f = F(7);
  const auto params = effective_params(f, 4, 2, 1, 1, 1);
  const auto& pts = params.scheme().points();
  const auto& gamma = params.scheme().gamma();
  const auto zero = masks_from_lambda(params, {FieldVector(4, f.zero()), FieldVector(4, f.zero())});
  for (std::size_t k = 0; k < 2; ++k) {
    for (const auto& x : zero.big_lambda[k]) EXPECT_TRUE(x.is_zero());
  }
  const auto e1 = masks_from_lambda(params, {Ints(f, {1, 0, 0, 0}), FieldVector(4, f.zero())});
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_EQ(e1.big_lambda[0][n], gamma[n] / (pts.f()[0] - pts.alpha()[n]));
  }
  RandomStream rng(3, "masks");
  const auto m = gen_masks(params, rng);
  const auto lhs = mat_mul(FieldMatrix::diag(gamma), params.qcsa());
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(mat_vec(lhs, m.lambda[k]), m.big_lambda[k]);
  EXPECT_EQ(m.share_for(2).value[1], m.big_lambda[1][2]);
}

TEST(CsaQuantumTest, HandInstanceSingleMessage) {
  const auto& f = F(7);
  QuantumOverrides o;
  o.alpha = Ints(f, {1, 2});
  o.f = Ints(f, {3});
  const auto params = effective_params(f, 2, 1, 0, 1, 0, o);
  ASSERT_EQ(params.n_effective(), 2u);
  ASSERT_EQ(params.l(), 1u);
  EXPECT_EQ(params.scheme().gamma(), Ints(f, {2, 1}));
  const MessageSet w(1, 2, Ints(f, {2, 5}));
  const auto shares = encode_storage_double(params, w, {NoiseBlocks::zeros(f, 1, 0, 1),
                                                        NoiseBlocks::zeros(f, 1, 0, 1)});
  NoiseBlocks z{1, 1, {Ints(f, {4})}};
  const auto q = gen_queries(params.scheme(), 1, z);
  EXPECT_EQ(q[0].blocks[0], Ints(f, {2}));
  EXPECT_EQ(q[1].blocks[0], Ints(f, {5}));
  const auto masks = masks_from_lambda(params, {Ints(f, {1, 0}), Ints(f, {0, 0})});
  const CommonRandomness cr1{Ints(f, {1})}, cr2{Ints(f, {3})};
  std::vector<AnswerInstancePair> pairs;
  for (std::size_t n = 0; n < 2; ++n) {
    pairs.push_back(gen_answer_instances(shares[n], q[n], cr1, cr2, masks.share_for(n), params));
  }
  EXPECT_EQ(pairs[0].raw[0], f.from_int(0));
  EXPECT_EQ(pairs[1].raw[0], f.from_int(5));
  EXPECT_EQ(pairs[0].raw[1], f.from_int(2));
  EXPECT_EQ(pairs[1].raw[1], f.from_int(0));
  EXPECT_EQ(transmit_and_decode(pairs, params, {1, masks.lambda}), Ints(f, {2, 5}));
}

TEST(CsaQuantumTest, HalvesMatchClassicalEncoding) {
  const auto& f = F(11);
  const auto params = effective_params(f, 5, 3, 1, 1, 1);
  RandomStream rng(8, "halves");
  const auto w = MessageSet::random(f, 3, 2 * params.l(), rng);
  const std::array<NoiseBlocks, 2> r{NoiseBlocks::random(f, params.l(), 1, 3, rng),
                                     NoiseBlocks::random(f, params.l(), 1, 3, rng)};
  const auto shares = encode_storage_double(params, w, r);
  for (std::size_t h = 0; h < 2; ++h) {
    const auto classical = encode_storage(params.scheme(), w.slice(h * params.l(), params.l()), r[h]);
    for (std::size_t n = 0; n < shares.size(); ++n) {
      EXPECT_EQ(shares[n].half[h].blocks, classical[n].blocks);
    }
  }
  EXPECT_THROW(encode_storage_double(params, MessageSet::zeros(f, 3, params.l()), r), Error);
}

struct Run {
  MessageSet w;
  std::vector<QueryVector> q;
  std::vector<QuantumShare> shares;
  std::array<CommonRandomness, 2> cr;
  MaskingVector masks;
  std::vector<AnswerInstancePair> pairs;
};

Run Execute(const QuantumParams& params, std::size_t theta, RandomStream& rng) {
  const auto& s = params.scheme();
  auto w = MessageSet::random(s.field(), s.k(), 2 * s.l(), rng);
  auto shares = encode_storage_double(params, w, rng);
  auto q = gen_queries(s, theta, rng).queries;
  std::array<CommonRandomness, 2> cr{gen_common_randomness(s, rng), gen_common_randomness(s, rng)};
  auto masks = gen_masks(params, rng);
  std::vector<AnswerInstancePair> pairs;
  for (std::size_t n = 0; n < s.n(); ++n) {
    pairs.push_back(gen_answer_instances(shares[n], q[n], cr[0], cr[1], masks.share_for(n), params));
  }
  return {std::move(w), std::move(q), std::move(shares), std::move(cr), std::move(masks),
          std::move(pairs)};
}

TEST(CsaQuantumTest, MaskDifferenceAndZeroMaskCollapse) {
  const auto& f = F(13);
  const auto params = effective_params(f, 5, 2, 1, 2, 1);
  const auto& s = params.scheme();
  RandomStream rng(12, "collapse");
  const auto run = Execute(params, 2, rng);
  const MaskShare none{0, {f.zero(), f.zero()}};
  for (std::size_t n = 0; n < s.n(); ++n) {
    for (std::size_t k = 0; k < 2; ++k) {
      const auto hat = answer(run.shares[n].half[k], run.q[n], run.cr[k], s).value;
      EXPECT_EQ(run.pairs[n].raw[k] - hat, run.masks.big_lambda[k][n]);
    }
    MaskShare zero = none;
    zero.db = n;
    const auto plain = gen_answer_instances(run.shares[n], run.q[n], run.cr[0], run.cr[1], zero, params);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(plain.raw[k], answer(run.shares[n].half[k], run.q[n], run.cr[k], s).value);
    }
  }
}

TEST(CsaQuantumTest, StackedAnswersFactorThroughQcsa) {
  const auto& f = F(11);
  const auto params = effective_params(f, 4, 2, 1, 1, 1);
  const auto& s = params.scheme();
  RandomStream rng(2, "stacked");
  const auto run = Execute(params, 1, rng);
  const auto bd = mat_mul(FieldMatrix::diag(s.gamma()), params.qcsa());
  for (std::size_t k = 0; k < 2; ++k) {
    // X(k): message symbols and interference from the classical decoder, plus lambda.
    std::vector<AnswerSymbol> hat;
    for (std::size_t n = 0; n < s.n(); ++n) {
      hat.push_back(answer(run.shares[n].half[k], run.q[n], run.cr[k], s));
    }
    auto x = decode_all(hat, s);
    for (std::size_t j = 0; j < s.l(); ++j) EXPECT_EQ(x[j], run.w.at(0, k * s.l() + j));
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += run.masks.lambda[k][j];
    const auto stacked = mat_vec(bd, x);
    for (std::size_t n = 0; n < s.n(); ++n) EXPECT_EQ(stacked[n], run.pairs[n].raw[k]);
  }
}

TEST(CsaQuantumTest, OverTheAirCoordinates) {
  const auto& f = F(13);
  for (std::size_t n : {4u, 5u, 6u}) {
    const auto params = effective_params(f, n, 2, 1, 1, 0);
    const auto& s = params.scheme();
    RandomStream rng(n, "air");
    const auto run = Execute(params, 2, rng);
    const auto y = over_the_air(run.pairs, params);
    ASSERT_EQ(y.size(), s.n());
    std::array<FieldVector, 2> x;
    for (std::size_t k = 0; k < 2; ++k) {
      std::vector<AnswerSymbol> hat;
      for (std::size_t db = 0; db < s.n(); ++db) {
        hat.push_back(answer(run.shares[db].half[k], run.q[db], run.cr[k], s));
      }
      x[k] = decode_all(hat, s);
      for (std::size_t j = 0; j < s.n(); ++j) x[k][j] += run.masks.lambda[k][j];
    }
    const std::size_t l = s.l(), mu = params.mu(), nu = params.nu();
    std::size_t row = 0;
    for (std::size_t i = 0; i < l; ++i) EXPECT_EQ(y[row++], x[0][i]);
    for (std::size_t i = 0; i < mu - l; ++i) EXPECT_EQ(y[row++], x[0][l + nu + i]);
    for (std::size_t i = 0; i < l; ++i) EXPECT_EQ(y[row++], x[1][i]);
    for (std::size_t i = 0; i < nu - l; ++i) EXPECT_EQ(y[row++], x[1][l + mu + i]);
  }
}

TEST(CsaQuantumTest, ZeroEverythingGivesZeroOutput) {
  const auto& f = F(7);
  const auto params = effective_params(f, 4, 2, 1, 1, 1);
  const auto& s = params.scheme();
  const auto shares = encode_storage_double(params, MessageSet::zeros(f, 2, 4),
                                            {NoiseBlocks::zeros(f, 2, 1, 2), NoiseBlocks::zeros(f, 2, 1, 2)});
  auto q = gen_queries(s, 1, NoiseBlocks::zeros(f, 2, 1, 2));
  for (auto& qn : q) {
    for (auto& b : qn.blocks) b.assign(2, f.zero());
  }
  const CommonRandomness cr{FieldVector(s.noise_dim(), f.zero())};
  std::vector<AnswerInstancePair> pairs;
  for (std::size_t n = 0; n < 4; ++n) {
    pairs.push_back(gen_answer_instances(shares[n], q[n], cr, cr, {n, {f.zero(), f.zero()}}, params));
  }
  for (const auto& y : over_the_air(pairs, params)) EXPECT_TRUE(y.is_zero());
  pairs.pop_back();
  EXPECT_THROW(transmit_and_decode(pairs, params, {1, {FieldVector(4, f.zero()), FieldVector(4, f.zero())}}),
               Error);
}

TEST(CsaQuantumTest, EndToEndOverGrid) {
  for (std::uint32_t p : {7u, 11u, 13u}) {
    const auto& f = F(p);
    for (std::size_t n = 4; n <= 6; ++n) {
      for (std::size_t x = 0; x <= 2; ++x) {
        for (std::size_t t = 0; t <= 2; ++t) {
          for (std::size_t e = 0; e <= 2; ++e) {
            if (x + std::max(t, e) >= n) continue;
            std::optional<QuantumParams> params;
            try {
              params.emplace(effective_params(f, n, 2, x, t, e));
            } catch (const ConfigError& err) {
              // Only a field too small for N' + L distinct points is acceptable.
              ASSERT_EQ(err.invariant(), "field.order-sufficient") << err.what();
              continue;
            }
            SCOPED_TRACE(testing::Message() << "q=" << p << " N=" << n << " X=" << x
                                            << " T=" << t << " E=" << e);
            RandomStream rng(p * 1000 + n * 100 + x * 10 + t, "grid");
            for (std::size_t theta = 1; theta <= 2; ++theta) {
              const auto run = Execute(*params, theta, rng);
              const auto got = transmit_and_decode(run.pairs, *params, {theta, run.masks.lambda});
              EXPECT_EQ(got, run.w.message(theta));
            }
            const std::size_t m = std::max(t, e);
            const auto bound = min(Rational(1), Rational(2 * (n - x - m), n));
            EXPECT_EQ(quantum_rate(*params), bound);
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace xspir
