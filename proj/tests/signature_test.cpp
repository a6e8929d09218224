#include "sigjoin/signature.hpp"

#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "oracles.hpp"

namespace sigjoin {
namespace {

std::string random_bytes(std::mt19937_64& rng, std::size_t len) {
  std::string s(len, '\0');
  for (auto& c : s) c = static_cast<char>(rng() & 0xFF);
  return s;
}

std::vector<std::uint32_t> widen(const std::vector<GfElement>& v) { return {v.begin(), v.end()}; }

TEST(SymbolizeTest, PacksLittleEndianPairs) {
  EXPECT_TRUE(symbolize("", 16).empty());
  EXPECT_EQ(symbolize("AB", 16), std::vector<GfElement>{0x4241});
  EXPECT_EQ(symbolize("A", 16), std::vector<GfElement>{0x0041});
  EXPECT_EQ(symbolize("ABC", 16), (std::vector<GfElement>{0x4241, 0x0043}));
  EXPECT_EQ(symbolize("AB", 8), (std::vector<GfElement>{0x41, 0x42}));
}

TEST(SymbolizeTest, EnforcesLengthBound) {
  EXPECT_NO_THROW(symbolize(std::string(254, 'x'), 8));
  EXPECT_THROW(symbolize(std::string(255, 'x'), 8), StringTooLong);
  EXPECT_NO_THROW(symbolize(std::string(131068, 'x'), 16));
  EXPECT_THROW(symbolize(std::string(131069, 'x'), 16), StringTooLong);
  EXPECT_THROW(SignatureBase({16, 2}).compute(std::string(131069, 'x')), StringTooLong);
}

TEST(SignatureBaseTest, ElementsArePowersOfAlpha) {
  SignatureBase base({16, 4});
  const auto& ctx = base.context();
  ASSERT_EQ(base.elements().size(), 4u);
  std::unordered_set<GfElement> seen;
  for (unsigned j = 1; j <= 4; ++j) {
    EXPECT_EQ(base.elements()[j - 1], gf_pow(ctx, 2, j));
    EXPECT_NE(base.elements()[j - 1], 0);
    seen.insert(base.elements()[j - 1]);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(SignatureBaseTest, RejectsBadSymbolCounts) {
  EXPECT_THROW(SignatureBase({16, 0}), std::invalid_argument);
  EXPECT_THROW(SignatureBase({16, kMaxSignatureSymbols + 1}), std::invalid_argument);
  EXPECT_THROW(SignatureBase({12, 2}), GfError);
}

TEST(SignatureTest, EmptyStringHasZeroSignature) {
  const auto sig = compute_signature(SignatureBase(), "");
  EXPECT_EQ(sig.byte_len(), 0u);
  for (auto s : sig.symbols()) EXPECT_EQ(s, 0);
}

TEST(SignatureTest, SingleSymbolTimesBase) {
  for (unsigned f : {8u, 16u}) {
    SignatureBase base({f, 3});
    const auto sig = base.compute("Z");
    for (unsigned j = 0; j < 3; ++j) EXPECT_EQ(sig[j], gf_mul(base.context(), 'Z', base.elements()[j]));
  }
}

TEST(SignatureTest, HandEvaluatedGf8Example) {
  // alpha + alpha^2 = 0x02 ^ 0x04
  const std::string ones{'\x01', '\x01'};
  const auto sig = SignatureBase({8, 1}).compute(ones);
  EXPECT_EQ(sig[0], 0x06);
  EXPECT_EQ(oracle::naive_signature({1, 1}, 1, 8, 0x11D), std::vector<std::uint32_t>{0x06});
}

TEST(SignatureTest, MatchesNaiveOracle) {
  std::mt19937_64 rng(42);
  for (unsigned f : {8u, 16u}) {
    for (unsigned n_sig : {1u, 2u, 4u, 8u}) {
      SignatureBase base({f, n_sig});
      for (int t = 0; t < 60; ++t) {
        const auto bytes = random_bytes(rng, rng() % 200);
        const auto sig = base.compute(bytes);
        const auto expected =
            oracle::naive_signature(widen(symbolize(bytes, f)), n_sig, f, base.context().primitive_poly());
        ASSERT_EQ(widen({sig.symbols().begin(), sig.symbols().end()}), expected);
        ASSERT_EQ(sig.byte_len(), bytes.size());
      }
    }
  }
}

TEST(SignatureTest, ZeroSymbolsAnywhereMatchOracle) {
  // Sparse strings: most symbols are zero, including whole 16-bit lanes, and
  // lengths cover every tail shape. Long ones cross exponent-fold boundaries.
  std::mt19937_64 rng(43);
  for (unsigned f : {8u, 16u}) {
    for (unsigned n_sig = 1; n_sig <= kMaxSignatureSymbols; ++n_sig) {
      SignatureBase base({f, n_sig});
      for (std::size_t len : {1u, 2u, 3u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 200u, 254u}) {
        std::string bytes(len, '\0');
        for (auto& c : bytes) {
          if (rng() % 4 == 0) c = static_cast<char>(1 + rng() % 255);
        }
        const auto sig = base.compute(bytes);
        const auto expected =
            oracle::naive_signature(widen(symbolize(bytes, f)), n_sig, f, base.context().primitive_poly());
        ASSERT_EQ(widen({sig.symbols().begin(), sig.symbols().end()}), expected) << "f=" << f << " len=" << len;
      }
    }
  }
  SignatureBase wide;
  std::string lengthy(5000, 'x');
  for (std::size_t i = 0; i < lengthy.size(); i += 7) lengthy[i] = '\0';
  const auto expected = oracle::naive_signature(widen(symbolize(lengthy, 16)), 2, 16, GfContext::kPoly16);
  const auto sig = wide.compute(lengthy);
  EXPECT_EQ(widen({sig.symbols().begin(), sig.symbols().end()}), expected);
}

TEST(SignatureTest, DetectsAnyChangeOfUpToNSymbols) {
  std::mt19937_64 rng(9);
  for (unsigned n_sig = 1; n_sig <= 4; ++n_sig) {
    SignatureBase base({8, n_sig});
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t len = 1 + rng() % 254;
      const auto original = random_bytes(rng, len);
      auto changed = original;
      const unsigned flips = 1 + rng() % std::min<std::size_t>(n_sig, len);
      std::unordered_set<std::size_t> positions;
      while (positions.size() < flips) positions.insert(rng() % len);
      for (auto pos : positions) changed[pos] = static_cast<char>(changed[pos] ^ (1 + rng() % 255));
      ASSERT_FALSE(signatures_equal(base.compute(original), base.compute(changed)))
          << "n_sig=" << n_sig << " len=" << len << " flips=" << flips;
    }
  }
}

TEST(SignatureTest, IsLinearOverEqualLengthStrings) {
  std::mt19937_64 rng(5);
  SignatureBase base({16, 2});
  for (int t = 0; t < 500; ++t) {
    const std::size_t len = rng() % 300;
    const auto p = random_bytes(rng, len);
    const auto q = random_bytes(rng, len);
    std::string x(len, '\0');
    for (std::size_t i = 0; i < len; ++i) x[i] = static_cast<char>(p[i] ^ q[i]);
    const auto sp = base.compute(p), sq = base.compute(q), sx = base.compute(x);
    for (unsigned j = 0; j < 2; ++j) ASSERT_EQ(sx[j], gf_add(sp[j], sq[j]));
  }
}

TEST(SignatureTest, LeadingZeroSymbolsShiftByBasePowers) {
  std::mt19937_64 rng(6);
  SignatureBase base({16, 3});
  const auto& ctx = base.context();
  for (int t = 0; t < 200; ++t) {
    const auto p = random_bytes(rng, 2 * (rng() % 100));
    const unsigned k = static_cast<unsigned>(rng() % 20);
    const auto shifted = std::string(2 * k, '\0') + p;
    const auto s0 = base.compute(p), s1 = base.compute(shifted);
    for (unsigned j = 0; j < 3; ++j) {
      ASSERT_EQ(s1[j], gf_mul(ctx, s0[j], gf_pow(ctx, base.elements()[j], k)));
    }
  }
}

TEST(SignatureTest, EqualityContract) {
  SignatureBase base;
  EXPECT_TRUE(signatures_equal(base.compute("hello world"), base.compute("hello world")));
  EXPECT_FALSE(signatures_equal(base.compute("abc"), base.compute("abd")));
  // A trailing zero symbol adds nothing to the sums; the length keeps them apart.
  const auto a = base.compute("ab");
  const auto b = base.compute(std::string("ab\0\0", 4));
  EXPECT_EQ(std::vector<GfElement>(a.symbols().begin(), a.symbols().end()),
            std::vector<GfElement>(b.symbols().begin(), b.symbols().end()));
  EXPECT_FALSE(signatures_equal(a, b));
}

TEST(SignatureTest, DifferentBasesAreRejected) {
  const auto a = SignatureBase({16, 2}).compute("x");
  const auto b = SignatureBase({16, 3}).compute("x");
  const auto c = SignatureBase({8, 2}).compute("x");
  EXPECT_THROW(signatures_equal(a, b), BaseMismatch);
  EXPECT_THROW(signatures_equal(a, c), BaseMismatch);
}

TEST(SignatureTest, HexRendering) {
  SignatureBase base;
  const auto sig = base.compute("A");
  // component 1 = 0x41 * alpha, component 2 = 0x41 * alpha^2
  EXPECT_EQ(sig.to_hex(), "01040082");
  EXPECT_EQ(sig.to_hex().size(), 8u);
  EXPECT_EQ(SignatureBase({8, 3}).compute("").to_hex(), "000000");
}

TEST(SignatureTest, NoCollisionsAmongRandomDistinctStrings) {
  std::mt19937_64 rng(2024);
  SignatureBase base;
  std::size_t collisions = 0;
  for (int t = 0; t < 100000; ++t) {
    const auto p = random_bytes(rng, 100);
    auto q = random_bytes(rng, 100);
    if (p == q) continue;
    if (signatures_equal(base.compute(p), base.compute(q))) ++collisions;
  }
  EXPECT_EQ(collisions, 0u);
}

}  // namespace
}  // namespace sigjoin
