#include "sigjoin/join.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "oracles.hpp"
#include "sigjoin/generator.hpp"

namespace sigjoin {
namespace {

Relation keyed(const std::vector<std::string>& keys, std::int64_t first_id = 1) {
  Relation rel(Schema({{"id", ColumnType::Integer}, {"k", ColumnType::String}}, "k"));
  for (const auto& k : keys) rel.append({first_id++, k});
  return rel;
}

JoinSpec spec_for(JoinAlgorithm algorithm, SigMode mode = SigMode::Verify, std::size_t partitions = 8,
                  SigConfig config = {}) {
  return JoinSpec{"k", "k", algorithm, mode, partitions, config};
}

std::vector<RowPair> sorted(std::vector<RowPair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<RowPair> oracle_pairs(const Relation& r, const Relation& s) {
  return oracle::nested_loop_pairs(r.string_column("k"), s.string_column("k"));
}

/// Keys over a small alphabet so that duplicates on both sides are common.
std::vector<std::string> random_keys(std::mt19937_64& rng, std::size_t count, std::size_t len, unsigned alphabet) {
  std::vector<std::string> keys(count);
  for (auto& k : keys) {
    k.resize(len);
    for (auto& c : k) c = static_cast<char>('a' + rng() % alphabet);
  }
  return keys;
}

constexpr JoinAlgorithm kExactAlgorithms[] = {JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature,
                                              JoinAlgorithm::GraceBaseline, JoinAlgorithm::GraceSignature};

TEST(NestedLoopTest, Examples) {
  const auto r = keyed({"aa", "bb"});
  const auto s = keyed({"bb", "cc"}, 10);
  const auto result = nested_loop_join(r, s, "k", "k");
  EXPECT_EQ(result.pairs, (std::vector<RowPair>{{1, 0}}));
  EXPECT_TRUE(nested_loop_join(keyed({}), s, "k", "k").pairs.empty());
  EXPECT_THROW(nested_loop_join(r, s, "missing", "k"), MissingColumn);
  EXPECT_THROW(nested_loop_join(r, s, "id", "k"), std::invalid_argument);
}

TEST(NestedLoopTest, LexicographicOrder) {
  const auto r = keyed({"x", "y", "x"});
  const auto s = keyed({"x", "x", "y"});
  EXPECT_EQ(nested_loop_join(r, s, "k", "k").pairs, (std::vector<RowPair>{{0, 0}, {0, 1}, {1, 2}, {2, 0}, {2, 1}}));
}

TEST(NestedLoopTest, FindsPlantedMatches) {
  GenSpec gen;
  gen.card_r = 500;
  gen.card_s = 900;
  gen.attr_len = 12;
  gen.selectivity = 0.002;
  const auto pair = generate_pair(gen);
  EXPECT_EQ(nested_loop_join(pair.r, pair.s, kGeneratedKeyColumn, kGeneratedKeyColumn).pairs.size(),
            pair.planted_matches);
}

TEST(HashingTest, BucketAndPartitionAreInRangeAndIndependent) {
  SignatureBase base;
  std::size_t same = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto key = "key-" + std::to_string(i);
    const auto sig = base.compute(key);
    ASSERT_LT(bucket_of(key, 37), 37u);
    ASSERT_LT(partition_of(sig, 5), 5u);
    if (bucket_of(sig, 16) == partition_of(sig, 16)) ++same;
  }
  // independent routing agrees about 1/16 of the time
  EXPECT_LT(same, 2000u / 16 * 2);
  EXPECT_EQ(bucket_count_for(0), 1u);
  EXPECT_EQ(bucket_count_for(5), 16u);
  EXPECT_EQ(bucket_count_for(8), 16u);
}

TEST(BuildTest, EmptyRelation) {
  for (auto algo : {JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature}) {
    const auto rel = keyed({});
    const auto table = build(rel, spec_for(algo));
    EXPECT_EQ(table.size(), 0u);
    for (std::size_t b = 0; b < table.bucket_count(); ++b) EXPECT_TRUE(table.bucket(b).empty());
    EXPECT_EQ(table.digest_bytes(), 0u);
  }
}

TEST(BuildTest, IdenticalKeysShareBucket) {
  const auto rel = keyed({"same-key", "other", "same-key"});
  const auto table = build(rel, spec_for(JoinAlgorithm::HashSignature));
  SignatureBase base;
  const auto b = bucket_of(base.compute("same-key"), table.bucket_count());
  const auto rows = table.bucket(b);
  const auto sigs = table.bucket_signatures(b);
  std::vector<std::uint32_t> mine;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (sigs[i] == base.compute("same-key")) mine.push_back(rows[i]);
  }
  EXPECT_EQ(mine, (std::vector<std::uint32_t>{0, 2}));
}

TEST(BuildTest, EveryRowInItsOwnBucketExactlyOnce) {
  std::mt19937_64 rng(3);
  const auto rel = keyed(random_keys(rng, 700, 6, 4));
  for (auto algo : {JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature}) {
    const auto table = build(rel, spec_for(algo));
    EXPECT_EQ(table.bucket_count(), 2048u);
    std::vector<int> seen(rel.size(), 0);
    const auto keys = rel.string_column("k");
    SignatureBase base;
    for (std::size_t b = 0; b < table.bucket_count(); ++b) {
      for (auto row : table.bucket(b)) {
        ++seen[row];
        const auto expected = algo == JoinAlgorithm::HashSignature ? bucket_of(base.compute(keys[row]), table.bucket_count())
                                                                   : bucket_of(keys[row], table.bucket_count());
        EXPECT_EQ(expected, b);
      }
      if (algo == JoinAlgorithm::HashBaseline) {
        for (std::size_t i = 0; i < table.bucket(b).size(); ++i) EXPECT_EQ(table.bucket_keys(b)[i], keys[table.bucket(b)[i]]);
      }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST(BuildTest, SignatureStorageIsSmall) {
  std::mt19937_64 rng(11);
  const auto rel = keyed(random_keys(rng, 10000, 100, 26));
  const auto sig_table = build(rel, spec_for(JoinAlgorithm::HashSignature));
  const auto key_table = build(rel, spec_for(JoinAlgorithm::HashBaseline));
  EXPECT_EQ(sig_table.digest_bytes(), 10000u * (4 + 4));
  EXPECT_EQ(key_table.digest_bytes(), 10000u * 100);
  EXPECT_GT(static_cast<double>(key_table.digest_bytes()) / static_cast<double>(sig_table.digest_bytes()), 10.0);
}

TEST(BuildTest, SignatureStorageWinsAboveEightBytes) {
  std::mt19937_64 rng(12);
  for (std::size_t len = 1; len <= 40; ++len) {
    const auto rel = keyed(random_keys(rng, 50, len, 26));
    const auto sig_bytes = build(rel, spec_for(JoinAlgorithm::HashSignature)).digest_bytes();
    const auto key_bytes = build(rel, spec_for(JoinAlgorithm::HashBaseline)).digest_bytes();
    EXPECT_EQ(sig_bytes < key_bytes, len > 8) << "len=" << len;
  }
}

TEST(ProbeTest, EmptyBucketContributesNothing) {
  const auto r = keyed({"alpha"});
  const auto s = keyed({"beta", "gamma"});
  for (auto algo : {JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature}) {
    const auto result = probe(build(r, spec_for(algo)), s, spec_for(algo));
    EXPECT_TRUE(result.pairs.empty());
    EXPECT_EQ(result.stats.probes, 2u);
  }
}

TEST(ProbeTest, SMajorOrder) {
  const auto r = keyed({"x", "y", "x"});
  const auto s = keyed({"y", "x"});
  const auto result = probe(build(r, spec_for(JoinAlgorithm::HashSignature)), s, spec_for(JoinAlgorithm::HashSignature));
  EXPECT_EQ(result.pairs, (std::vector<RowPair>{{1, 0}, {0, 1}, {2, 1}}));
}

TEST(ProbeTest, RejectsMismatchedSpec) {
  const auto r = keyed({"a"});
  const auto table = build(r, spec_for(JoinAlgorithm::HashSignature));
  EXPECT_THROW(probe(table, r, spec_for(JoinAlgorithm::HashSignature, SigMode::Verify, 1, {16, 3})), SpecMismatch);
  EXPECT_THROW(probe(table, r, spec_for(JoinAlgorithm::HashBaseline)), SpecMismatch);
}

TEST(ProbeTest, VerifyMatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(21);
  for (int instance = 0; instance < 40; ++instance) {
    const std::size_t len = 1 + rng() % 5;
    const auto r = keyed(random_keys(rng, 1 + rng() % 300, len, 3));
    const auto s = keyed(random_keys(rng, rng() % 300, len, 3));
    const auto expected = sorted(oracle_pairs(r, s));
    for (auto algo : {JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature}) {
      const auto spec = spec_for(algo);
      const auto result = probe(build(r, spec), s, spec);
      ASSERT_EQ(sorted(result.pairs), expected) << "instance " << instance;
      ASSERT_EQ(result.stats.collisions.value(), 0u);
      ASSERT_EQ(result.stats.verified_matches.value(), expected.size());
    }
  }
}

TEST(ProbeTest, TrustModeWithWeakSignaturesShowsCollisions) {
  // One GF(2^8) symbol: about 1 in 256 unequal same-length keys collide.
  std::mt19937_64 rng(31);
  const auto r = keyed(random_keys(rng, 2000, 12, 26));
  const auto s = keyed(random_keys(rng, 3000, 12, 26));
  const SigConfig weak{8, 1};
  const auto trust_spec = spec_for(JoinAlgorithm::HashSignature, SigMode::Trust, 1, weak);
  const auto verify_spec = spec_for(JoinAlgorithm::HashSignature, SigMode::Verify, 1, weak);
  const auto trusted = probe(build(r, trust_spec), s, trust_spec);
  const auto verified = probe(build(r, verify_spec), s, verify_spec);
  const auto expected = sorted(oracle_pairs(r, s));

  EXPECT_EQ(sorted(verified.pairs), expected);
  EXPECT_FALSE(trusted.stats.verified_matches.has_value());
  EXPECT_FALSE(trusted.stats.collisions.has_value());
  EXPECT_EQ(trusted.pairs.size(), trusted.stats.signature_matches);
  EXPECT_EQ(trusted.stats.signature_matches, verified.stats.signature_matches);

  // oracle pairs are a subset; every extra is a genuine signature collision
  const auto trust_sorted = sorted(trusted.pairs);
  EXPECT_TRUE(std::includes(trust_sorted.begin(), trust_sorted.end(), expected.begin(), expected.end()));
  const auto rk = r.string_column("k");
  const auto sk = s.string_column("k");
  SignatureBase base(weak);
  std::size_t extras = 0;
  for (const auto& [i, j] : trust_sorted) {
    if (rk[i] == sk[j]) continue;
    ++extras;
    EXPECT_TRUE(signatures_equal(base.compute(rk[i]), base.compute(sk[j])));
  }
  EXPECT_GT(extras, 0u);
  EXPECT_EQ(*verified.stats.collisions, extras);
  EXPECT_EQ(*verified.stats.collisions, verified.stats.signature_matches - *verified.stats.verified_matches);
}

TEST(ProbeTest, ConcurrentProbesShareOneTable) {
  std::mt19937_64 rng(41);
  const auto r = keyed(random_keys(rng, 500, 3, 5));
  const auto s = keyed(random_keys(rng, 800, 3, 5));
  const auto spec = spec_for(JoinAlgorithm::HashSignature);
  const auto table = build(r, spec);
  const auto expected = probe(table, s, spec).pairs;
  std::vector<std::vector<RowPair>> got(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < got.size(); ++t) threads.emplace_back([&, t] { got[t] = probe(table, s, spec).pairs; });
  for (auto& t : threads) t.join();
  for (const auto& g : got) EXPECT_EQ(g, expected);
}

TEST(GracePartitionTest, SinglePartitionIsInput) {
  std::mt19937_64 rng(51);
  const auto rel = keyed(random_keys(rng, 100, 4, 4));
  const auto parts = grace_partition(rel, "k", 1, spec_for(JoinAlgorithm::GraceSignature));
  ASSERT_EQ(parts.size(), 1u);
  std::vector<std::uint32_t> all(100);
  for (std::uint32_t i = 0; i < 100; ++i) all[i] = i;
  EXPECT_EQ(parts[0], all);
  EXPECT_THROW(grace_partition(rel, "k", 0, spec_for(JoinAlgorithm::GraceSignature)), std::invalid_argument);
}

TEST(GracePartitionTest, UnionIsInputAndEqualKeysCoLocate) {
  std::mt19937_64 rng(52);
  const auto rel = keyed(random_keys(rng, 1000, 3, 6));
  const auto keys = rel.string_column("k");
  for (auto algo : {JoinAlgorithm::GraceBaseline, JoinAlgorithm::GraceSignature}) {
    const auto parts = grace_partition(rel, "k", 8, spec_for(algo));
    ASSERT_EQ(parts.size(), 8u);
    std::multiset<std::string_view> merged;
    std::map<std::string_view, std::size_t> home;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      for (auto row : parts[p]) {
        merged.insert(keys[row]);
        auto [it, inserted] = home.emplace(keys[row], p);
        EXPECT_EQ(it->second, p);
      }
    }
    EXPECT_EQ(merged, std::multiset<std::string_view>(keys.begin(), keys.end()));
  }
}

TEST(GraceJoinTest, SinglePartitionEqualsSimpleJoin) {
  std::mt19937_64 rng(61);
  const auto r = keyed(random_keys(rng, 300, 2, 8));
  const auto s = keyed(random_keys(rng, 400, 2, 8));
  EXPECT_EQ(grace_join(r, s, spec_for(JoinAlgorithm::GraceSignature, SigMode::Verify, 1)).pairs,
            probe(build(r, spec_for(JoinAlgorithm::HashSignature)), s, spec_for(JoinAlgorithm::HashSignature)).pairs);
  EXPECT_EQ(grace_join(r, s, spec_for(JoinAlgorithm::GraceBaseline, SigMode::Verify, 1)).pairs,
            probe(build(r, spec_for(JoinAlgorithm::HashBaseline)), s, spec_for(JoinAlgorithm::HashBaseline)).pairs);
}

TEST(GraceJoinTest, DisjointDomainsGiveNothing) {
  const auto r = keyed({"a1", "a2", "a3"});
  const auto s = keyed({"b1", "b2", "b3", "b4"});
  for (auto algo : kExactAlgorithms) EXPECT_TRUE(run_join(r, s, spec_for(algo)).pairs.empty());
}

TEST(GraceJoinTest, InvariantToPartitionCount) {
  std::mt19937_64 rng(62);
  const auto r = keyed(random_keys(rng, 600, 3, 5));
  const auto s = keyed(random_keys(rng, 900, 3, 5));
  const auto expected = sorted(oracle_pairs(r, s));
  for (auto algo : {JoinAlgorithm::GraceBaseline, JoinAlgorithm::GraceSignature}) {
    for (std::size_t parts : {1u, 2u, 3u, 8u, 17u, 64u}) {
      const auto result = grace_join(r, s, spec_for(algo, SigMode::Verify, parts));
      EXPECT_EQ(sorted(result.pairs), expected) << to_string(algo) << " parts=" << parts;
      EXPECT_EQ(result.stats.probes, s.size());
    }
  }
}

TEST(GraceJoinTest, PeakTableIsLargestPartition) {
  std::mt19937_64 rng(63);
  const auto r = keyed(random_keys(rng, 800, 20, 26));
  const auto s = keyed(random_keys(rng, 800, 20, 26));
  const auto whole = run_join(r, s, spec_for(JoinAlgorithm::HashBaseline)).stats.peak_table_bytes;
  const auto split = grace_join(r, s, spec_for(JoinAlgorithm::GraceBaseline, SigMode::Verify, 8)).stats.peak_table_bytes;
  EXPECT_EQ(whole, 800u * 20);
  EXPECT_LT(split, whole / 4);
  EXPECT_GT(split, whole / 16);
}

TEST(RunJoinTest, SwapsToBuildOnSmallerInput) {
  std::mt19937_64 rng(71);
  const auto big = keyed(random_keys(rng, 500, 2, 6));
  const auto small = keyed(random_keys(rng, 80, 2, 6));
  const auto expected = sorted(oracle_pairs(big, small));
  for (auto algo : kExactAlgorithms) {
    const auto result = run_join(big, small, spec_for(algo));
    EXPECT_EQ(sorted(result.pairs), expected) << to_string(algo);
    EXPECT_EQ(result.stats.probes, big.size()) << "larger side is probed";
  }
}

TEST(RunJoinTest, OracleEquivalenceAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t len = 1 + rng() % 4;
    const auto r = keyed(random_keys(rng, rng() % 400, len, 4));
    const auto s = keyed(random_keys(rng, rng() % 400, len, 4));
    const auto expected = sorted(oracle_pairs(r, s));
    EXPECT_EQ(run_join(r, s, spec_for(JoinAlgorithm::NestedLoop)).pairs, oracle_pairs(r, s));
    for (auto algo : kExactAlgorithms) {
      const auto result = run_join(r, s, spec_for(algo, SigMode::Verify, 1 + seed % 9));
      ASSERT_EQ(sorted(result.pairs), expected) << to_string(algo) << " seed " << seed;
      ASSERT_EQ(result.stats.collisions.value(), 0u);
    }
    const auto trusted = sorted(run_join(r, s, spec_for(JoinAlgorithm::HashSignature, SigMode::Trust)).pairs);
    EXPECT_TRUE(std::includes(trusted.begin(), trusted.end(), expected.begin(), expected.end()));
  }
}

TEST(RunJoinTest, NamesRoundTrip) {
  for (auto algo : {JoinAlgorithm::NestedLoop, JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature,
                    JoinAlgorithm::GraceBaseline, JoinAlgorithm::GraceSignature}) {
    EXPECT_EQ(parse_join_algorithm(to_string(algo)), algo);
  }
  EXPECT_FALSE(parse_join_algorithm("merge").has_value());
  EXPECT_EQ(parse_sig_mode("trust"), SigMode::Trust);
  EXPECT_THROW(run_join(keyed({}), keyed({}), spec_for(JoinAlgorithm::GraceSignature, SigMode::Verify, 0)),
               std::invalid_argument);
}

}  // namespace
}  // namespace sigjoin
