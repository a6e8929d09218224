#include "sigjoin/join.hpp"

#include <algorithm>
#include <bit>
#include <chrono>

namespace sigjoin {

namespace {

constexpr std::uint64_t kGoldenRatio = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kBucketSeed = 0x243F6A8885A308D3ull;
constexpr std::uint64_t kPartitionSeed = 0x13198A2E03707344ull;

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point since) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count());
}

std::size_t reduce(std::uint64_t h, std::size_t count) noexcept {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(h) * count) >> 64);
}

std::span<const unsigned char> as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const unsigned char*>(s.data()), s.size()};
}

std::uint64_t signature_hash(const AlgebraicSignature& sig, std::uint64_t seed) noexcept {
  // The symbols alone, little-endian. Equal signatures have equal symbols, so
  // the length field adds nothing to routing.
  unsigned char buf[kMaxSignatureSymbols * 2];
  std::size_t n = 0;
  if (sig.config().f == 16) {
    for (GfElement s : sig.symbols()) {
      buf[n++] = static_cast<unsigned char>(s & 0xFF);
      buf[n++] = static_cast<unsigned char>(s >> 8);
    }
  } else {
    for (GfElement s : sig.symbols()) buf[n++] = static_cast<unsigned char>(s);
  }
  return digest_hash({buf, n}, seed);
}

std::vector<std::uint32_t> iota_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
  return rows;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& all, std::span<const std::uint32_t> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(all[r]);
  return out;
}

}  // namespace

std::string_view to_string(JoinAlgorithm algorithm) {
  switch (algorithm) {
    case JoinAlgorithm::NestedLoop: return "nested-loop";
    case JoinAlgorithm::HashBaseline: return "hash";
    case JoinAlgorithm::HashSignature: return "sig-hash";
    case JoinAlgorithm::GraceBaseline: return "grace";
    case JoinAlgorithm::GraceSignature: return "grace-sig";
  }
  return "?";
}

std::optional<JoinAlgorithm> parse_join_algorithm(std::string_view text) {
  for (auto a : {JoinAlgorithm::NestedLoop, JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature,
                 JoinAlgorithm::GraceBaseline, JoinAlgorithm::GraceSignature}) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

std::string_view to_string(SigMode mode) { return mode == SigMode::Verify ? "verify" : "trust"; }

std::optional<SigMode> parse_sig_mode(std::string_view text) {
  if (text == "verify") return SigMode::Verify;
  if (text == "trust") return SigMode::Trust;
  return std::nullopt;
}

bool uses_signatures(JoinAlgorithm algorithm) noexcept {
  return algorithm == JoinAlgorithm::HashSignature || algorithm == JoinAlgorithm::GraceSignature;
}

bool is_grace(JoinAlgorithm algorithm) noexcept {
  return algorithm == JoinAlgorithm::GraceBaseline || algorithm == JoinAlgorithm::GraceSignature;
}

void JoinSpec::validate() const {
  if (partitions < 1) throw std::invalid_argument("partitions must be at least 1");
}

void JoinStats::merge(const JoinStats& other) {
  build_ns += other.build_ns;
  probe_ns += other.probe_ns;
  peak_table_bytes = std::max(peak_table_bytes, other.peak_table_bytes);
  probes += other.probes;
  signature_matches += other.signature_matches;
  if (verified_matches && other.verified_matches) {
    *verified_matches += *other.verified_matches;
    *collisions += *other.collisions;
  } else {
    verified_matches.reset();
    collisions.reset();
  }
}

std::uint64_t digest_hash(std::span<const unsigned char> bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) h = (h ^ b) * kGoldenRatio;
  return h ^ (h >> 31);
}

std::size_t bucket_of(std::string_view key, std::size_t count) noexcept {
  return reduce(digest_hash(as_bytes(key), kBucketSeed), count);
}

std::size_t bucket_of(const AlgebraicSignature& sig, std::size_t count) noexcept {
  return reduce(signature_hash(sig, kBucketSeed), count);
}

std::size_t partition_of(std::string_view key, std::size_t count) noexcept {
  return reduce(digest_hash(as_bytes(key), kPartitionSeed), count);
}

std::size_t partition_of(const AlgebraicSignature& sig, std::size_t count) noexcept {
  return reduce(signature_hash(sig, kPartitionSeed), count);
}

std::size_t bucket_count_for(std::size_t rows) noexcept { return std::bit_ceil(std::max<std::size_t>(2 * rows, 1)); }

/// Build and probe over key columns, shared by the simple and grace joins.
class JoinKernel {
 public:
  JoinKernel(const JoinSpec& spec) : spec_(spec), signatures_(uses_signatures(spec.algorithm)) {
    spec.validate();
    if (signatures_) base_.emplace(spec.sig_config);
  }

  const SignatureBase* base() const { return base_ ? &*base_ : nullptr; }

  /// `row_ids[i]` is the row index reported for `keys[i]`. `sigs` is either
  /// empty or holds the precomputed signature of each key.
  BuildTable build(std::span<const std::string_view> keys, std::span<const std::uint32_t> row_ids,
                   std::span<const AlgebraicSignature> sigs = {}) const {
    const auto start = Clock::now();
    BuildTable table;
    table.algorithm_ = spec_.algorithm;
    table.signatures_ = signatures_;
    table.sig_config_ = spec_.sig_config;

    const std::size_t n = keys.size();
    const std::size_t buckets = bucket_count_for(n);
    std::vector<std::uint32_t> bucket_index(n);
    std::vector<AlgebraicSignature> computed;
    if (signatures_ && sigs.empty()) {
      computed.reserve(n);
      for (auto k : keys) computed.push_back(base_->compute(k));
      sigs = computed;
    }
    for (std::size_t i = 0; i < n; ++i) {
      bucket_index[i] =
          static_cast<std::uint32_t>(signatures_ ? bucket_of(sigs[i], buckets) : bucket_of(keys[i], buckets));
    }

    table.offsets_.assign(buckets + 1, 0);
    for (auto b : bucket_index) ++table.offsets_[b + 1];
    for (std::size_t b = 0; b < buckets; ++b) table.offsets_[b + 1] += table.offsets_[b];
    std::vector<std::uint32_t> cursor(table.offsets_.begin(), table.offsets_.end() - 1);

    table.rows_.resize(n);
    if (signatures_) {
      table.signatures_digests_.resize(n);
      table.build_keys_.resize(n);
    } else {
      table.key_digests_.resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto pos = cursor[bucket_index[i]]++;
      table.rows_[pos] = row_ids[i];
      if (signatures_) {
        table.signatures_digests_[pos] = sigs[i];
        table.build_keys_[pos] = keys[i];
        table.digest_bytes_ += sigs[i].stored_bytes();
      } else {
        table.key_digests_[pos] = std::string(keys[i]);
        table.digest_bytes_ += keys[i].size();
      }
    }
    table.build_ns_ = elapsed_ns(start);
    return table;
  }

  void probe(const BuildTable& table, std::span<const std::string_view> keys, std::span<const std::uint32_t> row_ids,
             JoinResult& out, std::span<const AlgebraicSignature> sigs = {}) const {
    if (table.signatures_ != signatures_ || (signatures_ && !(table.sig_config_ == spec_.sig_config))) {
      throw SpecMismatch("build table was made for " + std::string(to_string(table.algorithm_)) + " GF(2^" +
                         std::to_string(table.sig_config_.f) + ")/" + std::to_string(table.sig_config_.n_sig) +
                         ", probe asks for " + std::string(to_string(spec_.algorithm)) + " GF(2^" +
                         std::to_string(spec_.sig_config.f) + ")/" + std::to_string(spec_.sig_config.n_sig));
    }
    const auto start = Clock::now();
    const std::size_t buckets = table.bucket_count();
    const bool verify = spec_.mode == SigMode::Verify;
    std::uint64_t matches = 0, verified = 0;

    if (signatures_) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        const AlgebraicSignature sig = sigs.empty() ? base_->compute(keys[i]) : sigs[i];
        const std::size_t b = bucket_of(sig, buckets);
        for (auto e = table.offsets_[b]; e < table.offsets_[b + 1]; ++e) {
          if (!(table.signatures_digests_[e] == sig)) continue;
          ++matches;
          if (verify) {
            if (table.build_keys_[e] != keys[i]) continue;
            ++verified;
          }
          out.pairs.emplace_back(table.rows_[e], row_ids[i]);
        }
      }
    } else {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        const std::size_t b = bucket_of(keys[i], buckets);
        for (auto e = table.offsets_[b]; e < table.offsets_[b + 1]; ++e) {
          if (table.key_digests_[e] != keys[i]) continue;
          ++matches;
          out.pairs.emplace_back(table.rows_[e], row_ids[i]);
        }
      }
      verified = matches;
    }

    JoinStats stats;
    stats.probe_ns = elapsed_ns(start);
    stats.build_ns = table.build_ns_;
    stats.peak_table_bytes = table.digest_bytes_;
    stats.probes = keys.size();
    stats.signature_matches = matches;
    if (!signatures_ || verify) {
      stats.verified_matches = verified;
      stats.collisions = matches - verified;
    }
    out.stats.merge(stats);
  }

 private:
  const JoinSpec& spec_;
  bool signatures_;
  std::optional<SignatureBase> base_;
};

namespace {

JoinResult empty_result() {
  JoinResult r;
  r.stats.verified_matches = 0;
  r.stats.collisions = 0;
  return r;
}

}  // namespace

JoinResult nested_loop_join(const Relation& r, const Relation& s, std::string_view left_key,
                            std::string_view right_key) {
  const auto left = r.string_column(left_key);
  const auto right = s.string_column(right_key);
  auto result = empty_result();
  const auto start = Clock::now();
  for (std::uint32_t i = 0; i < left.size(); ++i) {
    for (std::uint32_t j = 0; j < right.size(); ++j) {
      if (left[i] == right[j]) result.pairs.emplace_back(i, j);
    }
  }
  result.stats.probe_ns = elapsed_ns(start);
  result.stats.probes = right.size();
  result.stats.signature_matches = result.pairs.size();
  result.stats.verified_matches = result.pairs.size();
  return result;
}

BuildTable build(const Relation& r, const JoinSpec& spec) {
  const auto keys = r.string_column(spec.left_key);
  const auto rows = iota_rows(keys.size());
  return JoinKernel(spec).build(keys, rows);
}

JoinResult probe(const BuildTable& table, const Relation& s, const JoinSpec& spec) {
  const auto keys = s.string_column(spec.right_key);
  const auto rows = iota_rows(keys.size());
  auto result = empty_result();
  JoinKernel(spec).probe(table, keys, rows, result);
  return result;
}

std::vector<std::vector<std::uint32_t>> grace_partition(const Relation& rel, std::string_view key,
                                                        std::size_t partitions, const JoinSpec& spec) {
  if (partitions < 1) throw std::invalid_argument("partitions must be at least 1");
  const auto keys = rel.string_column(key);
  std::vector<std::vector<std::uint32_t>> out(partitions);
  std::optional<SignatureBase> base;
  if (uses_signatures(spec.algorithm)) base.emplace(spec.sig_config);
  for (std::uint32_t i = 0; i < keys.size(); ++i) {
    const auto p = base ? partition_of(base->compute(keys[i]), partitions) : partition_of(keys[i], partitions);
    out[p].push_back(i);
  }
  return out;
}

JoinResult grace_join(const Relation& r, const Relation& s, const JoinSpec& spec) {
  const JoinKernel kernel(spec);
  const auto r_keys = r.string_column(spec.left_key);
  const auto s_keys = s.string_column(spec.right_key);
  const std::size_t parts = spec.partitions;
  const SignatureBase* base = kernel.base();

  // Partitioning pass: digests are computed once and reused by build and probe.
  const auto start = Clock::now();
  std::vector<AlgebraicSignature> r_sigs, s_sigs;
  std::vector<std::vector<std::uint32_t>> r_parts(parts), s_parts(parts);
  if (base) {
    r_sigs.reserve(r_keys.size());
    s_sigs.reserve(s_keys.size());
    for (std::uint32_t i = 0; i < r_keys.size(); ++i) {
      r_sigs.push_back(base->compute(r_keys[i]));
      r_parts[partition_of(r_sigs.back(), parts)].push_back(i);
    }
    for (std::uint32_t i = 0; i < s_keys.size(); ++i) {
      s_sigs.push_back(base->compute(s_keys[i]));
      s_parts[partition_of(s_sigs.back(), parts)].push_back(i);
    }
  } else {
    for (std::uint32_t i = 0; i < r_keys.size(); ++i) r_parts[partition_of(r_keys[i], parts)].push_back(i);
    for (std::uint32_t i = 0; i < s_keys.size(); ++i) s_parts[partition_of(s_keys[i], parts)].push_back(i);
  }
  const std::uint64_t partition_ns = elapsed_ns(start);

  auto result = empty_result();
  for (std::size_t p = 0; p < parts; ++p) {
    const auto pr_keys = gather(r_keys, r_parts[p]);
    const auto ps_keys = gather(s_keys, s_parts[p]);
    std::vector<AlgebraicSignature> pr_sigs, ps_sigs;
    if (base) {
      pr_sigs = gather(r_sigs, r_parts[p]);
      ps_sigs = gather(s_sigs, s_parts[p]);
    }
    const auto table = kernel.build(pr_keys, r_parts[p], pr_sigs);
    kernel.probe(table, ps_keys, s_parts[p], result, ps_sigs);
  }
  result.stats.build_ns += partition_ns;
  return result;
}

JoinResult run_join(const Relation& r, const Relation& s, const JoinSpec& spec) {
  spec.validate();
  if (spec.algorithm == JoinAlgorithm::NestedLoop) return nested_loop_join(r, s, spec.left_key, spec.right_key);

  auto run = [](const Relation& build_side, const Relation& probe_side, const JoinSpec& js) {
    if (is_grace(js.algorithm)) return grace_join(build_side, probe_side, js);
    JoinResult result = empty_result();
    const JoinKernel kernel(js);
    const auto b_keys = build_side.string_column(js.left_key);
    const auto p_keys = probe_side.string_column(js.right_key);
    const auto table = kernel.build(b_keys, iota_rows(b_keys.size()));
    kernel.probe(table, p_keys, iota_rows(p_keys.size()), result);
    return result;
  };

  if (r.size() <= s.size()) return run(r, s, spec);

  JoinSpec swapped = spec;
  std::swap(swapped.left_key, swapped.right_key);
  auto result = run(s, r, swapped);
  for (auto& [a, b] : result.pairs) std::swap(a, b);
  return result;
}

}  // namespace sigjoin
