#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigjoin/relation.hpp"
#include "sigjoin/signature.hpp"

namespace sigjoin {

enum class JoinAlgorithm { NestedLoop, HashBaseline, HashSignature, GraceBaseline, GraceSignature };

/// What a signature join does when two signatures are equal.
enum class SigMode {
  /// Byte-compare the keys and emit only true matches.
  Verify,
  /// Emit on signature equality alone.
  Trust,
};

std::string_view to_string(JoinAlgorithm algorithm);
std::optional<JoinAlgorithm> parse_join_algorithm(std::string_view text);
std::string_view to_string(SigMode mode);
std::optional<SigMode> parse_sig_mode(std::string_view text);

bool uses_signatures(JoinAlgorithm algorithm) noexcept;
bool is_grace(JoinAlgorithm algorithm) noexcept;

class SpecMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct JoinSpec {
  std::string left_key;
  std::string right_key;
  JoinAlgorithm algorithm = JoinAlgorithm::HashSignature;
  /// Only meaningful for signature algorithms.
  SigMode mode = SigMode::Verify;
  /// Grace partition count.
  std::size_t partitions = 8;
  SigConfig sig_config{};

  /// Throws std::invalid_argument on partitions == 0.
  void validate() const;
};

using RowPair = std::pair<std::uint32_t, std::uint32_t>;

struct JoinStats {
  std::uint64_t build_ns = 0;
  std::uint64_t probe_ns = 0;
  /// Digest bytes held by the largest build table: n_sig*f/8 + 4 per entry for
  /// signature tables, the key length per entry for baseline tables.
  std::uint64_t peak_table_bytes = 0;
  std::uint64_t probes = 0;
  /// Bucket entries whose digest equalled the probe digest.
  std::uint64_t signature_matches = 0;
  /// Byte-verified matches; unset in trust mode.
  std::optional<std::uint64_t> verified_matches;
  /// signature_matches - verified_matches; unset in trust mode.
  std::optional<std::uint64_t> collisions;

  std::uint64_t total_ns() const noexcept { return build_ns + probe_ns; }
  void merge(const JoinStats& other);
};

struct JoinResult {
  /// (row in R, row in S).
  std::vector<RowPair> pairs;
  JoinStats stats;
};

/// Fibonacci-style multiplicative hash of a digest's bytes, folded one byte at
/// a time. `seed` separates bucket routing from partition routing.
std::uint64_t digest_hash(std::span<const unsigned char> bytes, std::uint64_t seed) noexcept;

/// Bucket in [0, count) for a digest.
std::size_t bucket_of(std::string_view key, std::size_t count) noexcept;
std::size_t bucket_of(const AlgebraicSignature& sig, std::size_t count) noexcept;
/// Partition in [0, count); independent of bucket_of.
std::size_t partition_of(std::string_view key, std::size_t count) noexcept;
std::size_t partition_of(const AlgebraicSignature& sig, std::size_t count) noexcept;

/// Smallest power of two >= 2 * rows (at least 1).
std::size_t bucket_count_for(std::size_t rows) noexcept;

/// In-memory hash table over the build relation's join keys.
///
/// Buckets are stored contiguously: entries of bucket b occupy
/// [offsets[b], offsets[b+1]) in insertion order. Each entry holds the key
/// digest (a signature, or a copy of the key for baseline tables) and the
/// row index in the build relation. The table keeps views of the build
/// relation's keys for verification, so the relation must outlive it.
class BuildTable {
 public:
  JoinAlgorithm algorithm() const noexcept { return algorithm_; }
  bool uses_signatures() const noexcept { return signatures_; }
  SigConfig sig_config() const noexcept { return sig_config_; }

  std::size_t bucket_count() const noexcept { return offsets_.size() - 1; }
  std::size_t size() const noexcept { return rows_.size(); }
  /// Build-relation rows stored in bucket `b`, in insertion order.
  std::span<const std::uint32_t> bucket(std::size_t b) const noexcept {
    return std::span<const std::uint32_t>(rows_).subspan(offsets_[b], offsets_[b + 1] - offsets_[b]);
  }
  /// Digests of bucket `b`, parallel to bucket(b).
  std::span<const AlgebraicSignature> bucket_signatures(std::size_t b) const noexcept {
    return std::span<const AlgebraicSignature>(signatures_digests_).subspan(offsets_[b], offsets_[b + 1] - offsets_[b]);
  }
  std::span<const std::string> bucket_keys(std::size_t b) const noexcept {
    return std::span<const std::string>(key_digests_).subspan(offsets_[b], offsets_[b + 1] - offsets_[b]);
  }

  std::uint64_t digest_bytes() const noexcept { return digest_bytes_; }
  std::uint64_t build_ns() const noexcept { return build_ns_; }

 private:
  friend class JoinKernel;

  JoinAlgorithm algorithm_ = JoinAlgorithm::HashSignature;
  bool signatures_ = true;
  SigConfig sig_config_{};
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> rows_;
  std::vector<AlgebraicSignature> signatures_digests_;
  std::vector<std::string> key_digests_;
  std::vector<std::string_view> build_keys_;
  std::uint64_t digest_bytes_ = 0;
  std::uint64_t build_ns_ = 0;
};

/// Correctness oracle: every (i, j) with byte-equal keys in (i, j) order.
/// Throws MissingColumn, or std::invalid_argument for non-string key columns.
JoinResult nested_loop_join(const Relation& r, const Relation& s, std::string_view left_key,
                            std::string_view right_key);

/// Build phase of a simple hash join over all rows of `r`. Signature
/// algorithms store one signature per row (computed once); baseline
/// algorithms store a copy of each key.
BuildTable build(const Relation& r, const JoinSpec& spec);

/// Probe phase: streams `s`, emitting pairs in S-major order. Throws
/// SpecMismatch if the table was built with another signature setup.
JoinResult probe(const BuildTable& table, const Relation& s, const JoinSpec& spec);

/// Row indices of `rel` routed to each of `partitions` partitions by
/// partition_of over the key digest (signature or raw key depending on
/// spec.algorithm). Rows keep their relative order.
std::vector<std::vector<std::uint32_t>> grace_partition(const Relation& rel, std::string_view key,
                                                        std::size_t partitions, const JoinSpec& spec);

/// Partition both inputs with the same routing, then build and probe each
/// partition pair. Pairs are reported in partition order.
JoinResult grace_join(const Relation& r, const Relation& s, const JoinSpec& spec);

/// Runs spec.algorithm. Hash and grace variants build on the smaller input
/// and report pairs as (row in r, row in s) regardless.
JoinResult run_join(const Relation& r, const Relation& s, const JoinSpec& spec);

}  // namespace sigjoin
