#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigjoin/generator.hpp"
#include "sigjoin/join.hpp"

namespace sigjoin::bench {

struct BenchConfig {
  /// Cardinalities, selectivity, row width and seed; attr_len is overridden by
  /// each entry of attr_lens.
  GenSpec gen{};
  std::vector<std::size_t> attr_lens{2, 7, 10, 50, 100};
  std::size_t repetitions = 5;
  std::size_t warmups = 1;
  SigMode mode = SigMode::Verify;
  SigConfig sig_config{};

  void validate() const;
};

/// Median timings of one algorithm at one key length.
struct BenchRecord {
  JoinAlgorithm algorithm = JoinAlgorithm::HashBaseline;
  SigMode mode = SigMode::Verify;
  std::size_t attr_len = 0;
  std::size_t rows_r = 0;
  std::size_t rows_s = 0;
  double selectivity = 0;
  std::uint64_t seed = 0;
  double build_ms = 0;
  double probe_ms = 0;
  double total_ms = 0;
  std::uint64_t peak_table_bytes = 0;
  std::uint64_t result_rows = 0;
  std::uint64_t collisions = 0;
  /// Median baseline total time over this algorithm's median total time; 1
  /// for the baseline itself.
  double speedup = 1;
};

double median(std::vector<double> values);

/// For each key length: generate data, then alternate baseline and signature
/// hash joins (warmups discarded) and keep median timings. Runs on the calling
/// thread only. Two records per length: baseline first.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

void emit_csv_header(std::ostream& out);
void emit_csv_row(std::ostream& out, const BenchRecord& record);
void emit_csv(std::ostream& out, const std::vector<BenchRecord>& records);

}  // namespace sigjoin::bench
