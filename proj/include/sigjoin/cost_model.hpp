#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sigjoin::cost {

/// Inputs to the analytic cost of a signature hash join.
///
/// Unit costs are abstract, non-negative and per tuple, except
/// write_hsign_to_disk and the two result terms, which are charged once.
struct CostParams {
  /// Blocks (pages) per relation.
  double b = 1;
  /// Memory pages available.
  double k = 1;
  /// Pages reserved for the hash table of the first bucket.
  double r_area = 0;
  /// Build-side tuples.
  double m = 0;
  /// Probe-side tuples.
  double n = 0;
  /// Partitioning passes.
  double loop_factor = 1;

  double disk_input_r = 0;
  double hash_bucket = 0;
  double disk_output_buckets = 0;
  double read_bucket = 0;
  double signature_generating = 0;
  double build_sign_cost = 0;
  double write_hsign_to_disk = 0;
  double disk_input_s = 0;
  double signature_calculation = 0;
  double probe_sign_cost = 0;
  double disk_input_tuples_result = 0;
  double materialize_t = 0;

  /// Throws std::invalid_argument unless b >= 1, k >= 1, 0 <= r_area <= b,
  /// loop_factor >= 1 and every count and unit cost is non-negative.
  void validate() const;

  /// Names accepted by set() and the config file, in declaration order.
  static const std::vector<std::string_view>& names();
  /// Assigns a parameter by name; false for unknown names.
  bool set(std::string_view name, double value);
  double get(std::string_view name) const;

  /// A 4 KB-page device profile with signature costs taken from a measured
  /// throughput of about 25 ms per MB (values in milliseconds).
  static CostParams default_profile();
};

struct CostBreakdown {
  double memory_needed_pages = 0;
  double disk_ios = 0;
  double build_buckets = 0;
  double build_hash = 0;
  double probe_hash = 0;
  double output_result = 0;
  /// Sum of the six terms above, as written, without unit normalisation.
  double total = 0;
  /// Temporary-file reads and writes inside disk_ios: 4(b - r_area).
  double grace_temp_ios = 0;

  /// (component, value) in report order.
  std::vector<std::pair<std::string_view, double>> components() const;
};

/// max(ceil(b / k), k) pages.
double memory_needed(double b, double k);

/// 2b + 4(b - r_area); 6b when no area is reserved.
double disk_ios(double b, double r_area);

CostBreakdown evaluate(const CostParams& params);

/// key=value lines, '#' comments. Unknown keys and malformed values raise
/// DataError with the line number. Keys absent from the file keep the value
/// already in `base`.
CostParams parse_params(std::istream& in, CostParams base = {});
CostParams load_params(const std::filesystem::path& path, CostParams base = {});

void emit_breakdown_csv(std::ostream& out, const CostBreakdown& breakdown);
void emit_breakdown_text(std::ostream& out, const CostParams& params, const CostBreakdown& breakdown);

}  // namespace sigjoin::cost
