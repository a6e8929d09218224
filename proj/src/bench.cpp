#include "sigjoin/bench.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace sigjoin::bench {

void BenchConfig::validate() const {
  if (attr_lens.empty()) throw std::invalid_argument("attr-len list must not be empty");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  GenSpec probe_spec = gen;
  for (auto len : attr_lens) {
    probe_spec.attr_len = len;
    probe_spec.validate();
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  config.validate();
  std::vector<BenchRecord> records;
  for (auto len : config.attr_lens) {
    GenSpec gen = config.gen;
    gen.attr_len = len;
    const auto data = generate_pair(gen);

    const JoinAlgorithm algorithms[] = {JoinAlgorithm::HashBaseline, JoinAlgorithm::HashSignature};
    std::vector<double> build[2], probe[2], total[2];
    JoinStats last[2];
    std::uint64_t rows[2] = {0, 0};
    const std::size_t runs = config.warmups + config.repetitions;
    for (std::size_t run = 0; run < runs; ++run) {
      for (int slot = 0; slot < 2; ++slot) {
        // alternate which algorithm goes first
        const int a = (run % 2 == 0) ? slot : 1 - slot;
        JoinSpec spec{kGeneratedKeyColumn, kGeneratedKeyColumn, algorithms[a], config.mode, 1, config.sig_config};
        const auto result = run_join(data.r, data.s, spec);
        if (run < config.warmups) continue;
        build[a].push_back(static_cast<double>(result.stats.build_ns) / 1e6);
        probe[a].push_back(static_cast<double>(result.stats.probe_ns) / 1e6);
        total[a].push_back(static_cast<double>(result.stats.total_ns()) / 1e6);
        last[a] = result.stats;
        rows[a] = result.pairs.size();
      }
    }

    const double baseline_total = median(total[0]);
    for (int a = 0; a < 2; ++a) {
      BenchRecord rec;
      rec.algorithm = algorithms[a];
      rec.mode = config.mode;
      rec.attr_len = len;
      rec.rows_r = gen.card_r;
      rec.rows_s = gen.card_s;
      rec.selectivity = gen.selectivity;
      rec.seed = gen.seed;
      rec.build_ms = median(build[a]);
      rec.probe_ms = median(probe[a]);
      rec.total_ms = median(total[a]);
      rec.peak_table_bytes = last[a].peak_table_bytes;
      rec.result_rows = rows[a];
      rec.collisions = last[a].collisions.value_or(0);
      rec.speedup = rec.total_ms > 0 ? baseline_total / rec.total_ms : 0;
      records.push_back(rec);
    }
  }
  return records;
}

void emit_csv_header(std::ostream& out) {
  out << "algo,attr_len,rows_r,rows_s,build_ms,probe_ms,total_ms,peak_table_bytes,result_rows,collisions,speedup,"
         "mode,selectivity,seed\n";
}

void emit_csv_row(std::ostream& out, const BenchRecord& r) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << to_string(r.algorithm) << ',' << r.attr_len << ',' << r.rows_r << ',' << r.rows_s << ',' << std::fixed
      << std::setprecision(4) << r.build_ms << ',' << r.probe_ms << ',' << r.total_ms << ',' << r.peak_table_bytes
      << ',' << r.result_rows << ',' << r.collisions << ',' << std::setprecision(3) << r.speedup << ','
      << (uses_signatures(r.algorithm) ? to_string(r.mode) : "exact") << ',';
  out.flags(flags);
  out << std::setprecision(9) << r.selectivity << ',' << r.seed << '\n';
  out.precision(precision);
}

void emit_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  emit_csv_header(out);
  for (const auto& r : records) emit_csv_row(out, r);
}

}  // namespace sigjoin::bench
